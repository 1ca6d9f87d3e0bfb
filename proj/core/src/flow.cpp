#include "semiconj/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace semiconj {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr long kMaxSteps = 2'000'000;

/// Bisection tolerance on event times: two orders tighter than the reported
/// event_tol so downstream compositions keep their full budget.
double event_width_tol(const IntegratorConfig& cfg, double t_scale) {
    return std::max(cfg.event_tol * 1e-2, 8.0 * kEps * std::max(1.0, t_scale));
}

/// Locates the sign boundary of f on [lo, hi]; f(lo) has sign `sign_lo`,
/// f(hi) has the opposite sign (or is zero). Returns the midpoint of the
/// final bracket.
double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi,
                          double sign_lo, double width_tol) {
    for (int iter = 0; iter < 200 && (hi - lo) > width_tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || (fm > 0.0) != (sign_lo > 0.0)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Dormand-Prince 5(4) pair.
struct RkStep {
    Vec y;            // 5th-order solution
    double err = 0.0; // scaled error estimate
    bool finite = false;
};

RkStep rk45_step(const std::function<Vec(const Vec&)>& f, const Vec& x, double h, double rel_tol,
                 double abs_tol) {
    const Vec k1 = f(x);
    const Vec k2 = f(x + h * (1.0 / 5.0) * k1);
    const Vec k3 = f(x + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
    const Vec k4 = f(x + h * ((44.0 / 45.0) * k1 + (-56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
    const Vec k5 = f(x + h * ((19372.0 / 6561.0) * k1 + (-25360.0 / 2187.0) * k2 +
                              (64448.0 / 6561.0) * k3 + (-212.0 / 729.0) * k4));
    const Vec k6 = f(x + h * ((9017.0 / 3168.0) * k1 + (-355.0 / 33.0) * k2 +
                              (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 +
                              (-5103.0 / 18656.0) * k5));
    RkStep out;
    out.y = x + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 +
                     (-2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    const Vec k7 = f(out.y);
    const Vec y4 = x + h * ((5179.0 / 57600.0) * k1 + (7571.0 / 16695.0) * k3 +
                            (393.0 / 640.0) * k4 + (-92097.0 / 339200.0) * k5 +
                            (187.0 / 2100.0) * k6 + (1.0 / 40.0) * k7);
    double err_sq = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(out.y[i]));
        const double e = (out.y[i] - y4[i]) / scale;
        err_sq += e * e;
    }
    out.err = std::sqrt(err_sq / static_cast<double>(x.size()));
    out.finite = out.y.allFinite() && std::isfinite(out.err);
    return out;
}

enum class StopReason { Duration, Snap, Exit, Halted };

struct Propagation {
    Vec state;
    double elapsed = 0.0;
    StopReason reason = StopReason::Duration;
    double event_time = 0.0;
};

struct PropagateOptions {
    bool check_domain = true;
    bool check_snap = true;
};

/// Called after every accepted step with (t0, x0, t1, x1); returning false
/// halts the propagation at x1.
using StepObserver = std::function<bool(double, const Vec&, double, const Vec&)>;

Vec advance_exact(const SystemSpec& sys, const IntegratorConfig& cfg, bool backward, const Vec& x,
                  double dt);

Propagation propagate(const SystemSpec& sys, const IntegratorConfig& cfg, bool backward,
                      const Vec& x0, double duration, const PropagateOptions& opt,
                      const StepObserver& observer = {}) {
    const Vec& xstar = sys.equilibrium;
    auto rhs = [&sys, &xstar, backward](const Vec& p) -> Vec {
        if ((p - xstar).norm() == 0.0) return Vec::Zero(p.size());
        Vec v = sys.field(p);
        return backward ? Vec(-v) : v;
    };

    Propagation result;
    result.state = x0;
    if (duration <= 0.0) {
        return result;
    }
    if (opt.check_snap && !backward && (x0 - xstar).norm() <= cfg.snap_radius) {
        result.state = xstar;
        result.reason = StopReason::Snap;
        result.event_time = 0.0;
        result.elapsed = duration;
        return result;
    }

    Vec x = x0;
    double s = 0.0;
    double h_next = 0.0;
    long steps = 0;

    while (duration - s > 1e-15 * std::max(1.0, duration)) {
        if (++steps > kMaxSteps) {
            throw std::runtime_error("integration failure: step budget exhausted at t = " +
                                     std::to_string(s));
        }
        const double dist = (x - xstar).norm();
        const Vec fx = rhs(x);
        const double speed = std::max(fx.norm(), 1e-300);
        // Near x* the built-in fields are not Lipschitz; keeping the step
        // below half the remaining distance rules out overshooting x*.
        const double h_cap = 0.5 * dist / speed;
        if (h_next <= 0.0) h_next = 0.01 * std::max(1.0, dist) / speed;
        double h = std::min({h_next, h_cap, duration - s});
        const double h_min = 100.0 * kEps * std::max(1.0, s);
        if (h < h_min) h = std::min(h_min, duration - s);

        const RkStep step = rk45_step(rhs, x, h, cfg.rel_tol, cfg.abs_tol);
        if (!step.finite) {
            h_next = 0.25 * h;
            if (h_next < h_min) {
                std::ostringstream msg;
                msg << "integration failure: non-finite state at t = " << s
                    << ", last valid |x - x*| = " << dist;
                throw std::runtime_error(msg.str());
            }
            continue;
        }
        if (step.err > 1.0) {
            if (h <= h_min * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "integration failure: step size underflow at t = " << s
                    << ", last valid |x - x*| = " << dist;
                throw std::runtime_error(msg.str());
            }
            h_next = h * std::max(0.2, 0.9 * std::pow(step.err, -0.2));
            continue;
        }

        Vec x_new = step.y;
        double s_new = s + h;
        h_next = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(step.err, 1e-16), -0.2)));

        // Components within the absolute tolerance of x* are numerical zero.
        // Superexponentially contracting components otherwise hover at the
        // noise floor and pin the step size to the stiff manifold's stability
        // limit (the planar built-in does this near its invariant axis).
        for (Eigen::Index i = 0; i < x_new.size(); ++i) {
            if (x_new[i] != xstar[i] && std::abs(x_new[i] - xstar[i]) <= cfg.abs_tol) {
                x_new[i] = xstar[i];
            }
        }

        if (opt.check_domain && !sys.in_domain(x_new)) {
            const double sign_lo = 1.0;  // boundary gap is positive at the step start
            auto gap = [&](double dt) {
                return sys.domain.boundary_gap(advance_exact(sys, cfg, backward, x, dt), xstar);
            };
            const double dt_exit =
                bisect_sign_change(gap, 0.0, h, sign_lo, event_width_tol(cfg, s_new));
            const Vec exit_state = advance_exact(sys, cfg, backward, x, dt_exit);
            if (observer && !observer(s, x, s + dt_exit, exit_state)) {
                result.state = exit_state;
                result.elapsed = s + dt_exit;
                result.reason = StopReason::Halted;
                return result;
            }
            result.state = exit_state;
            result.elapsed = s + dt_exit;
            result.reason = StopReason::Exit;
            result.event_time = s + dt_exit;
            return result;
        }

        const bool snapped =
            opt.check_snap && !backward && (x_new - xstar).norm() <= cfg.snap_radius;
        if (snapped) x_new = xstar;

        if (observer && !observer(s, x, s_new, x_new)) {
            result.state = x_new;
            result.elapsed = s_new;
            result.reason = StopReason::Halted;
            return result;
        }
        if (snapped) {
            result.state = xstar;
            result.elapsed = duration;
            result.reason = StopReason::Snap;
            result.event_time = s_new;
            return result;
        }
        x = std::move(x_new);
        s = s_new;
    }

    result.state = x;
    result.elapsed = duration;
    return result;
}

/// Raw advance used by the event refiners: ignores the domain, keeps the snap
/// rule (so finite-time orbits terminate at x* instead of stalling).
Vec advance_exact(const SystemSpec& sys, const IntegratorConfig& cfg, bool backward, const Vec& x,
                  double dt) {
    PropagateOptions opt;
    opt.check_domain = false;
    opt.check_snap = true;
    return propagate(sys, cfg, backward, x, dt, opt).state;
}

Vec closed_eval(const SystemSpec& sys, const Vec& x, double t) { return sys.closed_flow(x, t); }

FlowResult flow_closed(const SystemSpec& sys, const Vec& x, double t, const IntegratorConfig& cfg) {
    const Vec& xstar = sys.equilibrium;
    const bool backward = t < 0.0;
    const double sgn = backward ? -1.0 : 1.0;
    const double requested = std::abs(t);
    const bool capped = requested > cfg.t_max;
    const double horizon = capped ? cfg.t_max : requested;

    FlowResult res;
    const Vec end_state = closed_eval(sys, x, sgn * horizon);

    // Domain exit (the boundary gap is monotone along the built-ins' orbits).
    if (sys.domain.boundary_gap(end_state, xstar) <= 0.0) {
        auto gap = [&](double s) { return sys.domain.boundary_gap(closed_eval(sys, x, sgn * s), xstar); };
        const double t_exit = bisect_sign_change(gap, 0.0, horizon, 1.0, event_width_tol(cfg, horizon));
        res.state = closed_eval(sys, x, sgn * t_exit);
        res.time_reached = sgn * t_exit;
        res.status = FlowStatus::LeftDomain;
        res.event_time = t_exit;
        return res;
    }

    if (!backward && (end_state - xstar).norm() <= cfg.snap_radius) {
        auto gap = [&](double s) { return (closed_eval(sys, x, s) - xstar).norm() - cfg.snap_radius; };
        const double arrival = bisect_sign_change(gap, 0.0, horizon, 1.0, event_width_tol(cfg, horizon));
        res.state = xstar;
        res.time_reached = t;
        res.status = FlowStatus::ReachedEquilibrium;
        res.event_time = arrival;
        return res;
    }

    res.state = end_state;
    res.time_reached = sgn * horizon;
    res.status = capped ? FlowStatus::Capped : FlowStatus::Interior;
    return res;
}

std::optional<EventResult> closed_zero_crossing(const SystemSpec& sys, const Vec& x, bool backward,
                                                const std::function<double(const Vec&)>& scalar,
                                                const IntegratorConfig& cfg, double f0) {
    const double sgn = backward ? -1.0 : 1.0;
    const Vec& xstar = sys.equilibrium;
    auto value = [&](double s) { return scalar(closed_eval(sys, x, sgn * s)); };
    auto gap = [&](double s) { return sys.domain.boundary_gap(closed_eval(sys, x, sgn * s), xstar); };

    double t_lo = 0.0;
    double probe = 0.125;
    while (t_lo < cfg.t_max) {
        const double t_hi = std::min(probe, cfg.t_max);
        if (gap(t_hi) <= 0.0) {
            // The orbit exits before the probe; look for the crossing up to the exit.
            const double t_exit =
                bisect_sign_change(gap, t_lo, t_hi, 1.0, event_width_tol(cfg, t_hi));
            const double f_exit = value(t_exit);
            if (f_exit == 0.0 || (f_exit > 0.0) != (f0 > 0.0)) {
                const double t_star = bisect_sign_change(value, t_lo, t_exit, f0,
                                                         event_width_tol(cfg, t_exit));
                return EventResult{t_star, closed_eval(sys, x, sgn * t_star)};
            }
            throw std::runtime_error("orbit left the domain before the event crossing");
        }
        const double f_hi = value(t_hi);
        if (f_hi == 0.0 || (f_hi > 0.0) != (f0 > 0.0)) {
            const double t_star =
                bisect_sign_change(value, t_lo, t_hi, f0, event_width_tol(cfg, t_hi));
            return EventResult{t_star, closed_eval(sys, x, sgn * t_star)};
        }
        t_lo = t_hi;
        if (t_hi >= cfg.t_max) break;
        probe *= 2.0;
    }
    return std::nullopt;
}

}  // namespace

IntegratorConfig IntegratorConfig::closed_form_defaults() { return IntegratorConfig{}; }

IntegratorConfig IntegratorConfig::numeric_defaults() {
    IntegratorConfig cfg;
    cfg.snap_radius = 1e-6;
    cfg.event_tol = 1e-7;
    cfg.use_closed_form = false;
    return cfg;
}

IntegratorConfig IntegratorConfig::defaults_for(const SystemSpec& sys) {
    return sys.has_closed_flow() ? closed_form_defaults() : numeric_defaults();
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(snap_radius > 0.0) || !(t_max > 0.0) ||
        !(event_tol > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: all tolerances must be strictly positive");
    }
}

std::optional<Vec> closed_form_flow(const SystemSpec& sys, const Vec& x, double t) {
    if (x.size() != sys.dimension) throw std::invalid_argument("state dimension mismatch");
    if (!sys.has_closed_flow()) return std::nullopt;
    if (t < 0.0 && sys.is_equilibrium(x)) {
        throw std::domain_error("the semiflow is not reversible at the equilibrium");
    }
    return sys.closed_flow(x, t);
}

FlowResult flow(const SystemSpec& sys, const Vec& x, double t, const IntegratorConfig& cfg) {
    cfg.validate();
    if (x.size() != sys.dimension) throw std::invalid_argument("state dimension mismatch");
    if (!sys.in_domain(x)) throw std::domain_error("x outside the system domain");

    FlowResult res;
    if (t == 0.0) {
        res.state = x;
        return res;
    }
    const bool backward = t < 0.0;
    const double dist = (x - sys.equilibrium).norm();
    if (backward && dist <= cfg.snap_radius) {
        throw std::domain_error("backward integration started at the equilibrium");
    }

    if (cfg.use_closed_form && sys.has_closed_flow()) {
        if (!backward && dist <= cfg.snap_radius) {
            res.state = sys.equilibrium;
            res.time_reached = t;
            res.status = FlowStatus::ReachedEquilibrium;
            res.event_time = 0.0;
            return res;
        }
        return flow_closed(sys, x, t, cfg);
    }

    const double requested = std::abs(t);
    const bool capped = requested > cfg.t_max;
    const double horizon = capped ? cfg.t_max : requested;
    const double sgn = backward ? -1.0 : 1.0;

    const Propagation prop = propagate(sys, cfg, backward, x, horizon, PropagateOptions{});
    switch (prop.reason) {
        case StopReason::Snap:
            res.state = sys.equilibrium;
            res.time_reached = t;
            res.status = FlowStatus::ReachedEquilibrium;
            res.event_time = prop.event_time;
            return res;
        case StopReason::Exit:
            res.state = prop.state;
            res.time_reached = sgn * prop.event_time;
            res.status = FlowStatus::LeftDomain;
            res.event_time = prop.event_time;
            return res;
        case StopReason::Duration:
        case StopReason::Halted:
            res.state = prop.state;
            res.time_reached = sgn * horizon;
            res.status = capped ? FlowStatus::Capped : FlowStatus::Interior;
            return res;
    }
    throw std::logic_error("unreachable flow status");
}

std::vector<TimeState> trajectory(const SystemSpec& sys, const Vec& x,
                                  std::span<const double> t_grid, const IntegratorConfig& cfg) {
    std::vector<TimeState> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
            throw std::invalid_argument("trajectory grid must be strictly increasing");
        }
        const FlowResult res = flow(sys, x, t_grid[i], cfg);
        if (res.status == FlowStatus::LeftDomain || res.status == FlowStatus::Capped) {
            std::ostringstream msg;
            msg << "grid time " << t_grid[i] << " outside the feasible horizon ("
                << (res.status == FlowStatus::LeftDomain ? "domain exit" : "t_max cap") << " at "
                << res.time_reached << ")";
            throw std::runtime_error(msg.str());
        }
        out.push_back(TimeState{t_grid[i], res.state});
    }
    return out;
}

std::optional<EventResult> first_zero_crossing(const SystemSpec& sys, const Vec& x, bool backward,
                                               const std::function<double(const Vec&)>& scalar,
                                               const IntegratorConfig& cfg) {
    cfg.validate();
    if (!sys.in_domain(x)) throw std::domain_error("x outside the system domain");
    const double f0 = scalar(x);
    if (f0 == 0.0) return EventResult{0.0, x};

    if (cfg.use_closed_form && sys.has_closed_flow()) {
        return closed_zero_crossing(sys, x, backward, scalar, cfg, f0);
    }

    bool found = false;
    double bracket_lo = 0.0;
    double bracket_width = 0.0;
    Vec bracket_state = x;
    auto observer = [&](double t0, const Vec& x0, double t1, const Vec& x1) -> bool {
        const double f1 = scalar(x1);
        if (f1 == 0.0 || (f1 > 0.0) != (f0 > 0.0)) {
            found = true;
            bracket_lo = t0;
            bracket_width = t1 - t0;
            bracket_state = x0;
            return false;
        }
        return true;
    };

    const Propagation prop = propagate(sys, cfg, backward, x, cfg.t_max, PropagateOptions{}, observer);
    if (!found) {
        if (prop.reason == StopReason::Exit) {
            throw std::runtime_error("orbit left the domain before the event crossing");
        }
        return std::nullopt;
    }

    auto value = [&](double dt) {
        return scalar(advance_exact(sys, cfg, backward, bracket_state, dt));
    };
    const double dt_star = bisect_sign_change(value, 0.0, bracket_width, f0,
                                              event_width_tol(cfg, bracket_lo + bracket_width));
    return EventResult{bracket_lo + dt_star,
                       advance_exact(sys, cfg, backward, bracket_state, dt_star)};
}

}  // namespace semiconj
