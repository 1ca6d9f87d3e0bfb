#include "semiconj/system.hpp"

#include "semiconj/flow.hpp"
#include "semiconj/sampling.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace semiconj {

namespace {

double get_param(const Params& params, const std::string& key, double fallback,
                 bool require_positive) {
    auto it = params.find(key);
    const double value = (it == params.end()) ? fallback : it->second;
    if (require_positive && !(value > 0.0)) {
        throw std::invalid_argument("parameter '" + key + "' must be strictly positive");
    }
    return value;
}

void require_dimension(const std::string& name, int got, int want) {
    if (got != want) {
        std::ostringstream msg;
        msg << "system '" << name << "' requires dimension " << want << ", got " << got;
        throw std::invalid_argument(msg.str());
    }
}

SystemSpec make_normalized(int n, bool bounded, double rho_dom) {
    SystemSpec sys;
    sys.name = bounded ? "normalized-bounded" : "normalized";
    sys.dimension = n;
    sys.equilibrium = Vec::Zero(n);
    sys.backward_complete = !bounded;
    if (bounded) {
        sys.domain = Domain{DomainKind::OpenBall, rho_dom};
    }
    sys.field = [n](const Vec& x) -> Vec {
        const double norm = x.norm();
        if (norm == 0.0) return Vec::Zero(n);
        return -x / norm;
    };
    sys.lyapunov = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    sys.lyapunov_gradient = [](const Vec& x) -> Vec { return x; };
    // phi^t(x) = (1 - t/|x|) x for t <= |x|, else 0; extends backwards for x != 0.
    sys.closed_flow = [n](const Vec& x, double t) -> Vec {
        const double norm = x.norm();
        if (norm == 0.0) return Vec::Zero(n);
        if (t >= norm) return Vec::Zero(n);
        return (1.0 - t / norm) * x;
    };
    return sys;
}

SystemSpec make_linear_scaled(int n, double a) {
    SystemSpec sys;
    sys.name = "linear-scaled";
    sys.dimension = n;
    sys.equilibrium = Vec::Zero(n);
    sys.field = [a](const Vec& x) -> Vec { return -a * x; };
    sys.lyapunov = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    sys.lyapunov_gradient = [](const Vec& x) -> Vec { return x; };
    sys.closed_flow = [a](const Vec& x, double t) -> Vec { return std::exp(-a * t) * x; };
    return sys;
}

SystemSpec make_sqrt_scalar() {
    SystemSpec sys;
    sys.name = "sqrt-scalar";
    sys.dimension = 1;
    sys.equilibrium = Vec::Zero(1);
    // Odd extension of sdot = -sqrt(s), s >= 0, so the domain is all of R.
    sys.field = [](const Vec& x) -> Vec {
        Vec v(1);
        const double s = x[0];
        v[0] = (s == 0.0) ? 0.0 : -std::copysign(std::sqrt(std::abs(s)), s);
        return v;
    };
    sys.lyapunov = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
    sys.lyapunov_gradient = [](const Vec& x) -> Vec { return x; };
    // Exact solution (sqrt(s) - t/2)^2 up to the arrival time 2 sqrt(s).
    sys.closed_flow = [](const Vec& x, double t) -> Vec {
        Vec v(1);
        const double s = x[0];
        if (s == 0.0) {
            v[0] = 0.0;
            return v;
        }
        const double root = std::sqrt(std::abs(s));
        if (t >= 2.0 * root) {
            v[0] = 0.0;
            return v;
        }
        const double r = root - 0.5 * t;
        v[0] = std::copysign(r * r, s);
        return v;
    };
    return sys;
}

SystemSpec make_x0_plane() {
    SystemSpec sys;
    sys.name = "x0-plane";
    sys.dimension = 2;
    sys.equilibrium = Vec::Zero(2);
    sys.field = [](const Vec& x) -> Vec {
        Vec v(2);
        if (x.norm() == 0.0) {
            v.setZero();
            return v;
        }
        v[0] = -x[0];
        v[1] = -x[1] / (std::abs(x[1]) + x[0] * x[0]);
        return v;
    };
    sys.lyapunov = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
    sys.lyapunov_gradient = [](const Vec& x) -> Vec { return 2.0 * x; };
    return sys;
}

}  // namespace

double Domain::boundary_gap(const Vec& x, const Vec& center) const {
    if (kind == DomainKind::FullSpace) return std::numeric_limits<double>::infinity();
    return radius - (x - center).norm();
}

std::vector<std::string> builtin_names() {
    return {"normalized", "normalized-bounded", "linear-scaled", "sqrt-scalar", "x0-plane"};
}

SystemSpec make_builtin(const std::string& name, int dimension, const Params& params) {
    if (dimension < 1) throw std::invalid_argument("dimension must be a positive integer");
    if (name == "normalized") {
        return make_normalized(dimension, false, 0.0);
    }
    if (name == "normalized-bounded") {
        const double rho_dom = get_param(params, "rho_dom", 2.0, true);
        return make_normalized(dimension, true, rho_dom);
    }
    if (name == "linear-scaled") {
        const double a = get_param(params, "a", 1.0, true);
        return make_linear_scaled(dimension, a);
    }
    if (name == "sqrt-scalar") {
        require_dimension(name, dimension, 1);
        return make_sqrt_scalar();
    }
    if (name == "x0-plane") {
        require_dimension(name, dimension, 2);
        return make_x0_plane();
    }
    std::string known;
    for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown system '" + name + "' (known: " + known + ")");
}

Vec eval_field(const SystemSpec& sys, const Vec& x) {
    if (x.size() != sys.dimension) throw std::invalid_argument("state dimension mismatch");
    if (!sys.in_domain(x)) throw std::domain_error("x outside the system domain");
    if (sys.is_equilibrium(x)) return Vec::Zero(sys.dimension);
    return sys.field(x);
}

double eval_lyapunov(const SystemSpec& sys, const Vec& x) {
    if (x.size() != sys.dimension) throw std::invalid_argument("state dimension mismatch");
    if (!sys.in_domain(x)) throw std::domain_error("x outside the system domain");
    if (sys.is_equilibrium(x)) return 0.0;
    return sys.lyapunov(x);
}

ValidationReport validate_system(const SystemSpec& sys) {
    ValidationReport report;
    auto fail = [&report](const std::string& msg) {
        report.ok = false;
        report.errors.push_back(msg);
    };

    if (sys.dimension < 1 || sys.equilibrium.size() != sys.dimension) {
        fail("equilibrium dimension does not match the system dimension");
        return report;
    }

    const Vec& xs = sys.equilibrium;
    if (std::abs(sys.lyapunov(xs)) > 1e-12) fail("V(x*) != 0");
    if (sys.field(xs).norm() > 1e-12) fail("field(x*) != 0");

    const double max_radius =
        sys.domain.kind == DomainKind::OpenBall ? 0.9 * sys.domain.radius : 10.0;
    const auto dirs = unit_directions(sys.dimension, 16);

    // V > 0 away from x*, sampled over directions and log-spaced radii.
    for (const auto& u : dirs) {
        for (double scale = 1e-3; scale <= max_radius; scale *= 4.0) {
            const Vec x = xs + scale * u;
            if (!(sys.lyapunov(x) > 0.0)) {
                fail("V not strictly positive at |x - x*| = " + std::to_string(scale));
                break;
            }
        }
    }

    // V strictly decreasing along short sampled trajectories.
    {
        IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);
        for (std::size_t i = 0; i < dirs.size(); i += 4) {
            const Vec x = xs + std::min(1.0, max_radius / 2.0) * dirs[i];
            const double v0 = sys.lyapunov(x);
            try {
                const FlowResult res = flow(sys, x, 0.1, cfg);
                const double v1 = res.status == FlowStatus::ReachedEquilibrium
                                      ? 0.0
                                      : sys.lyapunov(res.state);
                if (!(v1 < v0 + cfg.abs_tol)) {
                    fail("V not decreasing along the trajectory from a sampled start");
                }
            } catch (const std::exception& e) {
                fail(std::string("trajectory sampling failed: ") + e.what());
            }
        }
    }

    // Finite-difference Lipschitz probes: 64 deterministic pairs per decade of
    // scale; a quotient that keeps growing as the pair shrinks flags a
    // non-Lipschitz region (warning only).
    const auto probe_dirs = unit_directions(sys.dimension, 8, 1);
    int decade_index = 0;
    for (double decade = 1e-2; decade <= max_radius; decade *= 10.0, ++decade_index) {
        for (int i = 0; i < 8; ++i) {
            const Vec& u = dirs[static_cast<std::size_t>(i)];
            for (int j = 0; j < 8; ++j) {
                const double radius = decade * (1.0 + 9.0 * j / 8.0);
                if (radius > max_radius) continue;
                const Vec base = xs + radius * u;
                const Vec offset_dir = probe_dirs[static_cast<std::size_t>((i + j) % 8)];
                const double d_large = 1e-3 * radius;
                const double d_small = d_large / 16.0;
                const Vec fb = sys.field(base);
                const double q_large = (sys.field(base + d_large * offset_dir) - fb).norm() / d_large;
                const double q_small = (sys.field(base + d_small * offset_dir) - fb).norm() / d_small;
                if (q_small > 50.0 * std::max(q_large, 1.0)) {
                    report.warnings.push_back(
                        "Lipschitz probe: difference quotient grows from " +
                        std::to_string(q_large) + " to " + std::to_string(q_small) +
                        " near |x - x*| = " + std::to_string(radius));
                }
            }
        }
    }

    return report;
}

}  // namespace semiconj
