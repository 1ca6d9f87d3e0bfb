#include "semiconj/level_set.hpp"

#include "semiconj/sampling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace semiconj {

namespace {

double ray_width_tol(const IntegratorConfig& cfg, double scale) {
    return std::max(cfg.event_tol * 1e-2,
                    8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale));
}

/// Solves V(x* + s u) = level for s > 0 along one unit direction. Returns the
/// ray parameter; throws when no bracket exists inside the domain.
double solve_ray(const SystemSpec& sys, double level, const Vec& u, const IntegratorConfig& cfg) {
    const Vec& xstar = sys.equilibrium;
    auto value = [&](double s) { return sys.lyapunov(xstar + s * u) - level; };

    const bool bounded = sys.domain.kind == DomainKind::OpenBall;
    const double s_cap = bounded ? sys.domain.radius * (1.0 - 1e-12) : 1e8;

    double s_hi = std::min(1.0, s_cap);
    double f_hi = value(s_hi);
    while (f_hi < 0.0) {
        if (s_hi >= s_cap) {
            throw std::runtime_error(bounded
                                         ? "level set does not fit inside the domain along a ray"
                                         : "no ray bracket found for the level set");
        }
        s_hi = std::min(2.0 * s_hi, s_cap);
        f_hi = value(s_hi);
    }
    if (f_hi == 0.0) return s_hi;

    double s_lo = s_hi;
    double f_lo = f_hi;
    while (f_lo > 0.0) {
        s_lo *= 0.5;
        if (s_lo < 1e-300) throw std::runtime_error("ray bracketing collapsed at the equilibrium");
        f_lo = value(s_lo);
    }
    if (f_lo == 0.0) return s_lo;

    double lo = s_lo, hi = s_hi;
    const double width = ray_width_tol(cfg, hi);
    for (int iter = 0; iter < 200 && (hi - lo) > width; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = value(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void check_dimension(const SystemSpec& sys, const Vec& x) {
    if (x.size() != sys.dimension) throw std::invalid_argument("state dimension mismatch");
}

}  // namespace

LevelFrame make_level_frame(const SystemSpec& sys, double epsilon, const IntegratorConfig& cfg,
                            const StarCheckConfig& star) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be strictly positive");
    cfg.validate();

    const int count =
        sys.dimension <= 3 ? star.directions_low_dim : star.directions_high_dim;
    const auto dirs = unit_directions(sys.dimension, count, star.seed);
    const Vec& xstar = sys.equilibrium;

    // Single-crossing validation: along each ray the level value must be hit
    // once, with V < eps strictly inside and V > eps strictly outside.
    for (const auto& u : dirs) {
        const double s_hit = solve_ray(sys, epsilon, u, cfg);
        const double margin = 32.0 * cfg.event_tol * std::max(1.0, s_hit);
        const double s_outer_cap = sys.domain.kind == DomainKind::OpenBall
                                       ? sys.domain.radius * (1.0 - 1e-9)
                                       : 4.0 * s_hit;
        for (int k = 1; k <= 32; ++k) {
            const double s_in = s_hit * (1.0 - static_cast<double>(k) / 33.0);
            if (s_in > margin && sys.lyapunov(xstar + s_in * u) >= epsilon) {
                throw std::runtime_error("level set is not star-shaped: V >= eps inside the ray");
            }
            const double s_out =
                s_hit + (s_outer_cap - s_hit) * static_cast<double>(k) / 33.0;
            if (s_out > s_hit + margin && sys.lyapunov(xstar + s_out * u) <= epsilon) {
                throw std::runtime_error("level set is not star-shaped: V <= eps outside the ray");
            }
        }
    }

    LevelFrame frame;
    frame.epsilon = epsilon;
    frame.star_shaped_ok = true;
    return frame;
}

CrossingResult crossing_time_forward(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                                     const IntegratorConfig& cfg) {
    check_dimension(sys, x);
    const double v = eval_lyapunov(sys, x);
    if (v < frame.epsilon - cfg.event_tol) {
        throw std::domain_error("crossing_time_forward requires V(x) >= eps");
    }
    if (std::abs(v - frame.epsilon) <= cfg.event_tol) {
        return CrossingResult{0.0, x};
    }
    auto scalar = [&sys, &frame](const Vec& p) { return sys.lyapunov(p) - frame.epsilon; };
    const auto hit = first_zero_crossing(sys, x, false, scalar, cfg);
    if (!hit) {
        throw std::runtime_error("horizon cap reached before the forward level crossing");
    }
    return CrossingResult{hit->time, hit->state};
}

CrossingResult crossing_time_backward(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                                      const IntegratorConfig& cfg) {
    check_dimension(sys, x);
    if (sys.is_equilibrium(x)) {
        throw std::domain_error("the backward orbit is undefined at the equilibrium");
    }
    const double v = eval_lyapunov(sys, x);
    if (v > frame.epsilon + cfg.event_tol) {
        throw std::domain_error("crossing_time_backward requires V(x) <= eps");
    }
    if (std::abs(v - frame.epsilon) <= cfg.event_tol) {
        return CrossingResult{0.0, x};
    }
    auto scalar = [&sys, &frame](const Vec& p) { return sys.lyapunov(p) - frame.epsilon; };
    const auto hit = first_zero_crossing(sys, x, true, scalar, cfg);
    if (!hit) {
        throw std::runtime_error("horizon cap reached before the backward level crossing");
    }
    return CrossingResult{hit->time, hit->state};
}

double tau_prime(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                 const IntegratorConfig& cfg) {
    check_dimension(sys, x);
    if (sys.is_equilibrium(x)) throw std::domain_error("tau' is undefined at the equilibrium");
    const double v = eval_lyapunov(sys, x);
    if (v >= frame.epsilon) {
        return crossing_time_forward(sys, frame, x, cfg).time;
    }
    if (!(v > 0.0)) throw std::runtime_error("V(x) must be positive away from the equilibrium");
    return std::log(v / frame.epsilon);
}

Vec rho_prime(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
              const IntegratorConfig& cfg) {
    check_dimension(sys, x);
    if (sys.is_equilibrium(x)) throw std::domain_error("rho' is undefined at the equilibrium");
    const double v = eval_lyapunov(sys, x);
    if (v >= frame.epsilon) {
        return crossing_time_forward(sys, frame, x, cfg).point;
    }
    return crossing_time_backward(sys, frame, x, cfg).point;
}

Vec sphere_projection(const SystemSpec& sys, const LevelFrame& frame, const Vec& p,
                      const IntegratorConfig& cfg) {
    check_dimension(sys, p);
    if (sys.is_equilibrium(p)) {
        throw std::domain_error("sphere projection is undefined at the equilibrium");
    }
    const double v = eval_lyapunov(sys, p);
    if (std::abs(v - frame.epsilon) > cfg.event_tol) {
        std::ostringstream msg;
        msg << "point is not on the level set: |V(p) - eps| = " << std::abs(v - frame.epsilon);
        throw std::domain_error(msg.str());
    }
    return (p - sys.equilibrium).normalized();
}

Vec ray_level_point(const SystemSpec& sys, const LevelFrame& frame, const Vec& u,
                    const IntegratorConfig& cfg) {
    return ray_point_at_level(sys, frame.epsilon, u, cfg);
}

Vec ray_point_at_level(const SystemSpec& sys, double level, const Vec& u,
                       const IntegratorConfig& cfg) {
    check_dimension(sys, u);
    if (!(level > 0.0)) throw std::invalid_argument("level must be strictly positive");
    const double norm = u.norm();
    if (norm == 0.0) throw std::invalid_argument("direction must be nonzero");
    const Vec unit = u / norm;
    const double s = solve_ray(sys, level, unit, cfg);
    return sys.equilibrium + s * unit;
}

}  // namespace semiconj
