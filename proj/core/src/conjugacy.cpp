#include "semiconj/conjugacy.hpp"

#include "semiconj/sampling.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace semiconj {

namespace {

constexpr double kPi = 3.14159265358979323846;
/// Tolerance band for bounded-domain image membership: a backward orbit that falls
/// short of the requested time by no more than this (relative) band still
/// counts as inside the image.
constexpr double kImageBand = 1e-7;

/// Golden-section minimum of f on [a, b]; returns (argmin, min).
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                     int iters) {
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return (f1 <= f2) ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

std::vector<Vec> tangent_basis(const Vec& u) {
    const Eigen::Index n = u.size();
    std::vector<Vec> basis;
    basis.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index k = 0; k < n && basis.size() + 1 < static_cast<std::size_t>(n); ++k) {
        Vec v = Vec::Zero(n);
        v[k] = 1.0;
        v -= v.dot(u) * u;
        for (const Vec& b : basis) v -= v.dot(b) * b;
        const double norm = v.norm();
        if (norm > 1e-8) basis.push_back(v / norm);
    }
    return basis;
}

}  // namespace

ConjugacyMap::ConjugacyMap(SystemSpec sys, LevelFrame frame, double radius, IntegratorConfig cfg,
                           SamplerConfig sampler)
    : sys_(std::move(sys)), frame_(frame), radius_(radius), cfg_(cfg), sampler_(sampler) {}

ConjugacyMap ConjugacyMap::build(SystemSpec sys, double epsilon, double radius,
                                 std::optional<IntegratorConfig> cfg, SamplerConfig sampler) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be strictly positive");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be strictly positive");
    if (!sys.field || !sys.lyapunov) {
        throw std::invalid_argument("system must provide a field and a Lyapunov function");
    }
    if (sys.dimension < 1 || sys.equilibrium.size() != sys.dimension) {
        throw std::invalid_argument("system equilibrium does not match its dimension");
    }
    const IntegratorConfig config = cfg.value_or(IntegratorConfig::defaults_for(sys));
    config.validate();
    if (std::abs(sys.lyapunov(sys.equilibrium)) > 1e-12) {
        throw std::invalid_argument("Lyapunov function must vanish at the equilibrium");
    }

    StarCheckConfig star;
    star.seed = sampler.seed;
    const LevelFrame frame = make_level_frame(sys, epsilon, config, star);

    ConjugacyMap map(std::move(sys), frame, radius, config, sampler);

    // Sphere anchoring: h must carry sampled level-set points onto the sphere
    // of radius r within the event tolerance.
    const auto anchors = unit_directions(map.sys_.dimension, 8, sampler.seed);
    for (const Vec& u : anchors) {
        const Vec p = map.ray_level_point(u);
        const double miss = std::abs(map.h(p).norm() - radius);
        if (miss > config.event_tol * std::max(1.0, radius)) {
            std::ostringstream msg;
            msg << "level set does not anchor onto the sphere of radius r: |h(p)| misses by "
                << miss;
            throw std::runtime_error(msg.str());
        }
    }
    return map;
}

Vec ConjugacyMap::h(const Vec& x) const {
    if (x.size() != sys_.dimension) throw std::invalid_argument("state dimension mismatch");
    if (!sys_.in_domain(x)) throw std::domain_error("x outside the basin/domain of the map");
    if (sys_.is_equilibrium(x)) return Vec::Zero(sys_.dimension);

    const double v = sys_.lyapunov(x);
    double tau = 0.0;
    Vec base;
    if (v >= frame_.epsilon) {
        const CrossingResult cr = crossing_time_forward(sys_, frame_, x, cfg_);
        tau = cr.time;
        base = cr.point;
    } else {
        if (!(v > 0.0)) {
            throw std::runtime_error("V(x) must be positive away from the equilibrium");
        }
        tau = std::log(v / frame_.epsilon);
        base = crossing_time_backward(sys_, frame_, x, cfg_).point;
    }
    const Vec u = (base - sys_.equilibrium).normalized();
    return radius_ * std::exp(tau) * u;
}

Vec ConjugacyMap::h_inverse(const Vec& y) const {
    if (y.size() != sys_.dimension) throw std::invalid_argument("state dimension mismatch");
    const double ny = y.norm();
    if (ny == 0.0) return sys_.equilibrium;
    const Vec u = y / ny;
    const Vec p = semiconj::ray_level_point(sys_, frame_, u, cfg_);

    if (ny >= radius_) {
        const double t_back = std::log(ny / radius_);
        if (t_back == 0.0) return p;
        const FlowResult res = flow(sys_, p, -t_back, cfg_);
        if (res.status == FlowStatus::LeftDomain) {
            if (t_back - res.event_time <= kImageBand * std::max(1.0, t_back)) return res.state;
            throw std::domain_error(
                "y is outside the image of h: the backward orbit exits the domain");
        }
        if (res.status == FlowStatus::Capped) {
            throw std::runtime_error("horizon cap reached before the preimage");
        }
        return res.state;
    }

    const double target = frame_.epsilon * ny / radius_;
    const double start_gap = sys_.lyapunov(p) - target;
    if (start_gap <= 0.0) {
        // |y| is within the event tolerance of r; the ray point itself is the preimage.
        if (start_gap >= -10.0 * cfg_.event_tol * std::max(1.0, frame_.epsilon)) return p;
        throw std::runtime_error("interior preimage starts below the target level");
    }
    auto scalar = [this, target](const Vec& q) { return sys_.lyapunov(q) - target; };
    const auto hit = first_zero_crossing(sys_, p, false, scalar, cfg_);
    if (!hit) throw std::runtime_error("no forward crossing found for the interior preimage");
    return hit->state;
}

double ConjugacyMap::tau_prime(const Vec& x) const {
    return semiconj::tau_prime(sys_, frame_, x, cfg_);
}

Vec ConjugacyMap::rho_prime(const Vec& x) const {
    return semiconj::rho_prime(sys_, frame_, x, cfg_);
}

Vec ConjugacyMap::sphere_projection(const Vec& p) const {
    return semiconj::sphere_projection(sys_, frame_, p, cfg_);
}

Vec ConjugacyMap::ray_level_point(const Vec& u) const {
    return semiconj::ray_level_point(sys_, frame_, u, cfg_);
}

double ConjugacyMap::sampled_infimum(const std::function<double(const Vec&)>& f) const {
    const auto dirs = unit_directions(sys_.dimension, sampler_.directions, sampler_.seed);
    double best = std::numeric_limits<double>::infinity();
    Vec best_u = dirs.front();
    for (const Vec& u : dirs) {
        const double value = f(u);
        if (value < best) {
            best = value;
            best_u = u;
        }
    }
    if (sys_.dimension == 1 || sampler_.refine_rounds <= 0) return best;

    double delta = sys_.dimension == 2 ? 2.0 * kPi / sampler_.directions
                                       : 2.0 * std::sqrt(kPi / sampler_.directions);
    for (int round = 0; round < sampler_.refine_rounds; ++round) {
        for (const Vec& e : tangent_basis(best_u)) {
            auto along = [&](double alpha) {
                return f(Vec(std::cos(alpha) * best_u + std::sin(alpha) * e).normalized());
            };
            const auto [alpha, value] = golden_min(along, -delta, delta, 20);
            if (value < best) {
                best = value;
                best_u = Vec(std::cos(alpha) * best_u + std::sin(alpha) * e).normalized();
            }
        }
        delta *= 0.5;
    }
    return best;
}

double ConjugacyMap::gamma_r(double s) const {
    if (s < 0.0) throw std::invalid_argument("gamma_r is defined for s >= 0");
    if (s == 0.0) return 0.0;
    auto window = [this, s](const Vec& u) {
        const Vec y = (s + radius_) * u;
        return semiconj::tau_prime(sys_, frame_, h_inverse(y), cfg_);
    };
    return sampled_infimum(window);
}

double ConjugacyMap::tau_case2(double level_c, const Vec& x,
                               std::optional<double> offset_override) const {
    if (sys_.backward_complete) {
        throw std::invalid_argument(
            "tau_case2 applies to systems with bounded backward orbits (backward_complete = false)");
    }
    if (!(level_c > frame_.epsilon)) {
        throw std::invalid_argument("the outer level C must exceed epsilon");
    }
    if (sys_.is_equilibrium(x)) throw std::domain_error("tau_C is undefined at the equilibrium");
    const double v = eval_lyapunov(sys_, x);
    if (v < frame_.epsilon) {
        if (!(v > 0.0)) throw std::runtime_error("V(x) must be positive away from the equilibrium");
        return std::log(v / frame_.epsilon);
    }
    const double tau = crossing_time_forward(sys_, frame_, x, cfg_).time;
    if (v > level_c) {
        return tau + (v - offset_override.value_or(level_c));
    }
    return tau;
}

double ConjugacyMap::outer_radius(double level_c) const {
    if (sys_.backward_complete) {
        throw std::invalid_argument(
            "outer_radius applies to systems with bounded backward orbits (backward_complete = false)");
    }
    if (!(level_c > frame_.epsilon)) {
        throw std::invalid_argument("the outer level C must exceed epsilon");
    }
    auto scaled = [this, level_c](const Vec& u) {
        const Vec p = ray_point_at_level(sys_, level_c, u, cfg_);
        return radius_ * std::exp(tau_case2(level_c, p));
    };
    const double outer = sampled_infimum(scaled);
    if (!(outer > radius_)) {
        throw std::runtime_error("computed outer radius R did not exceed r");
    }
    return outer;
}

Vec reference_h_normalized(double r, const Vec& x) {
    if (!(r > 0.0)) throw std::invalid_argument("r must be strictly positive");
    const double norm = x.norm();
    if (norm == 0.0) return Vec::Zero(x.size());
    const double tau = norm >= 1.0 ? norm - 1.0 : std::log(norm * norm);
    return (r * std::exp(tau) / norm) * x;
}

double reference_alpha_normalized(double r, const Vec& y) {
    if (!(r > 0.0)) throw std::invalid_argument("r must be strictly positive");
    const double ny = y.norm();
    if (ny == 0.0) throw std::invalid_argument("alpha is defined away from the origin");
    return ny >= r ? std::log(ny / r) + 1.0 : std::sqrt(ny / r);
}

Vec reference_h_inverse_normalized(double r, const Vec& y) {
    const double ny = y.norm();
    if (ny == 0.0) return Vec::Zero(y.size());
    return (reference_alpha_normalized(r, y) / ny) * y;
}

double scalar_power_map(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("a and b must be strictly positive");
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), b / a), x);
}

}  // namespace semiconj
