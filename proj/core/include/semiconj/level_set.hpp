#pragma once

#include "semiconj/flow.hpp"

#include <cstdint>

namespace semiconj {

struct StarCheckConfig {
    int directions_low_dim = 256;    ///< n <= 3
    int directions_high_dim = 1024;  ///< n > 3, quasi-random
    std::uint64_t seed = 0;
};

/// The level set L_eps = {V = eps} and sublevel set U_eps = {V < eps},
/// described implicitly through the system's Lyapunov function. Construction
/// validates that every ray from x* crosses L_eps exactly once (star-shaped
/// sublevel sets), which is what makes the radial sphere projection a
/// homeomorphism.
struct LevelFrame {
    double epsilon = 0.0;
    bool star_shaped_ok = false;
};

/// Throws std::invalid_argument for eps <= 0 and std::runtime_error when the
/// single-crossing validation fails or the level set does not fit in the domain.
LevelFrame make_level_frame(const SystemSpec& sys, double epsilon, const IntegratorConfig& cfg,
                            const StarCheckConfig& star = {});

/// A level-set hitting time together with the hit point; |V(point) - eps| is
/// within cfg.event_tol.
struct CrossingResult {
    double time = 0.0;
    Vec point;
};

/// T+_eps(x): smallest t >= 0 with V(phi^t(x)) = eps. Requires V(x) >= eps;
/// returns time 0 and x itself when V(x) is already on the level.
CrossingResult crossing_time_forward(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                                     const IntegratorConfig& cfg);

/// T-_eps(x): smallest t >= 0 with V(phi^{-t}(x)) = eps. Requires 0 < V(x) <= eps.
CrossingResult crossing_time_backward(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                                      const IntegratorConfig& cfg);

/// Signed time coordinate of the linearizing map: the forward crossing time
/// T+_eps(x) outside the sublevel set (so tau' >= 0 there, tau' = 0 on L_eps),
/// and log(V(x)/eps) inside it. Undefined at x*.
double tau_prime(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
                 const IntegratorConfig& cfg);

/// The unique point where the orbit of x meets L_eps: the forward crossing
/// point outside U_eps, the backward one inside.
Vec rho_prime(const SystemSpec& sys, const LevelFrame& frame, const Vec& x,
              const IntegratorConfig& cfg);

/// Radial projection of a level-set point onto the unit sphere around x*.
/// Requires |V(p) - eps| <= cfg.event_tol and p != x*.
Vec sphere_projection(const SystemSpec& sys, const LevelFrame& frame, const Vec& p,
                      const IntegratorConfig& cfg);

/// Inverse of the radial projection: the unique point x* + s u with
/// V(x* + s u) = eps, s > 0, found by bracketing plus bisection.
Vec ray_level_point(const SystemSpec& sys, const LevelFrame& frame, const Vec& u,
                    const IntegratorConfig& cfg);

/// Same ray solve against an arbitrary level value (used by the bounded-domain
/// helpers for the outer level C).
Vec ray_point_at_level(const SystemSpec& sys, double level, const Vec& u,
                       const IntegratorConfig& cfg);

}  // namespace semiconj
