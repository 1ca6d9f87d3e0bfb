#pragma once

#include "semiconj/level_set.hpp"

#include <cstdint>
#include <optional>

namespace semiconj {

/// Direction sampling used for the gamma_r and outer-radius infima.
struct SamplerConfig {
    int directions = 128;  ///< deterministic directions (n <= 3), quasi-random beyond
    int refine_rounds = 2;  ///< golden-section passes around the incumbent minimum
    std::uint64_t seed = 0;
};

/// The linearizing homeomorphism h_r for one (system, eps, r) triple:
///
///   h_r(x) = r * exp(tau'(x)) * P(rho'(x)),   h_r(x*) = 0,
///
/// with P the radial sphere projection. h_r maps L_eps onto the sphere of
/// radius r and conjugates the semiflow to y -> exp(-t) y outside that sphere
/// for t up to gamma_r(|y| - r). Immutable after build(); all evaluations are
/// pure, so concurrent use is safe.
class ConjugacyMap {
  public:
    /// Validates the inputs (eps > 0, r > 0, star-shaped level set, level set
    /// inside the domain, sphere anchoring of h on sampled level points).
    /// The integrator config defaults to IntegratorConfig::defaults_for(sys).
    static ConjugacyMap build(SystemSpec sys, double epsilon, double radius,
                              std::optional<IntegratorConfig> cfg = {},
                              SamplerConfig sampler = {});

    [[nodiscard]] const SystemSpec& system() const { return sys_; }
    [[nodiscard]] const LevelFrame& frame() const { return frame_; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] const IntegratorConfig& integrator() const { return cfg_; }
    [[nodiscard]] const SamplerConfig& sampler() const { return sampler_; }

    /// h_r(x). Throws std::domain_error outside the domain; within the snap
    /// ball of a numeric-only system the backward crossing is undefined.
    [[nodiscard]] Vec h(const Vec& x) const;

    /// h_r^{-1}(y): u = y/|y|, p the ray level point; backward flow for
    /// log(|y|/r) when |y| >= r, else the forward point with
    /// V = eps |y|/r. h_r^{-1}(0) = x*. Throws std::domain_error when y is
    /// outside the image (bounded domains: the backward orbit exits).
    [[nodiscard]] Vec h_inverse(const Vec& y) const;

    [[nodiscard]] double tau_prime(const Vec& x) const;
    [[nodiscard]] Vec rho_prime(const Vec& x) const;
    [[nodiscard]] Vec sphere_projection(const Vec& p) const;
    [[nodiscard]] Vec ray_level_point(const Vec& u) const;

    /// Class-K_inf window bound: inf over {|y| = s + r} of T+_eps(h_r^{-1}(y)),
    /// approximated by deterministic direction sampling plus golden-section
    /// refinement around the incumbent minimum. gamma_r(0) = 0.
    [[nodiscard]] double gamma_r(double s) const;

    /// Bounded-domain time coordinate for the outer level C > eps:
    /// tau(x) + (V(x) - C) outside V <= C, tau(x) on eps <= V <= C, and
    /// log(V(x)/eps) inside. The offset level defaults to C itself; pass
    /// offset_override to use a different reading. Requires a system with
    /// backward_complete = false.
    [[nodiscard]] double tau_case2(double level_c, const Vec& x,
                                   std::optional<double> offset_override = {}) const;

    /// Bounded-domain outer radius R = inf over L_C of r * exp(tau_C), computed by
    /// direction sampling; always > r for C > eps.
    [[nodiscard]] double outer_radius(double level_c) const;

  private:
    ConjugacyMap(SystemSpec sys, LevelFrame frame, double radius, IntegratorConfig cfg,
                 SamplerConfig sampler);

    [[nodiscard]] double sampled_infimum(const std::function<double(const Vec&)>& f) const;

    SystemSpec sys_;
    LevelFrame frame_;
    double radius_ = 0.0;
    IntegratorConfig cfg_;
    SamplerConfig sampler_;
};

/// Closed-form reference map for the normalized field with the unit-sphere
/// level frame (eps = 1/2): h_r(x) = r e^{tau'} x/|x| with tau' = |x| - 1
/// outside the unit ball and log(|x|^2) inside. Used as an independent oracle
/// against the generic machinery.
Vec reference_h_normalized(double r, const Vec& x);

/// Radial factor of the reference inverse: log(|y|/r) + 1 for |y| >= r,
/// (|y|/r)^{1/2} otherwise. Requires y != 0 and r > 0.
double reference_alpha_normalized(double r, const Vec& y);

/// reference_alpha_normalized(r, y) * y/|y|; 0 -> 0.
Vec reference_h_inverse_normalized(double r, const Vec& y);

/// Scalar conjugacy between xdot = -a x and ydot = -b y:
/// x -> sign(x) |x|^{b/a}, 0 at 0. Satisfies h(e^{-a t} x) = e^{-b t} h(x).
double scalar_power_map(double a, double b, double x);

}  // namespace semiconj
