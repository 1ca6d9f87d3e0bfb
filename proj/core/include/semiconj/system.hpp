#pragma once

#include "semiconj/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace semiconj {

enum class DomainKind { FullSpace, OpenBall };

/// State-space domain: all of R^n, or an open ball centered at the equilibrium.
struct Domain {
    DomainKind kind = DomainKind::FullSpace;
    double radius = 0.0;  ///< OpenBall only

    [[nodiscard]] bool contains(const Vec& x, const Vec& center) const {
        return kind == DomainKind::FullSpace || (x - center).norm() < radius;
    }
    /// Signed distance to the boundary (positive inside); +inf for FullSpace.
    [[nodiscard]] double boundary_gap(const Vec& x, const Vec& center) const;
};

/// A vector field together with its equilibrium, domain and Lyapunov function.
///
/// Fields are single-valued and locally Lipschitz away from the equilibrium;
/// field(x*) = 0 is the stability-forced selection at the discontinuity, so no
/// set-valued machinery is needed for the built-in systems.
struct SystemSpec {
    std::string name;
    int dimension = 0;
    Vec equilibrium;
    Domain domain;
    /// Whether every backward orbit away from the equilibrium stays in the
    /// domain for all negative times. The bounded built-in is the one system
    /// where this fails.
    bool backward_complete = true;

    std::function<Vec(const Vec&)> field;
    std::function<double(const Vec&)> lyapunov;
    std::function<Vec(const Vec&)> lyapunov_gradient;    ///< optional
    std::function<Vec(const Vec&, double)> closed_flow;  ///< optional exact semiflow

    [[nodiscard]] bool has_closed_flow() const { return static_cast<bool>(closed_flow); }
    [[nodiscard]] bool in_domain(const Vec& x) const { return domain.contains(x, equilibrium); }
    [[nodiscard]] bool is_equilibrium(const Vec& x) const { return (x - equilibrium).norm() == 0.0; }
};

using Params = std::map<std::string, double>;

/// Names accepted by make_builtin.
std::vector<std::string> builtin_names();

/// Constructs one of the built-in systems:
///   normalized         unit-speed radial field -x/|x|, finite-time stable
///   normalized-bounded same field on the open ball of radius rho_dom (default 2)
///   linear-scaled      xdot = -a x (param a > 0)
///   sqrt-scalar        n = 1, sdot = -sign(s) sqrt|s|
///   x0-plane           n = 2, (-x1, -x2/(|x2| + x1^2)), no closed flow
/// Throws std::invalid_argument on unknown names, dimension mismatches and
/// nonpositive parameters.
SystemSpec make_builtin(const std::string& name, int dimension, const Params& params = {});

/// Field value at x; 0 at the equilibrium by convention.
/// Throws std::domain_error when x is outside the domain.
Vec eval_field(const SystemSpec& sys, const Vec& x);

/// V(x); exactly 0 at the equilibrium.
double eval_lyapunov(const SystemSpec& sys, const Vec& x);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> errors;    ///< broken invariants (V positivity, V decrease)
    std::vector<std::string> warnings;  ///< Lipschitz-probe findings
};

/// Samples the regularity assumptions: V(x*) = 0 and V > 0 away from x*,
/// V strictly decreasing along short sampled trajectories, and
/// finite-difference Lipschitz probes (64 deterministic pairs per decade of
/// scale). Lipschitz findings are warnings, the V checks are errors.
ValidationReport validate_system(const SystemSpec& sys);

}  // namespace semiconj
