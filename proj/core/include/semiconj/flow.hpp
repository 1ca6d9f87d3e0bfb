#pragma once

#include "semiconj/system.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace semiconj {

/// Tolerances for semiflow evaluation.
struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Distance to the equilibrium below which the state snaps to x* and the
    /// arrival time is recorded. Finite-time arrival cannot be detected
    /// exactly by stepping, so this snap rule is the contract.
    double snap_radius = 1e-9;
    double t_max = 1e4;  ///< hard cap on the integration horizon
    double event_tol = 1e-10;  ///< bisection tolerance for event times
    /// Evaluate the closed-form semiflow when the system carries one. Set to
    /// false to force the numeric path (used to cross-check the two routes).
    bool use_closed_form = true;

    static IntegratorConfig closed_form_defaults();
    /// snap_radius 1e-6, event_tol 1e-7, closed forms disabled.
    static IntegratorConfig numeric_defaults();
    static IntegratorConfig defaults_for(const SystemSpec& sys);

    /// Throws std::invalid_argument if any tolerance is not strictly positive.
    void validate() const;
};

enum class FlowStatus {
    Interior,            ///< integrated the full requested time, no event
    ReachedEquilibrium,  ///< entered the snap ball; state is exactly x*
    LeftDomain,          ///< orbit crossed the domain boundary
    Capped,              ///< |t| exceeded t_max; integrated to the cap
};

struct FlowResult {
    Vec state;
    double time_reached = 0.0;  ///< signed time actually covered, |time_reached| <= |t|
    FlowStatus status = FlowStatus::Interior;
    /// Arrival time for ReachedEquilibrium, exit time for LeftDomain
    /// (unsigned durations along the direction of integration).
    double event_time = 0.0;
};

/// Exact semiflow value when the system carries a closed form, std::nullopt
/// otherwise. Backward time from the equilibrium throws std::domain_error
/// (the semiflow is not reversible there). The caller is responsible for the
/// backward orbit staying inside the domain; flow() polices that.
std::optional<Vec> closed_form_flow(const SystemSpec& sys, const Vec& x, double t);

/// Semiflow phi^t(x). Uses the closed form when available and enabled,
/// otherwise an embedded RK4(5) pair with step rejection; near x* steps are
/// additionally bounded by half the distance to x* so the non-Lipschitz
/// built-ins cannot overshoot the equilibrium. t < 0 integrates the reversed
/// field and reports LeftDomain if the orbit exits the domain.
/// flow(x, 0) returns x exactly.
FlowResult flow(const SystemSpec& sys, const Vec& x, double t, const IntegratorConfig& cfg);

struct TimeState {
    double time = 0.0;
    Vec state;
};

/// States at each grid time (grid strictly increasing, negative times allowed
/// for backward-complete systems). After finite-time arrival all states equal
/// x* exactly.
std::vector<TimeState> trajectory(const SystemSpec& sys, const Vec& x,
                                  std::span<const double> t_grid, const IntegratorConfig& cfg);

struct EventResult {
    double time = 0.0;  ///< unsigned duration along the direction of integration
    Vec state;
};

/// Smallest t >= 0 such that scalar(phi^{+-t}(x)) crosses zero, located by
/// stepping plus bisection (to well below cfg.event_tol). Returns the crossing
/// time and state, std::nullopt if no crossing occurs before t_max, and
/// throws std::runtime_error if the orbit leaves the domain first.
std::optional<EventResult> first_zero_crossing(const SystemSpec& sys, const Vec& x, bool backward,
                                               const std::function<double(const Vec&)>& scalar,
                                               const IntegratorConfig& cfg);

}  // namespace semiconj
