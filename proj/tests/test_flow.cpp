#include <catch2/catch_amalgamated.hpp>

#include "semiconj/flow.hpp"
#include "semiconj/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace semiconj;
using Catch::Approx;

namespace {

Vec closed_oracle_normalized(const Vec& x, double t) {
    // Independent transcription of the radial solution used as the oracle.
    const double norm = x.norm();
    if (norm == 0.0 || t >= norm) return Vec::Zero(x.size());
    return (1.0 - t / norm) * x;
}

}  // namespace

TEST_CASE("closed-form flow reproduces the radial solution", "[flow][closed]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    const Vec x = make_vec({3.0, 4.0});

    const Vec at_boundary = *closed_form_flow(sys, x, 5.0);
    CHECK(at_boundary.norm() == 0.0);

    const Vec halfway = *closed_form_flow(sys, x, 2.5);
    CHECK(halfway[0] == Approx(1.5).margin(1e-14));
    CHECK(halfway[1] == Approx(2.0).margin(1e-14));

    const Vec backward = *closed_form_flow(sys, x, -1.0);
    CHECK(backward[0] == Approx(3.6).margin(1e-14));
    CHECK(backward[1] == Approx(4.8).margin(1e-14));
}

TEST_CASE("closed-form flow is unavailable or restricted where it should be", "[flow][closed]") {
    const SystemSpec planar = make_builtin("x0-plane", 2);
    CHECK_FALSE(closed_form_flow(planar, make_vec({1.0, 1.0}), 1.0).has_value());

    const SystemSpec sys = make_builtin("normalized", 2);
    CHECK_THROWS_AS(closed_form_flow(sys, Vec::Zero(2), -0.5), std::domain_error);
    CHECK((*closed_form_flow(sys, Vec::Zero(2), 1.0)).norm() == 0.0);
}

TEST_CASE("sqrt-scalar closed form satisfies the identity axiom", "[flow][closed]") {
    const SystemSpec sys = make_builtin("sqrt-scalar", 1);
    for (double s : {0.25, 1.0, 4.0, -4.0}) {
        const Vec x = make_vec({s});
        CHECK((*closed_form_flow(sys, x, 0.0))[0] == Approx(s).margin(1e-15));
    }
    CHECK((*closed_form_flow(sys, make_vec({4.0}), 2.0))[0] == Approx(1.0).margin(1e-14));
    CHECK((*closed_form_flow(sys, make_vec({-4.0}), 2.0))[0] == Approx(-1.0).margin(1e-14));
    CHECK((*closed_form_flow(sys, make_vec({1.0}), 2.0))[0] == 0.0);
    // Arrival happens at 2 sqrt(s), after which the state stays put.
    CHECK((*closed_form_flow(sys, make_vec({1.0}), 5.0))[0] == 0.0);
}

TEST_CASE("flow honors the identity axiom exactly", "[flow]") {
    for (const auto& name : builtin_names()) {
        const int n = name == "sqrt-scalar" ? 1 : 2;
        const SystemSpec sys = make_builtin(name, n);
        const Vec x = 0.5 * Vec::Ones(n);
        for (bool closed : {true, false}) {
            IntegratorConfig cfg = closed ? IntegratorConfig::closed_form_defaults()
                                          : IntegratorConfig::numeric_defaults();
            const FlowResult res = flow(sys, x, 0.0, cfg);
            CHECK(res.state == x);
            CHECK(res.status == FlowStatus::Interior);
            CHECK(res.time_reached == 0.0);
        }
    }
}

TEST_CASE("trajectory on the radial system freezes after arrival", "[flow]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    const IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);
    const double grid[] = {0.0, 1.0, 2.0, 3.0};
    const auto states = trajectory(sys, make_vec({2.0, 0.0}), grid, cfg);
    REQUIRE(states.size() == 4);
    CHECK(states[0].state[0] == Approx(2.0).margin(1e-14));
    CHECK(states[1].state[0] == Approx(1.0).margin(1e-14));
    CHECK(states[2].state.norm() == 0.0);
    CHECK(states[3].state.norm() == 0.0);
}

TEST_CASE("trajectory handles degenerate grids", "[flow]") {
    const SystemSpec sys = make_builtin("linear-scaled", 1, {{"a", 1.0}});
    const IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);
    CHECK(trajectory(sys, make_vec({1.0}), {}, cfg).empty());

    const double grid[] = {0.0, std::log(2.0)};
    const auto states = trajectory(sys, make_vec({1.0}), grid, cfg);
    CHECK(states[0].state[0] == Approx(1.0).margin(1e-15));
    CHECK(states[1].state[0] == Approx(0.5).margin(1e-12));

    const double bad[] = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(trajectory(sys, make_vec({1.0}), bad, cfg), std::invalid_argument);
}

TEST_CASE("trajectory accepts negative grid times on backward-complete systems", "[flow]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    const IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);
    const double grid[] = {-1.0, 0.0, 0.5};
    const auto states = trajectory(sys, make_vec({1.0, 0.0}), grid, cfg);
    REQUIRE(states.size() == 3);
    CHECK(states[0].state[0] == Approx(2.0).margin(1e-12));
    CHECK(states[1].state[0] == Approx(1.0).margin(1e-15));
    CHECK(states[2].state[0] == Approx(0.5).margin(1e-12));
}

TEST_CASE("planar axis orbits arrive in finite time", "[flow][numeric]") {
    const SystemSpec sys = make_builtin("x0-plane", 2);
    const IntegratorConfig cfg = IntegratorConfig::numeric_defaults();

    const FlowResult res = flow(sys, make_vec({0.0, 0.5}), 1.0, cfg);
    CHECK(res.status == FlowStatus::ReachedEquilibrium);
    CHECK(res.state.norm() == 0.0);
    CHECK(res.event_time == Approx(0.5).margin(1e-4));

    const FlowResult far = flow(sys, make_vec({1.0, 1.0}), 10.0, cfg);
    CHECK(far.state.norm() < 1e-3);
}

TEST_CASE("semigroup axiom holds within the integrator tolerance", "[flow][numeric][property]") {
    const SystemSpec sys = make_builtin("x0-plane", 2);
    const IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    for (int k = 0; k < 20; ++k) {
        const auto u = kronecker_point(static_cast<std::uint64_t>(k), 4);
        Vec x(2);
        x[0] = (0.3 + 1.5 * u[0]) * std::cos(6.2831853 * u[1]);
        x[1] = (0.3 + 1.5 * u[0]) * std::sin(6.2831853 * u[1]);
        const double s = 2.0 * u[2];
        const double t = 2.0 * u[3];
        const Vec two_leg = flow(sys, flow(sys, x, s, cfg).state, t, cfg).state;
        const Vec one_leg = flow(sys, x, s + t, cfg).state;
        const double bound = 10.0 * (cfg.rel_tol * x.norm() + cfg.abs_tol);
        CHECK((two_leg - one_leg).norm() <= bound);
    }
}

TEST_CASE("lyapunov value decreases along every builtin orbit", "[flow][property]") {
    for (const auto& name : builtin_names()) {
        const int n = name == "sqrt-scalar" ? 1 : 2;
        const SystemSpec sys = make_builtin(name, n);
        const IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);
        const Vec x = 0.8 * Vec::Ones(n);
        const double v0 = eval_lyapunov(sys, x);
        for (double t : {0.05, 0.2, 0.6}) {
            const FlowResult res = flow(sys, x, t, cfg);
            const double v1 = res.status == FlowStatus::ReachedEquilibrium
                                  ? 0.0
                                  : eval_lyapunov(sys, res.state);
            CHECK(v1 < v0 + cfg.abs_tol);
        }
    }
}

TEST_CASE("numeric path agrees with the closed form on the radial system",
          "[flow][numeric][property]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    const IntegratorConfig numeric = IntegratorConfig::numeric_defaults();
    for (double radius : {0.1, 1.0, 5.0, 10.0}) {
        const Vec x = make_vec({radius, 0.0});
        for (double fraction : {0.0, 0.3, 0.75, 1.0}) {
            const double t = fraction * radius;
            const Vec numeric_state = flow(sys, x, t, numeric).state;
            CHECK((numeric_state - closed_oracle_normalized(x, t)).norm() <= 1e-5);
        }
    }
}

TEST_CASE("finite-time arrival is reported at |x| on the radial system", "[flow]") {
    const SystemSpec sys = make_builtin("normalized", 2);

    const FlowResult closed = flow(sys, make_vec({0.0, 1.5}), 3.0,
                                   IntegratorConfig::closed_form_defaults());
    CHECK(closed.status == FlowStatus::ReachedEquilibrium);
    CHECK(closed.event_time == Approx(1.5).margin(1e-6));
    CHECK(closed.state.norm() == 0.0);

    const FlowResult numeric =
        flow(sys, make_vec({2.0, 0.0}), 3.0, IntegratorConfig::numeric_defaults());
    CHECK(numeric.status == FlowStatus::ReachedEquilibrium);
    CHECK(numeric.event_time == Approx(2.0).margin(1e-4));
    CHECK(numeric.state.norm() == 0.0);
}

TEST_CASE("backward integration refuses to start at the equilibrium", "[flow][errors]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    CHECK_THROWS_AS(flow(sys, Vec::Zero(2), -1.0, IntegratorConfig::closed_form_defaults()),
                    std::domain_error);
    CHECK_THROWS_AS(flow(sys, Vec::Zero(2), -1.0, IntegratorConfig::numeric_defaults()),
                    std::domain_error);
}

TEST_CASE("backward orbits exit the bounded domain", "[flow]") {
    const SystemSpec sys = make_builtin("normalized-bounded", 2);
    for (bool closed : {true, false}) {
        IntegratorConfig cfg = closed ? IntegratorConfig::closed_form_defaults()
                                      : IntegratorConfig::numeric_defaults();
        const FlowResult res = flow(sys, make_vec({1.0, 0.0}), -5.0, cfg);
        CHECK(res.status == FlowStatus::LeftDomain);
        CHECK(res.event_time == Approx(1.0).margin(1e-5));
        CHECK(res.state.norm() == Approx(2.0).margin(1e-5));
        CHECK(res.time_reached == Approx(-1.0).margin(1e-5));
    }
}

TEST_CASE("horizon cap truncates long requests", "[flow]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    cfg.t_max = 1.0;
    const FlowResult res = flow(sys, make_vec({2.0, 0.0}), 2.0, cfg);
    CHECK(res.status == FlowStatus::Capped);
    CHECK(res.time_reached == Approx(1.0).margin(1e-9));
    CHECK(res.state.norm() == Approx(1.0).margin(1e-6));
}

TEST_CASE("non-finite fields surface as integration failures", "[flow][errors]") {
    SystemSpec sys = make_builtin("normalized", 2);
    sys.closed_flow = nullptr;
    sys.field = [](const Vec& x) -> Vec {
        return Vec::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
    };
    CHECK_THROWS_AS(flow(sys, make_vec({1.0, 0.0}), 1.0, IntegratorConfig::numeric_defaults()),
                    std::runtime_error);
}

TEST_CASE("first zero crossing locates level hits on both paths", "[flow]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    auto scalar = [&sys](const Vec& p) { return sys.lyapunov(p) - 0.5; };
    for (bool closed : {true, false}) {
        IntegratorConfig cfg = closed ? IntegratorConfig::closed_form_defaults()
                                      : IntegratorConfig::numeric_defaults();
        const auto hit = first_zero_crossing(sys, make_vec({2.0, 0.0}), false, scalar, cfg);
        REQUIRE(hit.has_value());
        CHECK(hit->time == Approx(1.0).margin(1e-6));
        CHECK(hit->state[0] == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("first zero crossing reports no-crossing and domain exits", "[flow][errors]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    IntegratorConfig cfg = IntegratorConfig::closed_form_defaults();
    cfg.t_max = 4.0;
    auto unreachable = [&sys](const Vec& p) { return sys.lyapunov(p) + 1.0; };
    CHECK_FALSE(first_zero_crossing(sys, make_vec({2.0, 0.0}), false, unreachable, cfg).has_value());

    const SystemSpec bounded = make_builtin("normalized-bounded", 2);
    // V stays below 2 inside the ball, so this level is only reachable after the exit.
    auto far_level = [&bounded](const Vec& p) { return bounded.lyapunov(p) - 2.5; };
    CHECK_THROWS_AS(
        first_zero_crossing(bounded, make_vec({0.5, 0.0}), true, far_level,
                            IntegratorConfig::closed_form_defaults()),
        std::runtime_error);
}

TEST_CASE("integrator configuration is validated", "[flow][errors]") {
    const SystemSpec sys = make_builtin("normalized", 2);
    IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(flow(sys, make_vec({1.0, 0.0}), 1.0, cfg), std::invalid_argument);
    CHECK(IntegratorConfig::numeric_defaults().snap_radius < 1e-3);
    CHECK(IntegratorConfig::closed_form_defaults().snap_radius < 1e-3);
}
