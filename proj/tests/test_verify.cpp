#include <catch2/catch_amalgamated.hpp>

#include "semiconj/flow.hpp"
#include "semiconj/verify.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

using namespace semiconj;
using Catch::Approx;

namespace {

std::map<double, double> column_by_time(const FigureTable& table, const std::string& column) {
    std::size_t index = 0;
    for (; index < table.columns.size(); ++index) {
        if (table.columns[index] == column) break;
    }
    REQUIRE(index < table.columns.size());
    std::map<double, double> out;
    for (const auto& row : table.rows) out[row[0]] = row[index];
    return out;
}

}  // namespace

TEST_CASE("suite catalog is fixed", "[verify]") {
    const auto names = suite_names();
    REQUIRE(names.size() == 9);
    CHECK(names.front() == "conjugacy-closed");
    CHECK_THROWS_AS(run_suite("nope"), std::invalid_argument);
}

TEST_CASE("every suite passes at its default tolerance", "[verify][slow]") {
    for (const auto& name : suite_names()) {
        const ResidualReport report = run_suite(name);
        INFO(report.suite << " max_residual=" << report.max_residual
                          << " tolerance=" << report.tolerance << " worst=" << report.worst_case);
        CHECK(report.pass);
        CHECK(report.cases_run > 0);
        CHECK(report.max_residual <= report.tolerance);
    }
}

TEST_CASE("suite runs are deterministic", "[verify]") {
    for (const std::string name : {"scalar", "case2"}) {
        const ResidualReport a = run_suite(name);
        const ResidualReport b = run_suite(name);
        CHECK(a.max_residual == b.max_residual);
        CHECK(a.cases_run == b.cases_run);
        CHECK(a.worst_case == b.worst_case);
        CHECK(a.pass == b.pass);
    }
}

TEST_CASE("tolerance overrides flip the verdict", "[verify]") {
    const ResidualReport strict = run_suite("scalar", 1e-30);
    CHECK_FALSE(strict.pass);
    CHECK(strict.tolerance == 1e-30);
    const ResidualReport loose = run_suite("scalar", 1.0);
    CHECK(loose.pass);
}

TEST_CASE("figure ids are validated", "[verify][errors]") {
    CHECK_THROWS_AS(figure_data(2), std::invalid_argument);
    CHECK_THROWS_AS(figure_data(0), std::invalid_argument);
}

TEST_CASE("planar orbit figure decays exponentially in x1", "[verify][figdata]") {
    const FigureTable table = figure_data(1);
    REQUIRE(table.columns.size() == 51);  // t plus 25 starts times 2 coordinates
    REQUIRE(table.rows.size() == 400);

    // Column p20 starts at (2, -2); its x1-component follows e^{-t} exactly.
    std::size_t col = 0;
    for (; col < table.columns.size(); ++col) {
        if (table.columns[col] == "p20_x1") break;
    }
    REQUIRE(col < table.columns.size());
    for (const auto& row : table.rows) {
        CHECK(std::abs(row[col] - 2.0 * std::exp(-row[0])) <= 1e-7);
    }
}

TEST_CASE("planar axis starts arrive at |x2|", "[verify][figdata]") {
    const SystemSpec sys = make_builtin("x0-plane", 2);
    const IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    for (double x2 : {-2.0, -1.0, 1.0, 2.0}) {
        const FlowResult res = flow(sys, make_vec({0.0, x2}), std::abs(x2) + 1.0, cfg);
        CHECK(res.status == FlowStatus::ReachedEquilibrium);
        CHECK(res.event_time == Approx(std::abs(x2)).margin(1e-4));
    }
}

TEST_CASE("time-coordinate figure anchors at the level set", "[verify][figdata]") {
    const FigureTable table = figure_data(3);
    REQUIRE(table.columns.size() == 3);
    const auto tau = column_by_time(table, "tau_prime");
    REQUIRE(tau.count(1.0) == 1);
    CHECK(std::abs(tau.at(1.0)) <= 1e-10);
    const auto scaled = column_by_time(table, "r_exp_tau");
    CHECK(scaled.at(1.0) == Approx(1.0).margin(1e-10));
}

TEST_CASE("transformed decay figure follows its three branches", "[verify][figdata]") {
    const FigureTable table = figure_data(4);
    const double log2 = std::log(2.0);
    const auto series = column_by_time(table, "transformed_norm");
    REQUIRE(series.count(log2) == 1);
    REQUIRE(series.count(log2 + 1.0) == 1);
    CHECK(series.at(log2) == Approx(1.0).margin(1e-9));
    CHECK(series.at(log2 + 1.0) == Approx(0.0).margin(1e-9));
    for (const auto& [t, value] : series) {
        const double expected = t <= log2            ? 2.0 * std::exp(-t)
                                : t <= log2 + 1.0    ? std::pow(1.0 - (t - log2), 2)
                                                     : 0.0;
        CHECK(std::abs(value - expected) <= 1e-9);
        if (t > log2 + 1.0) CHECK(value <= 1e-12);
    }
}

TEST_CASE("pullback decay figure is continuous and strictly positive", "[verify][figdata]") {
    const FigureTable table = figure_data(5);
    const auto series = column_by_time(table, "pullback_norm");
    REQUIRE(series.count(1.0) == 1);
    CHECK(series.at(1.0) == Approx(1.0).margin(1e-9));
    for (const auto& [t, value] : series) {
        const double expected = t <= 1.0 ? 2.0 - t : std::exp(-(t - 1.0) / 2.0);
        CHECK(std::abs(value - expected) <= 1e-9);
        CHECK(value > 0.0);
    }
}

TEST_CASE("figure CSV uses the fixed column contract", "[verify][figdata]") {
    const FigureTable table = figure_data(5);
    std::ostringstream out;
    write_figure_csv(table, out);
    const std::string text = out.str();
    CHECK(text.rfind("t,pullback_norm\n", 0) == 0);
    std::ostringstream again;
    write_figure_csv(table, again);
    CHECK(text == again.str());
}
