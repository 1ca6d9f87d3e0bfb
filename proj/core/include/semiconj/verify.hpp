#pragma once

#include "semiconj/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace semiconj {

/// One verification suite's outcome. pass holds exactly when
/// max_residual <= tolerance. Suites that mix tolerance regimes (roundtrip)
/// report tolerance-normalized residuals with tolerance 1.
struct ResidualReport {
    std::string suite;
    int cases_run = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string worst_case;  ///< input description of the argmax residual
};

/// Suite names accepted by run_suite: conjugacy-closed, conjugacy-numeric,
/// semigroup, roundtrip, gamma, case2, scalar, reverse, interior.
std::vector<std::string> suite_names();

/// Runs one deterministic verification suite. Sample grids are fixed; `seed`
/// shifts the deterministic samplers (default 0, overridable via the
/// SEMICONJ_SEED environment variable at the CLI). Two runs with identical
/// arguments produce identical reports. Throws std::invalid_argument for an
/// unknown suite name.
ResidualReport run_suite(const std::string& name, std::optional<double> tol_override = {},
                         std::uint64_t seed = 0);

/// Column-oriented figure data with a fixed contract: first column t or |x|,
/// remaining columns named series.
struct FigureTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Curves behind the reference figures:
///  1  orbits of the planar system from a 5x5 grid of starts
///  3  tau'(x) and r e^{tau'(x)} against |x| for the normalized map
///  4  t -> |h o phi^t o h^-1(y)| for r = 1, |y| = 2 (finite-time system seen
///     through the map: 2 e^{-t}, then (1 - (t - log 2))^2, then 0)
///  5  t -> |h^-1 o e^{-tI} o h(x)| for |x| = 2 (linear system seen through
///     the inverse map: 2 - t, then e^{-(t-1)/2})
/// Throws std::invalid_argument for any other id.
FigureTable figure_data(int figure_id);

void write_figure_csv(const FigureTable& table, std::ostream& out);

}  // namespace semiconj
