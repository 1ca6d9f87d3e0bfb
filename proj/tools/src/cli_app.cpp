#include "cli_app.hpp"

#include "semiconj/conjugacy.hpp"
#include "semiconj/csv.hpp"
#include "semiconj/sampling.hpp"
#include "semiconj/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace semiconj::cli {

namespace {

using nlohmann::json;

struct SystemSelection {
    std::string name;
    int dimension = 0;  // 0 = unset
    std::vector<std::string> param_flags;
    std::string config_path;
};

int default_dimension(const std::string& name) {
    if (name == "sqrt-scalar") return 1;
    return 2;
}

Params parse_param_flags(const std::vector<std::string>& flags) {
    Params params;
    for (const auto& flag : flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::invalid_argument("--param expects key=value, got '" + flag + "'");
        }
        try {
            params[flag.substr(0, eq)] = std::stod(flag.substr(eq + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("--param value is not a number in '" + flag + "'");
        }
    }
    return params;
}

/// Flags override config-file values, which override defaults.
SystemSpec resolve_system(const SystemSelection& sel) {
    std::string name = sel.name;
    int dimension = sel.dimension;
    Params params;

    if (!sel.config_path.empty()) {
        std::ifstream in(sel.config_path);
        if (!in) throw std::invalid_argument("cannot open config file '" + sel.config_path + "'");
        json cfg;
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
        }
        if (name.empty() && cfg.contains("name")) name = cfg["name"].get<std::string>();
        if (dimension == 0 && cfg.contains("dimension")) dimension = cfg["dimension"].get<int>();
        if (cfg.contains("params")) {
            for (const auto& [key, value] : cfg["params"].items()) {
                params[key] = value.get<double>();
            }
        }
    }
    for (const auto& [key, value] : parse_param_flags(sel.param_flags)) {
        params[key] = value;
    }
    if (name.empty()) {
        throw std::invalid_argument("no system selected: pass --system or a --config file");
    }
    if (dimension == 0) dimension = default_dimension(name);
    return make_builtin(name, dimension, params);
}

Vec parse_csv_vector(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed CSV vector '" + text + "'");
        }
    }
    if (values.empty()) throw std::invalid_argument("malformed CSV vector '" + text + "'");
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    return out;
}

json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json integrator_to_json(const IntegratorConfig& cfg) {
    return json{{"rel_tol", cfg.rel_tol},         {"abs_tol", cfg.abs_tol},
                {"snap_radius", cfg.snap_radius}, {"t_max", cfg.t_max},
                {"event_tol", cfg.event_tol},     {"use_closed_form", cfg.use_closed_form}};
}

int run_simulate(const SystemSelection& sel, const std::string& x0_text, double t, bool backward,
                 const std::string& grid_text, const std::string& out_path, std::ostream&) {
    const SystemSpec sys = resolve_system(sel);
    const Vec x0 = parse_csv_vector(x0_text);
    if (x0.size() != sys.dimension) {
        throw std::invalid_argument("--x0 has " + std::to_string(x0.size()) +
                                    " components, system dimension is " +
                                    std::to_string(sys.dimension));
    }
    const IntegratorConfig cfg = IntegratorConfig::defaults_for(sys);

    std::vector<double> grid;
    if (grid_text.empty()) {
        const int count = 101;
        for (int i = 0; i < count; ++i) grid.push_back(t * i / (count - 1));
    } else {
        const Vec g = parse_csv_vector(grid_text);
        for (Eigen::Index i = 0; i < g.size(); ++i) grid.push_back(g[i]);
    }

    std::ofstream out = open_output(out_path);
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= sys.dimension; ++i) header.push_back("x" + std::to_string(i));
    header.push_back("V");
    write_csv_header(out, header);

    for (double g : grid) {
        const double tau = backward ? -g : g;
        const FlowResult res = flow(sys, x0, tau, cfg);
        if (res.status == FlowStatus::LeftDomain) {
            throw std::runtime_error("orbit leaves the domain at t = " +
                                     format_double(res.time_reached) +
                                     " before the requested grid time");
        }
        if (res.status == FlowStatus::Capped) {
            throw std::runtime_error("grid time exceeds the t_max horizon");
        }
        std::vector<double> row{tau};
        for (Eigen::Index i = 0; i < res.state.size(); ++i) row.push_back(res.state[i]);
        row.push_back(eval_lyapunov(sys, res.state));
        write_csv_row(out, row);
    }
    return 0;
}

int run_conjugate(const SystemSelection& sel, double epsilon, double radius,
                  std::optional<double> level_c, const std::string& point_text,
                  const std::string& out_path, std::ostream& out_stream) {
    const SystemSpec sys = resolve_system(sel);
    SamplerConfig sampler;
    sampler.seed = seed_from_env(0);
    const ConjugacyMap map = ConjugacyMap::build(sys, epsilon, radius, {}, sampler);
    const Vec x = parse_csv_vector(point_text);
    if (x.size() != sys.dimension) {
        throw std::invalid_argument("--point dimension does not match the system");
    }

    const Vec hx = map.h(x);
    json doc;
    doc["system"] = {{"name", sys.name}, {"dimension", sys.dimension}};
    doc["epsilon"] = epsilon;
    doc["r"] = radius;
    doc["point"] = vec_to_json(x);
    doc["h"] = vec_to_json(hx);
    doc["h_inverse_of_h"] = vec_to_json(map.h_inverse(hx));
    doc["tau_prime"] = map.tau_prime(x);
    const double s_window = std::max(hx.norm() - radius, 0.0);
    doc["gamma"] = {{"s", s_window}, {"value", map.gamma_r(s_window)}};
    if (level_c) {
        doc["case2"] = {{"C", *level_c},
                        {"tau_C", map.tau_case2(*level_c, x)},
                        {"outer_radius_R", map.outer_radius(*level_c)}};
    }
    doc["integrator"] = integrator_to_json(map.integrator());
    doc["sampler"] = {{"directions", sampler.directions},
                      {"refine_rounds", sampler.refine_rounds},
                      {"seed", sampler.seed}};

    if (out_path.empty()) {
        out_stream << doc.dump(2) << '\n';
    } else {
        std::ofstream out = open_output(out_path);
        out << doc.dump(2) << '\n';
    }
    return 0;
}

int run_verify(const std::string& suite, std::optional<double> tol_override,
               const std::string& out_path, std::ostream& out_stream, std::ostream& err) {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        err << "unknown suite '" << suite << "' (valid: " << known << ")\n";
        return 2;
    }
    const std::uint64_t seed = seed_from_env(0);
    const ResidualReport report = run_suite(suite, tol_override, seed);

    json doc;
    doc["suite"] = report.suite;
    doc["cases_run"] = report.cases_run;
    doc["max_residual"] = report.max_residual;
    doc["tolerance"] = report.tolerance;
    doc["verdict"] = report.pass ? "pass" : "fail";
    doc["worst_case"] = report.worst_case;
    doc["config"] = {{"seed", seed},
                     {"tol_override", tol_override ? json(*tol_override) : json(nullptr)},
                     {"integrator_closed", integrator_to_json(IntegratorConfig::closed_form_defaults())},
                     {"integrator_numeric", integrator_to_json(IntegratorConfig::numeric_defaults())}};

    std::ofstream out = open_output(out_path);
    out << doc.dump(2) << '\n';
    out_stream << report.suite << ": " << (report.pass ? "pass" : "FAIL")
               << " max_residual=" << format_double(report.max_residual)
               << " tolerance=" << format_double(report.tolerance) << " cases="
               << report.cases_run << '\n';
    return report.pass ? 0 : 1;
}

int run_figdata(int figure_id, const std::string& out_path) {
    const FigureTable table = figure_data(figure_id);
    std::ofstream out = open_output(out_path);
    write_figure_csv(table, out);
    return 0;
}

void add_system_flags(CLI::App* cmd, SystemSelection& sel) {
    cmd->add_option("--system", sel.name, "built-in system name");
    cmd->add_option("--dim", sel.dimension, "state-space dimension");
    cmd->add_option("--param", sel.param_flags, "system parameter key=value (repeatable)");
    cmd->add_option("--config", sel.config_path,
                    "JSON config file with keys {name, dimension, params}");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"semiflow linearization toolkit"};
    app.require_subcommand(1);

    SystemSelection sim_sel;
    std::string sim_x0, sim_grid, sim_out;
    double sim_t = 0.0;
    bool sim_backward = false;
    auto* simulate = app.add_subcommand("simulate", "integrate an orbit and write (t, x, V) CSV");
    add_system_flags(simulate, sim_sel);
    simulate->add_option("--x0", sim_x0, "initial state as CSV")->required();
    simulate->add_option("--t", sim_t, "integration time (nonnegative)")->required();
    simulate->add_flag("--backward", sim_backward, "integrate the reversed field");
    simulate->add_option("--grid", sim_grid, "explicit time grid as CSV (default: 101 uniform)");
    simulate->add_option("--out", sim_out, "output CSV path")->required();

    SystemSelection conj_sel;
    std::string conj_point, conj_out;
    double conj_eps = 0.0, conj_r = 0.0;
    double conj_c = 0.0;
    auto* conjugate =
        app.add_subcommand("conjugate", "evaluate the linearizing map at a point (JSON)");
    add_system_flags(conjugate, conj_sel);
    conjugate->add_option("--epsilon", conj_eps, "inner level value")->required();
    conjugate->add_option("--r", conj_r, "image radius of the level set")->required();
    auto* c_opt = conjugate->add_option("--C", conj_c, "outer level for the bounded-domain diagnostics");
    conjugate->add_option("--point", conj_point, "evaluation point as CSV")->required();
    conjugate->add_option("--out", conj_out, "output JSON path (default: stdout)");

    std::string verify_suite, verify_out;
    double verify_tol = 0.0;
    auto* verify = app.add_subcommand("verify", "run a verification suite (JSON report)");
    verify->add_option("--suite", verify_suite, "suite name")->required();
    auto* tol_opt = verify->add_option("--tol", verify_tol, "tolerance override");
    verify->add_option("--out", verify_out, "output JSON path")->required();

    int fig_id = 0;
    std::string fig_out;
    auto* figdata = app.add_subcommand("figdata", "emit figure data as CSV");
    figdata->add_option("--figure", fig_id, "figure id (1, 3, 4, 5)")->required();
    figdata->add_option("--out", fig_out, "output CSV path")->required();

    try {
        std::vector<const char*> argv;
        argv.push_back("semiconj");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_sel, sim_x0, sim_t, sim_backward, sim_grid, sim_out, out);
        }
        if (conjugate->parsed()) {
            std::optional<double> level_c;
            if (c_opt->count() > 0) level_c = conj_c;
            return run_conjugate(conj_sel, conj_eps, conj_r, level_c, conj_point, conj_out, out);
        }
        if (verify->parsed()) {
            std::optional<double> tol;
            if (tol_opt->count() > 0) tol = verify_tol;
            return run_verify(verify_suite, tol, verify_out, out, err);
        }
        if (figdata->parsed()) {
            return run_figdata(fig_id, fig_out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << "no subcommand selected\n";
    return 2;
}

}  // namespace semiconj::cli
