#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "walkbsde/errors.hpp"
#include "walkbsde/harness.hpp"
#include "walkbsde/lattice_solver.hpp"
#include "walkbsde/run_config.hpp"
#include "walkbsde/svg_plot.hpp"

namespace fs = std::filesystem;
using walkbsde::RunConfig;

namespace {

struct PendingEntry {
    std::string key;
    std::string value;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cout << "wrote " << path.string() << "\n";
}

fs::path run_directory(const RunConfig& config) {
    std::string root = config.out_dir;
    if (root.empty()) {
        const char* env = std::getenv("WALKBSDE_OUT");
        root = env ? env : "out";
    }
    fs::path dir = fs::path(root) / config.content_hash();
    fs::create_directories(dir);
    return dir;
}

walkbsde::ProblemParams to_params(const RunConfig& config) {
    walkbsde::ProblemParams params;
    params.eps = config.eps;
    params.scale = config.scale;
    params.lambda = config.lambda;
    params.mu = config.mu;
    params.alpha = config.alpha;
    params.horizon = config.horizon;
    params.x0 = config.x0;
    return params;
}

walkbsde::StudySpec to_study(const RunConfig& config) {
    walkbsde::StudySpec spec;
    spec.problem_id = config.problem;
    spec.params = to_params(config);
    spec.n_list = config.n_list;
    spec.eval_times = config.times;
    spec.r_list = config.r_list;
    spec.targets = config.targets;
    spec.oracle_policy = config.oracle;
    spec.quad_nodes = config.quad_nodes;
    spec.quantile_count = config.quantiles;
    return spec;
}

int run_list() {
    for (const auto& [id, hint] : walkbsde::list_problems())
        std::cout << id << "\n    " << hint << "\n";
    return 0;
}

int run_solve(const RunConfig& config) {
    auto problem = walkbsde::make_problem(config.problem, to_params(config));
    long n = config.n_list.front();
    walkbsde::TimeGrid grid(config.horizon, n);
    auto sol = walkbsde::solve_backward(problem, grid, problem.start_x);

    double value = sol.value(0, 0);
    double gradient = sol.gradient(0, 0);
    double residual = sol.fixed_point_residuals().size() > 0
                          ? sol.fixed_point_residuals().maxCoeff()
                          : 0.0;
    std::cout << "problem " << config.problem << ", n = " << n << "\n"
              << "  U^n(0, x0)     = " << value << "\n"
              << "  Delta^n(0, x0) = " << gradient << "\n"
              << "  max residual   = " << residual << "\n";

    nlohmann::ordered_json root;
    root["problem"] = config.problem;
    root["n"] = n;
    root["value"] = value;
    root["gradient"] = gradient;
    root["max_residual"] = residual;
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "solve.json", root.dump(2) + "\n");
    return 0;
}

int run_rates(const RunConfig& config) {
    auto result = walkbsde::run_convergence(to_study(config));
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "rates.csv", walkbsde::to_csv(result.rows));
    write_file(dir / "summary.json", walkbsde::summary_json(result, "rates:" + config.problem));
    if (config.plot) {
        for (const auto& [key, fit] : result.fits) {
            if (fit.points.empty()) continue;
            std::string name = key;
            for (char& c : name)
                if (c == '@' || c == '=' || c == ',') c = '_';
            write_file(dir / (name + ".svg"),
                       walkbsde::emit_plot(fit, -result.rate_bound, key));
        }
    }
    for (const auto& [key, fit] : result.fits) {
        bool ok = walkbsde::fit_passes(fit, result.rate_bound);
        std::cout << (ok ? "pass" : "FAIL") << "  " << key;
        if (fit.fitted)
            std::cout << "  slope " << fit.slope << " (bound " << -result.rate_bound << " + "
                      << walkbsde::kSlopeTolerance << "), r^2 " << fit.r_squared;
        else
            std::cout << "  exact at every n";
        std::cout << "\n";
    }
    return result.pass ? 0 : 1;
}

int run_rio(const RunConfig& config) {
    auto result = walkbsde::rio_study(config.n_list, config.r_list.front(), config.quantiles,
                                      config.horizon);
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "rio.csv", walkbsde::to_csv(result.rows));

    nlohmann::ordered_json root;
    root["study"] = "rio";
    root["slope"] = result.fit.slope;
    root["r_squared"] = result.fit.r_squared;
    root["slope_window"] = {-0.6, -0.45};
    root["pass"] = result.pass;
    write_file(dir / "summary.json", root.dump(2) + "\n");
    if (config.plot)
        write_file(dir / "rio.svg", walkbsde::emit_plot(result.fit, -0.5, "walk vs normal"));
    std::cout << (result.pass ? "pass" : "FAIL") << "  rio slope " << result.fit.slope
              << ", r^2 " << result.fit.r_squared << "\n";
    return result.pass ? 0 : 1;
}

int run_holder(const RunConfig& config) {
    auto g = walkbsde::holder_terminal(config.eps, config.scale);
    auto result = walkbsde::holder_expectation_study(g, config.n_list, config.horizon);
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "holder.csv", walkbsde::to_csv(result.rows));

    nlohmann::ordered_json root;
    root["study"] = "holder";
    root["eps"] = config.eps;
    root["slope_bound"] = -0.5 * config.eps + walkbsde::kSlopeTolerance;
    root["plain_slope"] = result.plain.fitted ? result.plain.slope : 0.0;
    root["weighted_slope"] = result.weighted.fitted ? result.weighted.slope : 0.0;
    root["pass"] = result.pass;
    write_file(dir / "summary.json", root.dump(2) + "\n");
    if (config.plot && result.plain.fitted)
        write_file(dir / "holder.svg",
                   walkbsde::emit_plot(result.plain, -0.5 * config.eps, "holder expectation"));
    std::cout << (result.pass ? "pass" : "FAIL") << "  holder study eps = " << config.eps << "\n";
    return result.pass ? 0 : 1;
}

int run_stability(const RunConfig& config) {
    auto problem = walkbsde::make_problem(config.problem, to_params(config));
    std::vector<walkbsde::Perturbation> perturbations;
    for (double size : config.sizes) {
        walkbsde::Perturbation p;
        p.label = "dg_const_" + std::to_string(size);
        p.size = size;
        p.dg = [size](double) { return size; };
        perturbations.push_back(std::move(p));
    }
    long n = config.n_list.back();
    auto rows = walkbsde::stability_study(problem, perturbations, n);

    bool pass = true;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
        nlohmann::ordered_json entry;
        entry["label"] = rows[i].label;
        entry["size"] = rows[i].size;
        entry["sup_y"] = rows[i].sup_y;
        entry["z_norm"] = rows[i].z_norm;
        if (i > 0 && rows[i - 1].sup_y > 0.0) {
            double measured = rows[i].sup_y / rows[i - 1].sup_y;
            double expected = rows[i].size / rows[i - 1].size;
            entry["ratio"] = measured;
            bool ok = measured >= 0.9 * expected && measured <= 1.1 * expected;
            entry["ratio_pass"] = ok;
            pass = pass && ok;
        }
        table.push_back(entry);
        std::cout << rows[i].label << "  sup_y " << rows[i].sup_y << "  z_norm " << rows[i].z_norm
                  << "\n";
    }
    nlohmann::ordered_json root;
    root["study"] = "stability:" + config.problem;
    root["n"] = n;
    root["rows"] = table;
    root["pass"] = pass;
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "summary.json", root.dump(2) + "\n");
    std::cout << (pass ? "pass" : "FAIL") << "  stability linear scaling\n";
    return pass ? 0 : 1;
}

int run_regularity(const RunConfig& config) {
    auto problem = walkbsde::make_problem(config.problem, to_params(config));
    auto oracle = walkbsde::select_oracle(problem, to_study(config));
    auto report = walkbsde::regularity_suite(problem, oracle);

    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& q : report.quantities) {
        nlohmann::ordered_json entry;
        entry["name"] = q.name;
        entry["base"] = q.base;
        entry["refined"] = q.refined;
        entry["variation"] = q.variation;
        entry["finite"] = q.finite;
        table.push_back(entry);
        std::cout << (q.finite && q.variation <= 0.20 ? "pass" : "FAIL") << "  " << q.name
                  << "  base " << q.base << "  refined " << q.refined << "  variation "
                  << q.variation << "\n";
    }
    nlohmann::ordered_json root;
    root["study"] = "regularity:" + config.problem;
    root["quantities"] = table;
    root["pass"] = report.pass;
    fs::path dir = run_directory(config);
    write_file(dir / "config.txt", config.canonical());
    write_file(dir / "summary.json", root.dump(2) + "\n");
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaled random walk approximation of Markovian BSDEs"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<PendingEntry> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key=value config file; flags override it");
        auto track = [&overrides, cmd](const char* flag, const char* key, const char* desc) {
            cmd->add_option_function<std::string>(
                flag, [&overrides, key](const std::string& v) { overrides.push_back({key, v}); },
                desc);
        };
        track("--problem", "problem", "problem id (see `list`)");
        track("--eps", "eps", "terminal Holder exponent");
        track("--scale", "scale", "terminal Holder norm");
        track("--lambda", "lambda", "generator y-coupling");
        track("--mu", "mu", "generator z-coupling");
        track("--alpha", "alpha", "generator time-Holder exponent");
        track("--T", "horizon", "time horizon");
        track("--x0", "x0", "anchor point");
        track("--n", "n", "comma list of step counts");
        track("--time", "times", "comma list of law evaluation times");
        track("--r", "r", "comma list of Wasserstein orders");
        track("--targets", "targets", "comma list of study targets");
        track("--oracle", "oracle", "oracle policy (auto|closed-form|heat|picard|self-refined)");
        track("--M", "quantiles", "Gaussian quantile sample size");
        track("--quad-nodes", "quad_nodes", "oracle quadrature order");
        track("--sizes", "sizes", "comma list of perturbation sizes");
        track("--out", "out", "output root directory");
        cmd->add_flag_function(
            "--plot", [&overrides](int64_t) { overrides.push_back({"plot", "true"}); },
            "emit SVG plots");
    };

    CLI::App* cmd_solve = app.add_subcommand("solve", "single backward solve");
    CLI::App* cmd_rates = app.add_subcommand("rates", "convergence study against the oracle");
    CLI::App* cmd_rio = app.add_subcommand("rio", "walk vs normal Wasserstein rate");
    CLI::App* cmd_holder = app.add_subcommand("holder", "Holder expectation rate study");
    CLI::App* cmd_stability = app.add_subcommand("stability", "a-priori stability ratios");
    CLI::App* cmd_regularity = app.add_subcommand("regularity", "scaled regularity quantities");
    app.add_subcommand("list", "list built-in problems");
    for (auto* cmd : {cmd_solve, cmd_rates, cmd_rio, cmd_holder, cmd_stability, cmd_regularity})
        add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw std::invalid_argument("config file not found: " + config_file);
            std::stringstream buffer;
            buffer << in.rdbuf();
            config = walkbsde::parse_config_text(buffer.str());
        }
        for (const auto& entry : overrides)
            walkbsde::apply_config_entry(config, entry.key, entry.value);
        config.command = app.get_subcommands().front()->get_name();
        walkbsde::validate_config(config);

        if (config.command == "list") return run_list();
        if (config.command == "solve") return run_solve(config);
        if (config.command == "rates") return run_rates(config);
        if (config.command == "rio") return run_rio(config);
        if (config.command == "holder") return run_holder(config);
        if (config.command == "stability") return run_stability(config);
        if (config.command == "regularity") return run_regularity(config);
        return 1;
    } catch (const walkbsde::SchemeUnstableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const walkbsde::OracleTooCoarseError& e) {
        std::cerr << "error: " << e.what() << " (ratio " << e.ratio() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
