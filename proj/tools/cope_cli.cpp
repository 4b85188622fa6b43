#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cope/config.hpp"
#include "cope/io.hpp"
#include "cope/numerics.hpp"
#include "cope/verify.hpp"

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int cmd_run(const std::string& path) {
    cope::ExperimentConfig cfg;
    cope::ExperimentSpec spec;
    try {
        cfg = cope::load_config(path);
        spec = cope::to_experiment_spec(cfg);
    } catch (const std::exception& e) {
        std::cerr << "cope run: " << e.what() << "\n";
        return 2;
    }
    spec.progress = [](const std::string& msg) { std::cerr << msg << "\n"; };

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<cope::ExperimentResult> results;
    try {
        results = cope::run_experiment(spec);
    } catch (const cope::SolverError& e) {
        std::cerr << "cope run: solver failure: " << e.what() << "\n";
        return 3;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
        std::cerr << "cope run: cannot write " << cfg.output_path << "\n";
        return 2;
    }
    if (cfg.output_format == "json")
        cope::write_results_json(out, results);
    else
        cope::write_results_csv(out, results);

    std::ofstream man(cfg.resolved_manifest_path(), std::ios::binary);
    if (!man) {
        std::cerr << "cope run: cannot write " << cfg.resolved_manifest_path() << "\n";
        return 2;
    }
    cope::write_manifest(man, cfg, started, elapsed);
    std::cerr << "wrote " << cfg.output_path << " and " << cfg.resolved_manifest_path() << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& cost, std::uint64_t seed, int instances, std::uint64_t n_mc) {
    cope::VerifyOptions opts;
    opts.seed = seed;
    if (instances > 0) opts.instances = instances;
    if (n_mc > 0) opts.n_mc = n_mc;
    if (!cost.empty()) {
        try {
            opts.costs = {cope::parse_cost(cost)};
        } catch (const std::exception& e) {
            std::cerr << "cope verify: " << e.what() << "\n";
            return 2;
        }
    }
    try {
        const auto rep = cope::run_suite(suite, opts);
        rep.print(std::cout);
        if (!rep.all_pass()) {
            for (const auto& r : rep.rows)
                if (r.gating && !r.pass) std::cerr << "FAILED " << r.name << " (instance/seed " << r.seed << "): " << r.detail << "\n";
            return 1;
        }
    } catch (const cope::SolverError& e) {
        std::cerr << "cope verify: solver failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

int cmd_figures(const std::string& path, const std::string& out_dir) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cope figures: cannot read " << path << "\n";
        return 2;
    }
    std::vector<cope::CsvRow> rows;
    try {
        rows = cope::read_results_csv(in);
    } catch (const cope::CsvError& e) {
        std::cerr << "cope figures: " << e.what() << "\n";
        return 2;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto out = cope::write_figures(rows, out_dir);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : out.files) std::cout << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost and prediction elicitation: simulation and verification"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment grid described by a config file");
    run->add_option("config", config_path, "Config file")->required();

    std::string suite, cost;
    std::uint64_t seed = cope::VerifyOptions{}.seed;
    std::uint64_t n_mc = 0;
    int instances = 0;
    auto* verify = app.add_subcommand("verify", "Run a property suite and print a pass/fail table");
    verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(cope::suite_names()));
    verify->add_option("--cost", cost, "Restrict to one cost family (linear, quadratic)");
    verify->add_option("--seed", seed, "Master seed");
    verify->add_option("--instances", instances, "Random instances per cost family");
    verify->add_option("--n-mc", n_mc, "Monte-Carlo draws per payoff estimate");

    std::string results_path, out_dir = ".";
    auto* figures = app.add_subcommand("figures", "Write per-figure data files from a results CSV");
    figures->add_option("results", results_path, "Results CSV from `run`")->required();
    figures->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*run) return cmd_run(config_path);
    if (*verify) return cmd_verify(suite, cost, seed, instances, n_mc);
    return cmd_figures(results_path, out_dir);
}
