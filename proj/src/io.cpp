#include "cope/io.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cope/config.hpp"
#include "cope/version.hpp"

namespace cope {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
// Shortest text that reads back to the same double; used for labels.
std::string format_label(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}
}  // namespace

std::string CsvRow::series() const {
    if (mechanism == "homogeneous") return "homogeneous(" + theta_dagger + ")";
    return mechanism;
}

std::vector<CsvRow> to_rows(const std::vector<ExperimentResult>& results) {
    std::vector<CsvRow> rows;
    for (const auto& r : results) {
        for (const auto& name : metric_names()) {
            const auto it = r.metrics.find(name);
            if (it == r.metrics.end()) continue;
            CsvRow row;
            row.mechanism = r.mechanism.family();
            row.cost = cost_label(r.cost);
            row.n_agents = r.n_agents;
            if (r.mechanism.kind == MechanismKind::Homogeneous) row.theta_dagger = format_label(r.mechanism.theta_dagger);
            row.metric = name;
            row.mean = it->second.mean;
            row.se = it->second.se;
            row.n_trials = r.n_trials;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ExperimentResult>& results) {
    out << kCsvHeader << '\n';
    for (const auto& r : to_rows(results)) {
        out << r.mechanism << ',' << r.cost << ',' << r.n_agents << ',' << r.theta_dagger << ',' << r.metric << ','
            << format_double(r.mean) << ',' << format_double(r.se) << ',' << r.n_trials << '\n';
    }
}

void write_results_json(std::ostream& out, const std::vector<ExperimentResult>& results) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : to_rows(results)) {
        nlohmann::ordered_json j;
        j["mechanism"] = r.mechanism;
        j["cost"] = r.cost;
        j["N"] = r.n_agents;
        j["theta_dagger"] = r.theta_dagger.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(std::stod(r.theta_dagger));
        j["metric"] = r.metric;
        j["mean"] = r.mean;
        j["se"] = r.se;
        j["n_trials"] = r.n_trials;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

std::vector<CsvRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("results file is empty");
    boost::trim(line);
    if (line != kCsvHeader) throw CsvError("unexpected CSV header: '" + line + "'");
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        boost::trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        boost::split(f, line, boost::is_any_of(","));
        if (f.size() != 8) throw CsvError("line " + std::to_string(lineno) + ": expected 8 fields");
        try {
            CsvRow r;
            r.mechanism = f[0];
            r.cost = f[1];
            std::size_t pos = 0;
            r.n_agents = std::stoi(f[2], &pos);
            r.theta_dagger = f[3];
            r.metric = f[4];
            r.mean = std::stod(f[5]);
            r.se = std::stod(f[6]);
            r.n_trials = std::stoull(f[7]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw CsvError("line " + std::to_string(lineno) + ": malformed number");
        }
    }
    if (rows.empty()) throw CsvError("results file has no rows");
    return rows;
}

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const std::string& started_at, double elapsed_s) {
    // Echo the config through the same INI text the run was parsed from.
    boost::property_tree::ptree tree;
    std::istringstream ini(serialize_config(cfg));
    boost::property_tree::read_ini(ini, tree);
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [section, body] : tree)
        for (const auto& [key, node] : body) config[section][key] = node.data();
    nlohmann::ordered_json j;
    j["config"] = config;
    j["seed"] = cfg.seed;
    j["version"] = kVersion;
    j["started_at"] = started_at;
    j["elapsed_s"] = elapsed_s;
    out << j.dump(2) << '\n';
}

FigureOutput write_figures(const std::vector<CsvRow>& rows, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    struct Fig {
        const char* name;
        const char* cost;
        const char* metric;
        bool centralized;
    };
    const Fig figs[] = {{"payoff_linear", "linear", "principal_payoff", false},
                        {"payoff_quadratic", "quadratic", "principal_payoff", false},
                        {"profit_linear", "linear", "network_profit", true},
                        {"profit_quadratic", "quadratic", "network_profit", true}};
    FigureOutput out;
    for (const auto& f : figs) {
        const fs::path path = fs::path(out_dir) / (std::string(f.name) + ".csv");
        std::ofstream os(path);
        if (!os) throw CsvError("cannot write " + path.string());
        os << "N,series,mean,se\n";
        bool any_central = false, any = false;
        for (const auto& r : rows) {
            if (r.cost != f.cost || r.metric != f.metric) continue;
            if (r.mechanism == "centralized" && !f.centralized) continue;
            any = true;
            any_central = any_central || r.mechanism == "centralized";
            os << r.n_agents << ',' << r.series() << ',' << format_double(r.mean) << ',' << format_double(r.se) << '\n';
        }
        if (!any) out.warnings.push_back(std::string(f.name) + ": no " + f.cost + " rows in the results");
        else if (f.centralized && !any_central)
            out.warnings.push_back(std::string(f.name) + ": no centralized rows; the benchmark series is a gap");
        out.files.push_back(path.string());
    }
    return out;
}

}  // namespace cope
