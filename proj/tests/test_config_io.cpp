#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "cope/config.hpp"
#include "cope/io.hpp"
#include "cope/rng.hpp"

using namespace cope;

namespace {
std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cope_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("config defaults") {
    const auto c = parse_config_string("");
    CHECK(c.mu0 == 0.0);
    CHECK(c.var0 == 1.0);
    CHECK(c.theta_lo == 0.0);
    CHECK(c.theta_hi == 1.0);
    CHECK(c.n_agents.size() == 17);
    CHECK(c.n_agents.front() == 3);
    CHECK(c.n_agents.back() == 19);
    CHECK(c.theta_dagger == std::vector<double>{0.2, 0.5, 0.8});
    CHECK(c.n_trials == 50000);
    CHECK(c.resolved_manifest_path() == "results.csv.manifest.json");
}

TEST_CASE("config parsing") {
    const auto c = parse_config_string(
        "[prior]\nmu0 = 0.5\nvar0 = 2\n"
        "[experiment]\ncosts = quadratic\nn_agents = 3..11:4\nmechanisms = cope, centralized\nn_trials = 10\n"
        "fixed_types = true\nagent_mode = best_response\n"
        "[cope]\ntie_break = random\nlinear_pi = full_support\n"
        "[homogeneous]\ntheta_dagger = 0.3\ncount = all\nlinear_alpha = break_even\n"
        "[output]\npath = out.json\nformat = json\nmanifest = m.json\n");
    CHECK(c.mu0 == 0.5);
    CHECK(c.var0 == 2.0);
    CHECK(c.costs == std::vector<CostKind>{CostKind::Quadratic});
    CHECK(c.n_agents == std::vector<int>{3, 7, 11});
    CHECK(c.mechanisms == std::vector<std::string>{"cope", "centralized"});
    CHECK(c.fixed_types);
    CHECK(c.agent_mode == AgentMode::BestResponse);
    CHECK(c.tie_break == TieBreak::SeededRandom);
    CHECK(c.linear_pi == LinearPiRule::FullSupport);
    CHECK(c.count == ParticipantCount::All);
    CHECK(c.linear_alpha == LinearAlpha::BreakEven);
    CHECK(c.resolved_manifest_path() == "m.json");
    CHECK(parse_config_string("[experiment]\nn_agents = 5, 3,9\n").n_agents == std::vector<int>{5, 3, 9});
}

TEST_CASE("config errors") {
    for (const char* bad : {"[experiment]\nn_trials = lots\n", "[experiment]\nn_trials = 0\n", "[prior]\nvar0 = -1\n",
                            "[nowhere]\nx = 1\n", "[prior]\nsigma = 1\n", "[experiment]\ncosts = cubic\n",
                            "[experiment]\nmechanisms = auction\n", "[output]\nformat = xml\n",
                            "[homogeneous]\ntheta_dagger = 0\n", "[experiment]\nn_agents = 9..3\n",
                            "[cope]\ntie_break = coin\n"})
        CHECK_THROWS_AS(parse_config_string(bad), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cope.ini"), ConfigError);
}

TEST_CASE("config round trip") {
    ExperimentConfig c;
    CHECK(parse_config_string(serialize_config(c)) == c);
    c.mu0 = 0.1;
    c.var0 = 1.0 / 3.0;
    c.theta_lo = 0.05;
    c.costs = {CostKind::Quadratic};
    c.n_agents = {4, 8};
    c.mechanisms = {"homogeneous"};
    c.theta_dagger = {0.15, 0.7};
    c.n_trials = 123;
    c.seed = 18446744073709551615ull;
    c.parallelism = 3;
    c.fixed_types = true;
    c.tie_break = TieBreak::SeededRandom;
    c.linear_pi = LinearPiRule::FullSupport;
    c.count = ParticipantCount::All;
    c.linear_alpha = LinearAlpha::BreakEven;
    c.output_path = "x.json";
    c.output_format = "json";
    c.manifest_path = "y.json";
    CHECK(parse_config_string(serialize_config(c)) == c);
}

TEST_CASE("doubles survive text") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double v = (uniform01(RngKey{8, i, 0, Purpose::Oracle}) - 0.5) * std::pow(10.0, static_cast<int>(i % 40) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(format_double(0.1).find(',') == std::string::npos);
}

TEST_CASE("results CSV round trip") {
    ExperimentResult r;
    r.mechanism = MechanismSpec::homogeneous(0.2);
    r.cost = CostKind::Quadratic;
    r.n_agents = 5;
    r.n_trials = 10;
    r.metrics["principal_payoff"] = {-0.123456789012345678, 0.001, 10};
    ExperimentResult c = r;
    c.mechanism = MechanismSpec::centralized();
    c.metrics["network_profit"] = {1.0 / 3.0, 0.0, 10};
    std::stringstream ss;
    write_results_csv(ss, {r, c});
    const std::string text = ss.str();
    CHECK(text.rfind(kCsvHeader, 0) == 0);
    CHECK(text.back() == '\n');
    const auto rows = read_results_csv(ss);
    REQUIRE(rows.size() == to_rows({r, c}).size());
    bool seen = false;
    for (const auto& row : rows)
        if (row.metric == "network_profit") {
            CHECK(row.mean == 1.0 / 3.0);
            CHECK(row.series() == "centralized");
            seen = true;
        }
    CHECK(seen);
    CHECK(rows.front().series() == "homogeneous(0.2)");
    CHECK(rows.front().mean == -0.123456789012345678);
}

TEST_CASE("malformed CSV is rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_results_csv(empty), CsvError);
    std::istringstream header_only(std::string(kCsvHeader) + "\n");
    CHECK_THROWS_AS(read_results_csv(header_only), CsvError);
    std::istringstream wrong("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_results_csv(wrong), CsvError);
    std::istringstream short_row(std::string(kCsvHeader) + "\ncope,linear,3,,principal_payoff,0.1\n");
    CHECK_THROWS_AS(read_results_csv(short_row), CsvError);
    std::istringstream bad_num(std::string(kCsvHeader) + "\ncope,linear,x,,principal_payoff,0.1,0,1\n");
    CHECK_THROWS_AS(read_results_csv(bad_num), CsvError);
}

TEST_CASE("JSON results and manifest") {
    ExperimentResult r;
    r.mechanism = MechanismSpec::cope_for(CostKind::Linear);
    r.n_agents = 3;
    r.n_trials = 2;
    r.metrics["principal_payoff"] = {-0.5, 0.1, 2};
    std::stringstream js;
    write_results_json(js, {r});
    CHECK(js.str().find("\"principal_payoff\"") != std::string::npos);
    std::stringstream man;
    write_manifest(man, ExperimentConfig{}, "2020-01-01T00:00:00Z", 1.5);
    for (const char* key : {"\"config\"", "\"seed\"", "\"version\"", "\"started_at\"", "\"elapsed_s\""})
        CHECK(man.str().find(key) != std::string::npos);
}

TEST_CASE("figure data files") {
    std::vector<CsvRow> rows;
    for (const char* cost : {"linear", "quadratic"})
        for (int n : {3, 5}) {
            rows.push_back({"cope", cost, n, "", "principal_payoff", -0.5, 0.01, 10});
            rows.push_back({"homogeneous", cost, n, "0.2", "principal_payoff", -0.9, 0.01, 10});
            rows.push_back({"cope", cost, n, "", "network_profit", -0.4, 0.01, 10});
            rows.push_back({"centralized", cost, n, "", "network_profit", -0.3, 0.01, 10});
        }
    const auto dir = scratch_dir("figs");
    const auto out = write_figures(rows, dir.string());
    CHECK(out.files.size() == 4);
    CHECK(out.warnings.empty());
    const auto f2a = read_file(dir / "payoff_linear.csv");
    CHECK(f2a.rfind("N,series,mean,se\n", 0) == 0);
    CHECK(f2a.find("homogeneous(0.2)") != std::string::npos);
    CHECK(f2a.find("centralized") == std::string::npos);
    CHECK(read_file(dir / "profit_quadratic.csv").find("centralized") != std::string::npos);

    std::vector<CsvRow> no_central;
    for (const auto& r : rows)
        if (r.mechanism != "centralized") no_central.push_back(r);
    const auto gap = write_figures(no_central, scratch_dir("gap").string());
    CHECK(gap.files.size() == 4);
    CHECK(gap.warnings.size() == 2);
}
