#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cope/sim.hpp"

namespace cope {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat INI-style file:
//
//   [prior]        mu0, var0
//   [types]        theta_lo, theta_hi              (uniform)
//   [experiment]   costs, n_agents, mechanisms, n_trials, seed, parallelism,
//                  fixed_types, agent_mode
//   [cope]         tie_break, linear_pi
//   [homogeneous]  theta_dagger, count, linear_alpha
//   [output]       path, format, manifest
//
// n_agents accepts "3..19", "3..19:2" or "3,5,7". Lists are comma separated.
struct ExperimentConfig {
    double mu0 = 0.0;
    double var0 = 1.0;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
    std::vector<CostKind> costs{CostKind::Linear, CostKind::Quadratic};
    std::vector<int> n_agents{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
    std::vector<std::string> mechanisms{"cope", "centralized", "homogeneous"};
    std::uint64_t n_trials = 50000;
    std::uint64_t seed = 20190501;
    int parallelism = 0;  // 0: COPE_THREADS or the hardware count
    bool fixed_types = false;
    AgentMode agent_mode = AgentMode::Truthful;
    TieBreak tie_break = TieBreak::LowestIndex;
    LinearPiRule linear_pi = LinearPiRule::RunnerUp;
    std::vector<double> theta_dagger{0.2, 0.5, 0.8};
    ParticipantCount count = ParticipantCount::Participants;
    LinearAlpha linear_alpha = LinearAlpha::Standard;
    std::string output_path = "results.csv";
    std::string output_format = "csv";
    std::string manifest_path;  // empty: output_path + ".manifest.json"

    bool operator==(const ExperimentConfig&) const = default;

    std::string resolved_manifest_path() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

ExperimentSpec to_experiment_spec(const ExperimentConfig& cfg);

std::string cost_label(CostKind k);
CostKind parse_cost(const std::string& s);

}  // namespace cope
