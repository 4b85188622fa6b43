#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cope/agent.hpp"
#include "cope/contracts.hpp"
#include "cope/numerics.hpp"

namespace cope {

enum class AgentMode { Truthful, BestResponse };

struct TrialRecord {
    double x = 0.0;
    std::vector<double> types;
    std::vector<double> reported_types;
    std::vector<double> requested;     // efforts the principal asked for
    std::vector<double> efforts;       // efforts actually exerted
    std::vector<double> observations;  // NaN where the effort was zero
    std::vector<double> reports;
    std::vector<bool> participating;
    double prediction = 0.0;
    std::vector<double> payments;
    double principal_payoff = 0.0;
    double network_profit = 0.0;
    double prediction_sq_error = 0.0;
    double bayes_risk = 0.0;  // h^P at the requested efforts
};

struct TrialOptions {
    MechanismOptions mech;
    BestResponseConfig best_response{21, false, 3.0, {400, 1, true, {}}};
};

// One pass through the interaction sequence. `types`, when given, replaces the
// drawn type vector.
TrialRecord run_trial(const Scenario& s, const MechanismSpec& mech, AgentMode mode, std::uint64_t seed,
                      const TrialOptions& opts = {}, const std::vector<double>* types = nullptr);

// Divides by the prior variance so predicting mu0 and paying nothing scores -1 in expectation.
double normalize_payoff(double raw, const GaussianPrior& prior);

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"principal_payoff", "network_profit", "prediction_sq_error",
                                                "bayes_risk",       "total_payment",  "active_agents"};
    return names;
}

struct ExperimentResult {
    MechanismSpec mechanism;
    CostKind cost = CostKind::Linear;
    int n_agents = 0;
    std::uint64_t n_trials = 0;
    std::map<std::string, Estimate> metrics;
};

struct ExperimentSpec {
    Scenario base;
    std::vector<CostKind> costs{CostKind::Linear};
    std::vector<int> n_values{3};
    std::vector<MechanismSpec> mechanisms;  // COPE entries adapt to each cost family
    std::uint64_t n_trials = 1000;
    std::uint64_t seed = 1;
    int parallelism = 1;
    AgentMode mode = AgentMode::Truthful;
    TrialOptions options;
    bool fixed_types = false;  // one type vector per N, redrawn x and noise per trial
    std::function<void(const std::string&)> progress;
};

// Trials within a cell are split into fixed blocks whose accumulators are merged
// in block order, so results do not depend on the number of threads.
std::vector<ExperimentResult> run_experiment(const ExperimentSpec& spec);

std::uint64_t trial_seed(std::uint64_t master, int n_agents, std::uint64_t trial);

int default_parallelism();

}  // namespace cope
