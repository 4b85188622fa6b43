#pragma once

#include <cstdint>
#include <vector>

#include "cope/contracts.hpp"
#include "cope/numerics.hpp"

namespace cope {

// Posterior mean of x given one observation y of precision q.
double truthful_report_obs(double y, double q, const GaussianPrior& prior);

// Expected payoff pi - K h^A(q) + S - C(q, theta) of taking a contract.
double analytic_agent_payoff(const Payment& pay, double q, double theta, const CostModel& model, const GaussianPrior& prior);

// Effort maximising analytic_agent_payoff, from the first-order condition
// K / (1/var0 + q)^2 = c(q, theta).
double optimal_effort(const Payment& pay, double theta, const CostModel& model, const GaussianPrior& prior);

struct EffortSearch {
    double q_max = 0.0;  // 0 picks a bound from the contract
    int bits = 52;
};

// Derivative-free oracle for the same maximiser.
double best_response_effort(double theta, const AgentContract& contract, const Scenario& s, const EffortSearch& cfg = {});

enum class EffortPolicy { Optimal, Requested };

struct OracleConfig {
    std::uint64_t n_mc = 20000;
    std::uint64_t seed = 1;
    // Replace the draw of x and the agent's own noise by E[(x - y_hat)^2] = h^A(q).
    bool analytic_inner = false;
    MechanismOptions mech;
};

// Interim expected payoff of agent 0 with type theta reporting theta_hat while
// the others are truthful. Homogeneous agents opt out when their contract is
// worth less than zero.
Estimate interim_payoff(double theta, double theta_hat, EffortPolicy policy, const MechanismSpec& mech, const Scenario& s,
                        const OracleConfig& cfg);

// Per-draw payoffs behind interim_payoff; draws are shared across theta_hat.
std::vector<double> interim_payoff_draws(double theta, double theta_hat, EffortPolicy policy, const MechanismSpec& mech,
                                         const Scenario& s, const OracleConfig& cfg);

struct BestResponseConfig {
    int grid_points = 101;
    bool refine = true;
    double se_band = 3.0;
    OracleConfig oracle{10000, 1, true, {}};
};

struct BestResponseType {
    double theta_hat = 0.0;          // best candidate found
    double grid_step = 0.0;
    std::vector<double> argmax_set;  // every candidate tied with the best
    double payoff_truth = 0.0;
    double payoff_max = 0.0;
    double se_gap = 0.0;             // SE of the paired difference max - truth
    bool truthful_ok = false;
    std::vector<double> candidates;
    std::vector<double> payoffs;
};

BestResponseType best_response_type(double theta, const MechanismSpec& mech, const Scenario& s,
                                    const BestResponseConfig& cfg = {});

// Interim payoff a truthful agent should earn: the integral from theta to the
// top of the support of E[C_theta(Q(z, theta_-n), z)].
double information_rent(double theta, const MechanismSpec& mech, const Scenario& s, int gl_points = 15);

}  // namespace cope
