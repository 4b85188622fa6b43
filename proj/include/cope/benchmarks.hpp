#pragma once

#include <span>
#include <vector>

#include "cope/cost.hpp"
#include "cope/mechanism.hpp"
#include "cope/model.hpp"

namespace cope {

struct CentralizedSolution {
    std::vector<double> efforts;
    double W_o = 0.0;  // quadratic case only
};

// Network-profit maximiser with full knowledge of the types. `general` is
// required for CostKind::General.
CentralizedSolution centralized_efforts(std::span<const double> types, CostKind kind, double var0,
                                        const CostModel* general = nullptr, const TieRule& tie = {});

// -h^P(q) - sum C(q_n, theta_n)
double network_profit(const GaussianPrior& prior, std::span<const double> types, std::span<const double> q,
                      const CostModel& model);

// Standard: alpha = (1/var0 + q)theta q + theta q for linear cost.
// BreakEven: alpha = (1/var0 + q)theta + theta q, which leaves a theta-dagger agent at zero.
enum class LinearAlpha { Standard, BreakEven };
// Denominator of the homogeneous predictor: participants only, or all N agents.
enum class ParticipantCount { Participants, All };

struct HomogeneousOptions {
    LinearAlpha linear_alpha = LinearAlpha::Standard;
    ParticipantCount count = ParticipantCount::Participants;
};

struct HomogeneousContract {
    double theta_dagger = 0.0;
    double q_dagger = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    int n_agents = 0;
    CostKind kind = CostKind::Linear;

    Payment payment() const { return {alpha, beta, 0.0}; }
};

HomogeneousContract homogeneous_contract(double theta_dagger, int n_agents, CostKind kind, double var0,
                                         const HomogeneousOptions& opts = {});

struct HomogeneousResponse {
    double q = 0.0;
    bool participate = false;
    double expected_payoff = 0.0;
};

HomogeneousResponse homogeneous_agent_response(double theta, const HomogeneousContract& c, double var0);

// Payoff the principal expects while believing every agent is a theta-dagger type.
double homogeneous_believed_payoff(const HomogeneousContract& c, double var0);
// True when that belief is below the no-action payoff, so she pays nothing and predicts mu0.
bool homogeneous_principal_abstains(const HomogeneousContract& c, double var0);

double homogeneous_predict(const HomogeneousContract& c, std::span<const double> participant_reports,
                           const GaussianPrior& prior, const HomogeneousOptions& opts = {});

}  // namespace cope
