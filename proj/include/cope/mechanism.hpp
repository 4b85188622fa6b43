#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cope/cost.hpp"
#include "cope/cubic.hpp"
#include "cope/model.hpp"

namespace cope {

// gamma(theta) = theta + F(theta)/f(theta); 2 theta - theta_lo under Uniform.
double virtual_cost(const CostTypeDistribution& dist, double theta);

enum class TieBreak { LowestIndex, SeededRandom };

struct TieRule {
    TieBreak mode = TieBreak::LowestIndex;
    std::uint64_t seed = 0;
};

// Index of the lowest reported type.
std::size_t linear_winner(std::span<const double> reports, const TieRule& tie = {});

// max{gamma(theta)^(-1/2) - 1/var0, 0}: the effort asked of a winner reporting theta.
double linear_winner_effort(const CostTypeDistribution& dist, double var0, double theta);

std::vector<double> effort_linear(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                  const TieRule& tie = {});

// W solves W^3 - W^2/var0 - sum_m 1/gamma(theta_m) = 0.
CubicSolution solve_W(std::span<const double> reports, const CostTypeDistribution& dist, double var0);

std::vector<double> effort_quadratic(std::span<const double> reports, const CostTypeDistribution& dist, double var0);

// Q for one agent given the summed 1/gamma of the others.
double quadratic_effort_given_rest(const CostTypeDistribution& dist, double var0, double theta, double rest_sum);

// Realized payment R = pi - K * (x - y_hat)^2 + S.
struct Payment {
    double pi = 0.0;
    double K = 0.0;
    double S = 0.0;

    double realized(double x, double y_hat) const;
    // Expected payment when the agent's expected loss is h.
    double expected(double h) const { return pi - K * h + S; }
};

using PaymentRule = std::vector<Payment>;

// Upper limit of the linear pi integral. RunnerUp stops at the second-lowest
// report, where the winner would stop being recruited.
enum class LinearPiRule { RunnerUp, FullSupport };

struct LinearOptions {
    TieRule tie;
    LinearPiRule pi_rule = LinearPiRule::RunnerUp;
    double abs_tol = 1e-10;
};

PaymentRule payment_rule_linear(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                const LinearOptions& opts = {});

// Uniform-type antiderivative of theta Q(theta) + int_theta^hi Q(z) dz without
// the clamp and without the runner-up cap.
double linear_pi_antiderivative(double theta, double theta_lo, double theta_hi, double var0);
// The same expression with a factor 2 on the bracketed square-root term.
double linear_pi_doubled_bracket(double theta, double theta_lo, double theta_hi, double var0);

PaymentRule payment_rule_quadratic(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                   double abs_tol = 1e-10);
// One agent's entry of payment_rule_quadratic.
Payment quadratic_payment(std::span<const double> reports, std::size_t n, const CostTypeDistribution& dist, double var0,
                          double abs_tol = 1e-10);

// General setting.

struct GeneralSolverConfig {
    int multistart = 8;
    int max_iter = 500;
    double tol = 1e-9;
    std::uint64_t seed = 0x5eed;
    // false drops the information-rent term, giving the centralized problem.
    bool virtual_costs = true;
};

struct GeneralSolution {
    std::vector<double> q;
    double objective = 0.0;
    double pg_norm = 0.0;
    int iterations = 0;
    int starts_converged = 0;
};

// -h^P(q) - sum C(q_n, t_n) - sum C_theta(q_n, t_n) F/f(t_n)
double general_objective(const CostModel& model, const CostTypeDistribution& dist, const GaussianPrior& prior,
                         std::span<const double> reports, std::span<const double> q, bool virtual_costs = true);

GeneralSolution solve_general(const CostModel& model, const CostTypeDistribution& dist, double var0,
                              std::span<const double> reports, const GeneralSolverConfig& cfg = {});

std::vector<double> effort_general(const CostModel& model, const CostTypeDistribution& dist, double var0,
                                   std::span<const double> reports, const GeneralSolverConfig& cfg = {});

// Largest eigenvalue of the finite-difference Hessian of general_objective at q.
double general_hessian_max_eigenvalue(const CostModel& model, const CostTypeDistribution& dist, const GaussianPrior& prior,
                                      std::span<const double> reports, std::span<const double> q);

using ProfileSchedule = std::function<std::vector<double>(std::span<const double>)>;

PaymentRule payment_rule_general(const CostModel& model, const ProfileSchedule& schedule, const CostTypeDistribution& dist,
                                 double var0, std::span<const double> reports, double abs_tol = 1e-8,
                                 bool compute_pi = true);

// Q^P(z, rest) for agent n on a sweep of z; true when nonincreasing.
bool schedule_monotone(const ProfileSchedule& schedule, std::span<const double> reports, std::size_t n,
                       const CostTypeDistribution& dist, int points = 200, double tol = 1e-9);

// Bayes predictor from shrunk reports and the requested efforts.
double predict(const GaussianPrior& prior, std::span<const double> reports, std::span<const double> q);

// Inverse of the agent's shrinkage: the raw observation implied by a truthful report.
double unshrink(const GaussianPrior& prior, double y_hat, double q);

}  // namespace cope
