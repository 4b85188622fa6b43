#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cope/model.hpp"

namespace cope {

// Agent cost C(q, theta) = integral of the marginal cost c(z, theta) over [0, q].
class CostModel {
public:
    using Marginal = std::function<double(double q, double theta)>;

    static CostModel linear();
    static CostModel quadratic();
    static CostModel general(Marginal marginal, std::string name = "general");

    CostKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    // Unchecked evaluations; finite differences step outside the support.
    double marginal(double q, double theta) const;
    double total(double q, double theta) const;
    double dtotal_dtheta(double q, double theta) const;
    double dmarginal_dq(double q, double theta) const;
    double dmarginal_dtheta(double q, double theta) const;

private:
    CostKind kind_ = CostKind::Linear;
    std::string name_;
    Marginal marginal_;
};

double fd_step(double v);

double cost(const CostModel& model, double q, double theta, const CostTypeDistribution& support);

struct RegularityGrid {
    double q_max = 10.0;
    int n_q = 25;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
    int n_theta = 25;
};

struct ConditionVerdict {
    bool pass = true;
    double worst = 0.0;  // smallest (or largest, for upper bounds) value seen
    double worst_q = 0.0;
    double worst_theta = 0.0;
};

struct RegularityReport {
    ConditionVerdict dc_dq_strict;    // dc/dq > 0
    ConditionVerdict dc_dq_weak;      // dc/dq >= 0
    ConditionVerdict dc_dtheta;       // dc/dtheta > 0
    ConditionVerdict d2c_dtheta2;     // >= 0
    ConditionVerdict d2c_dq_dtheta;   // >= 0

    bool strict_ok() const;
    bool weak_ok() const;
};

RegularityReport check_regularity(const CostModel& model, const RegularityGrid& grid);

using TypeSchedule = std::function<double(double theta)>;

struct RiskCostReport {
    std::vector<double> theta;
    std::vector<double> effort;
    // d/dtheta of c(Q(theta), theta) / (-dh/dq at Q(theta)), the marginal cost
    // per unit of the agent's own risk reduction.
    std::vector<double> derivative;
    std::vector<bool> pass;
    // d/dtheta of c(Q(theta), theta) taken at face value.
    std::vector<double> literal_derivative;
    std::vector<bool> literal_pass;

    bool all_pass() const;
    bool all_pass_where_active() const;  // ignores points with Q = 0
};

RiskCostReport risk_cost_condition(const CostModel& model, const TypeSchedule& schedule, const std::vector<double>& theta_grid,
                                  const GaussianPrior& prior);

}  // namespace cope
