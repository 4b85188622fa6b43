#include "cope/cost.hpp"

#include <algorithm>
#include <cmath>

#include "cope/numerics.hpp"

namespace cope {

CostModel CostModel::linear() {
    CostModel m;
    m.kind_ = CostKind::Linear;
    m.name_ = "linear";
    m.marginal_ = [](double, double t) { return t; };
    return m;
}

CostModel CostModel::quadratic() {
    CostModel m;
    m.kind_ = CostKind::Quadratic;
    m.name_ = "quadratic";
    m.marginal_ = [](double q, double t) { return t * q; };
    return m;
}

CostModel CostModel::general(Marginal marginal, std::string name) {
    if (!marginal) throw DomainError("general cost model needs a marginal cost");
    CostModel m;
    m.kind_ = CostKind::General;
    m.name_ = std::move(name);
    m.marginal_ = std::move(marginal);
    return m;
}

double fd_step(double v) { return std::max(1e-6, 1e-6 * std::abs(v)); }

namespace {
// Second differences use a wider step; 1e-6 would leave rounding noise near 1e-4.
double fd_step2(double v) { return std::max(1e-4, 1e-4 * std::abs(v)); }
}  // namespace

double CostModel::marginal(double q, double theta) const { return marginal_(q, theta); }

double CostModel::total(double q, double theta) const {
    switch (kind_) {
        case CostKind::Linear: return q * theta;
        case CostKind::Quadratic: return 0.5 * theta * q * q;
        case CostKind::General: break;
    }
    return integrate([&](double z) { return marginal_(z, theta); }, 0.0, q, 1e-12);
}

double CostModel::dtotal_dtheta(double q, double theta) const {
    switch (kind_) {
        case CostKind::Linear: return q;
        case CostKind::Quadratic: return 0.5 * q * q;
        case CostKind::General: break;
    }
    // Differentiating the smooth total beats integrating a noisy difference quotient.
    const double h = fd_step(theta);
    return (total(q, theta + h) - total(q, theta - h)) / (2.0 * h);
}

double CostModel::dmarginal_dq(double q, double theta) const {
    if (kind_ == CostKind::Linear) return 0.0;
    if (kind_ == CostKind::Quadratic) return theta;
    const double h = fd_step(q);
    return (marginal_(q + h, theta) - marginal_(q - h, theta)) / (2.0 * h);
}

double CostModel::dmarginal_dtheta(double q, double theta) const {
    if (kind_ == CostKind::Linear) return 1.0;
    if (kind_ == CostKind::Quadratic) return q;
    const double h = fd_step(theta);
    return (marginal_(q, theta + h) - marginal_(q, theta - h)) / (2.0 * h);
}

double cost(const CostModel& model, double q, double theta, const CostTypeDistribution& support) {
    if (!support.contains(theta)) throw DomainError("cost type outside the support");
    if (q < 0.0) throw DomainError("effort must be nonnegative");
    return model.total(q, theta);
}

bool RegularityReport::strict_ok() const {
    return dc_dq_strict.pass && dc_dtheta.pass && d2c_dtheta2.pass && d2c_dq_dtheta.pass;
}

bool RegularityReport::weak_ok() const {
    return dc_dq_weak.pass && dc_dtheta.pass && d2c_dtheta2.pass && d2c_dq_dtheta.pass;
}

namespace {
void record(ConditionVerdict& v, bool first, double value, bool ok, double q, double t) {
    if (first || value < v.worst) {
        v.worst = value;
        v.worst_q = q;
        v.worst_theta = t;
    }
    v.pass = v.pass && ok;
}
}  // namespace

RegularityReport check_regularity(const CostModel& model, const RegularityGrid& g) {
    RegularityReport r;
    bool first = true;
    // Finite differences throughout, including the families with exact partials.
    auto c = [&](double q, double t) { return model.marginal(q, t); };
    for (int i = 1; i <= g.n_q; ++i) {
        const double q = g.q_max * i / g.n_q;
        for (int j = 0; j < g.n_theta; ++j) {
            const double t = g.n_theta == 1 ? g.theta_lo : g.theta_lo + (g.theta_hi - g.theta_lo) * j / (g.n_theta - 1);
            const double scale = std::max(1.0, std::abs(c(q, t)));
            const double tol = 1e-6 * scale;
            const double hq = fd_step(q), ht = fd_step(t);
            const double cq = (c(q + hq, t) - c(q - hq, t)) / (2.0 * hq);
            const double ct = (c(q, t + ht) - c(q, t - ht)) / (2.0 * ht);
            const double h2 = fd_step2(t), hq2 = fd_step2(q);
            const double ctt = (c(q, t + h2) - 2.0 * c(q, t) + c(q, t - h2)) / (h2 * h2);
            const double cqt = (c(q + hq2, t + h2) - c(q + hq2, t - h2) - c(q - hq2, t + h2) + c(q - hq2, t - h2)) / (4.0 * hq2 * h2);
            record(r.dc_dq_strict, first, cq, cq > tol, q, t);
            record(r.dc_dq_weak, first, cq, cq >= -tol, q, t);
            record(r.dc_dtheta, first, ct, ct > tol, q, t);
            record(r.d2c_dtheta2, first, ctt, ctt >= -tol, q, t);
            record(r.d2c_dq_dtheta, first, cqt, cqt >= -tol, q, t);
            first = false;
        }
    }
    return r;
}

bool RiskCostReport::all_pass() const { return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }

bool RiskCostReport::all_pass_where_active() const {
    for (std::size_t i = 0; i < pass.size(); ++i)
        if (effort[i] > 0.0 && !pass[i]) return false;
    return true;
}

RiskCostReport risk_cost_condition(const CostModel& model, const TypeSchedule& schedule, const std::vector<double>& theta_grid,
                                  const GaussianPrior& prior) {
    RiskCostReport r;
    auto per_risk = [&](double t) {
        const double q = schedule(t);
        return model.marginal(q, t) / -agent_bayes_risk_dq(prior, q);
    };
    auto literal = [&](double t) { return model.marginal(schedule(t), t); };
    for (double t : theta_grid) {
        const double h = fd_step(t);
        const double d = (per_risk(t + h) - per_risk(t - h)) / (2.0 * h);
        const double dl = (literal(t + h) - literal(t - h)) / (2.0 * h);
        const double tol = 1e-6 * std::max(1.0, std::abs(per_risk(t)));
        const double tol_l = 1e-6 * std::max(1.0, std::abs(literal(t)));
        r.theta.push_back(t);
        r.effort.push_back(schedule(t));
        r.derivative.push_back(d);
        r.pass.push_back(d <= tol);
        r.literal_derivative.push_back(dl);
        r.literal_pass.push_back(dl <= tol_l);
    }
    return r;
}

}  // namespace cope
