#include "cope/contracts.hpp"

#include <cmath>
#include <numeric>

#include "cope/numerics.hpp"

namespace cope {

MechanismSpec MechanismSpec::cope_for(CostKind kind) {
    switch (kind) {
        case CostKind::Linear: return {MechanismKind::CopeLinear, 0.0};
        case CostKind::Quadratic: return {MechanismKind::CopeQuadratic, 0.0};
        case CostKind::General: return {MechanismKind::CopeGeneral, 0.0};
    }
    return {};
}

std::string MechanismSpec::family() const {
    switch (kind) {
        case MechanismKind::Centralized: return "centralized";
        case MechanismKind::Homogeneous: return "homogeneous";
        default: return "cope";
    }
}

const CostModel& scenario_cost(const Scenario& s) {
    static const CostModel lin = CostModel::linear();
    static const CostModel quad = CostModel::quadratic();
    switch (s.cost_kind) {
        case CostKind::Linear: return lin;
        case CostKind::Quadratic: return quad;
        case CostKind::General: break;
    }
    if (!s.general_cost) throw DomainError("general cost kind needs a cost model");
    return *s.general_cost;
}

namespace {
void check_pairing(const MechanismSpec& m, const Scenario& s) {
    const bool ok = (m.kind == MechanismKind::CopeLinear && s.cost_kind == CostKind::Linear) ||
                    (m.kind == MechanismKind::CopeQuadratic && s.cost_kind == CostKind::Quadratic) ||
                    (m.kind == MechanismKind::CopeGeneral) || m.kind == MechanismKind::Centralized ||
                    (m.kind == MechanismKind::Homogeneous && s.cost_kind != CostKind::General);
    if (!ok) throw DomainError("mechanism does not match the scenario's cost family");
}

ProfileSchedule general_schedule(const Scenario& s, const MechanismOptions& opts) {
    const CostModel& model = scenario_cost(s);
    return [&model, &s, opts](std::span<const double> r) {
        return effort_general(model, s.type_dist, s.prior.var0, r, opts.general);
    };
}

LinearOptions linear_opts(const MechanismOptions& opts, std::uint64_t tie_seed) {
    LinearOptions lo;
    lo.tie = {opts.tie, tie_seed};
    lo.pi_rule = opts.linear_pi;
    lo.abs_tol = opts.quad_tol;
    return lo;
}
}  // namespace

std::vector<double> cope_efforts(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports,
                                 const MechanismOptions& opts, std::uint64_t tie_seed) {
    check_pairing(mech, s);
    switch (mech.kind) {
        case MechanismKind::CopeLinear: return effort_linear(reports, s.type_dist, s.prior.var0, {opts.tie, tie_seed});
        case MechanismKind::CopeQuadratic: return effort_quadratic(reports, s.type_dist, s.prior.var0);
        case MechanismKind::CopeGeneral: return general_schedule(s, opts)(reports);
        default: throw DomainError("cope_efforts needs a COPE mechanism");
    }
}

std::vector<AgentContract> offer_contracts(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports,
                                           const MechanismOptions& opts, std::uint64_t tie_seed) {
    check_pairing(mech, s);
    std::vector<AgentContract> out(reports.size());
    switch (mech.kind) {
        case MechanismKind::CopeLinear: {
            const auto q = effort_linear(reports, s.type_dist, s.prior.var0, {opts.tie, tie_seed});
            const auto rule = payment_rule_linear(reports, s.type_dist, s.prior.var0, linear_opts(opts, tie_seed));
            for (std::size_t n = 0; n < out.size(); ++n) out[n] = {rule[n], q[n]};
            return out;
        }
        case MechanismKind::CopeQuadratic: {
            const auto q = effort_quadratic(reports, s.type_dist, s.prior.var0);
            const auto rule = payment_rule_quadratic(reports, s.type_dist, s.prior.var0, opts.quad_tol);
            for (std::size_t n = 0; n < out.size(); ++n) out[n] = {rule[n], q[n]};
            return out;
        }
        case MechanismKind::CopeGeneral: {
            const auto sched = general_schedule(s, opts);
            const auto q = sched(reports);
            const auto rule = payment_rule_general(scenario_cost(s), sched, s.type_dist, s.prior.var0, reports);
            for (std::size_t n = 0; n < out.size(); ++n) out[n] = {rule[n], q[n]};
            return out;
        }
        case MechanismKind::Homogeneous: {
            const auto c = homogeneous_contract(mech.theta_dagger, static_cast<int>(reports.size()), s.cost_kind, s.prior.var0,
                                                opts.homogeneous);
            for (auto& a : out) a = {c.payment(), c.q_dagger};
            return out;
        }
        case MechanismKind::Centralized: break;
    }
    throw DomainError("the centralized benchmark offers no contracts");
}

AgentContract offer_contract(const MechanismSpec& mech, const Scenario& s, std::span<const double> reports, std::size_t n,
                             const MechanismOptions& opts, std::uint64_t tie_seed) {
    if (n >= reports.size()) throw DomainError("agent index out of range");
    if (mech.kind == MechanismKind::CopeLinear) {
        check_pairing(mech, s);
        // Losers get nothing; skip the winner's quadrature.
        if (linear_winner(reports, {opts.tie, tie_seed}) != n) return {};
    }
    if (mech.kind != MechanismKind::CopeQuadratic) return offer_contracts(mech, s, reports, opts, tie_seed)[n];
    check_pairing(mech, s);
    AgentContract c;
    c.pay = quadratic_payment(reports, n, s.type_dist, s.prior.var0, opts.quad_tol);
    c.requested = quadratic_effort_given_rest(s.type_dist, s.prior.var0, reports[n], [&] {
        double rest = 0.0;
        for (std::size_t m = 0; m < reports.size(); ++m)
            if (m != n) rest += 1.0 / virtual_cost(s.type_dist, reports[m]);
        return rest;
    }());
    return c;
}

}  // namespace cope
