#include "cope/benchmarks.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cope/numerics.hpp"

namespace cope {

namespace {
double bisect_decreasing(const ScalarFn& f, double lo, double hi) {
    auto tol = [](double l, double h) { return h - l <= 1e-15 * std::max(1.0, std::abs(h)); };
    auto [l, h] = boost::math::tools::bisect(f, lo, hi, tol);
    return 0.5 * (l + h);
}

// Positive root of K/(a + q)^2 = theta q.
double quadratic_foc_root(double K, double theta, double a) {
    if (!(K > 0.0)) return 0.0;
    const double hi = std::cbrt(K / theta);  // the root with a = 0 bounds it from above
    if (a == 0.0) return hi;
    return bisect_decreasing([&](double q) { return K / ((a + q) * (a + q)) - theta * q; }, 0.0, hi);
}
}  // namespace

CentralizedSolution centralized_efforts(std::span<const double> types, CostKind kind, double var0, const CostModel* general,
                                        const TieRule& tie) {
    if (types.empty()) throw DomainError("type vector is empty");
    CentralizedSolution sol;
    sol.efforts.assign(types.size(), 0.0);
    const double a = 1.0 / var0;
    switch (kind) {
        case CostKind::Linear: {
            const std::size_t w = linear_winner(types, tie);
            if (!(types[w] > 0.0)) throw DomainError("linear centralized effort needs theta > 0");
            sol.efforts[w] = std::max(1.0 / std::sqrt(types[w]) - a, 0.0);
            break;
        }
        case CostKind::Quadratic: {
            double s = 0.0;
            for (double t : types) {
                if (!(t > 0.0)) throw DomainError("quadratic centralized effort needs theta > 0");
                s += 1.0 / t;
            }
            sol.W_o = solve_cubic(a, s).W;
            for (std::size_t n = 0; n < types.size(); ++n) sol.efforts[n] = 1.0 / (types[n] * sol.W_o * sol.W_o);
            break;
        }
        case CostKind::General: {
            if (!general) throw DomainError("general centralized effort needs a cost model");
            GeneralSolverConfig cfg;
            cfg.virtual_costs = false;
            sol.efforts = solve_general(*general, CostTypeDistribution::uniform(0.0, 1.0), var0, types, cfg).q;
            break;
        }
    }
    return sol;
}

double network_profit(const GaussianPrior& prior, std::span<const double> types, std::span<const double> q,
                      const CostModel& model) {
    double c = 0.0;
    for (std::size_t n = 0; n < q.size(); ++n) c += model.total(q[n], types[n]);
    return -principal_bayes_risk(prior, q) - c;
}

HomogeneousContract homogeneous_contract(double td, int N, CostKind kind, double var0, const HomogeneousOptions& opts) {
    if (!(td > 0.0)) throw DomainError("theta dagger must be positive");
    if (N < 1) throw DomainError("n_agents must be >= 1");
    const double a = 1.0 / var0;
    HomogeneousContract c;
    c.theta_dagger = td;
    c.n_agents = N;
    c.kind = kind;
    if (kind == CostKind::Linear) {
        const double q = std::max((1.0 / std::sqrt(td) - a) / N, 0.0);
        c.q_dagger = q;
        c.beta = (a + q) * (a + q) * td;
        c.alpha = opts.linear_alpha == LinearAlpha::Standard ? (a + q) * td * q + td * q : (a + q) * td + td * q;
    } else if (kind == CostKind::Quadratic) {
        auto f = [&](double q) { return 1.0 / ((a + N * q) * (a + N * q)) - td * q; };
        const double hi = std::cbrt(1.0 / (static_cast<double>(N) * N * td));
        const double q = a == 0.0 ? hi : bisect_decreasing(f, 0.0, hi);
        c.q_dagger = q;
        c.alpha = (a + q) * td * q + 0.5 * td * q * q;
        c.beta = (a + q) * (a + q) * td * q;
    } else {
        throw DomainError("the homogeneous benchmark is defined for linear and quadratic costs");
    }
    return c;
}

HomogeneousResponse homogeneous_agent_response(double theta, const HomogeneousContract& c, double var0) {
    if (!(theta > 0.0)) throw DomainError("agent type must be positive");
    const double a = 1.0 / var0;
    HomogeneousResponse r;
    double cost = 0.0;
    if (c.kind == CostKind::Linear) {
        r.q = std::max(std::sqrt(c.beta / theta) - a, 0.0);
        cost = theta * r.q;
    } else {
        r.q = quadratic_foc_root(c.beta, theta, a);
        cost = 0.5 * theta * r.q * r.q;
    }
    r.expected_payoff = c.alpha - c.beta / (a + r.q) - cost;
    // The believed type breaks even up to rounding.
    r.participate = r.expected_payoff >= -1e-12 * std::max(1.0, c.alpha);
    if (!r.participate) r.q = 0.0;
    return r;
}

double homogeneous_believed_payoff(const HomogeneousContract& c, double var0) {
    const double a = 1.0 / var0;
    const double N = c.n_agents;
    return -1.0 / (a + N * c.q_dagger) - N * (c.alpha - c.beta / (a + c.q_dagger));
}

bool homogeneous_principal_abstains(const HomogeneousContract& c, double var0) {
    return homogeneous_believed_payoff(c, var0) < -var0;
}

double homogeneous_predict(const HomogeneousContract& c, std::span<const double> reports, const GaussianPrior& prior,
                           const HomogeneousOptions& opts) {
    const double qd = c.q_dagger;
    if (!(qd > 0.0) || reports.empty()) return prior.mu0;
    const double a = prior.precision();
    double sum_g = 0.0;
    for (double y : reports) sum_g += y + a * (y - prior.mu0) / qd;
    const double count = opts.count == ParticipantCount::All ? c.n_agents : static_cast<double>(reports.size());
    return (a * prior.mu0 + qd * sum_g) / (a + count * qd);
}

}  // namespace cope
