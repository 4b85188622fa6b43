#include "cope/agent.hpp"

#include <algorithm>
#include <cmath>

#include "cope/rng.hpp"

namespace cope {

double truthful_report_obs(double y, double q, const GaussianPrior& prior) {
    if (q < 0.0) throw DomainError("effort must be nonnegative");
    if (q == 0.0) return prior.mu0;
    const double a = prior.precision();
    return (a * prior.mu0 + q * y) / (a + q);
}

double analytic_agent_payoff(const Payment& pay, double q, double theta, const CostModel& model, const GaussianPrior& prior) {
    return pay.expected(agent_bayes_risk(prior, q)) - model.total(q, theta);
}

double optimal_effort(const Payment& pay, double theta, const CostModel& model, const GaussianPrior& prior) {
    const double a = prior.precision();
    const double K = pay.K;
    if (!(K > 0.0)) return 0.0;
    if (!(theta > 0.0)) throw DomainError("agent type must be positive");
    switch (model.kind()) {
        case CostKind::Linear: return std::max(std::sqrt(K / theta) - a, 0.0);
        case CostKind::Quadratic: {
            const double hi = std::cbrt(K / theta);
            if (a == 0.0) return hi;
            return find_root([&](double q) { return K / ((a + q) * (a + q)) - theta * q; }, 0.0, hi);
        }
        case CostKind::General: break;
    }
    auto foc = [&](double q) { return K / ((a + q) * (a + q)) - model.marginal(q, theta); };
    const double lo = a > 0.0 ? 0.0 : 1e-300;
    return find_root_decreasing(foc, lo, 1.0);
}

double best_response_effort(double theta, const AgentContract& contract, const Scenario& s, const EffortSearch& cfg) {
    const CostModel& model = scenario_cost(s);
    auto payoff = [&](double q) { return analytic_agent_payoff(contract.pay, q, theta, model, s.prior); };
    double q_max = cfg.q_max > 0.0 ? cfg.q_max : 10.0 * (1.0 + contract.requested);
    for (int i = 0; i < 30; ++i) {
        const auto best = maximize_scalar(payoff, 0.0, q_max, cfg.bits);
        if (cfg.q_max > 0.0 || best.x < 0.99 * q_max) return best.x;
        q_max *= 4.0;
    }
    throw SolverError("best_response_effort: payoff keeps increasing in effort");
}

std::vector<double> interim_payoff_draws(double theta, double theta_hat, EffortPolicy policy, const MechanismSpec& mech,
                                         const Scenario& s, const OracleConfig& cfg) {
    s.validate();
    const CostModel& model = scenario_cost(s);
    const int N = s.n_agents;
    std::vector<double> profile(N), out(cfg.n_mc);
    profile[0] = theta_hat;
    const double sd = std::sqrt(s.prior.var0);
    for (std::uint64_t i = 0; i < cfg.n_mc; ++i) {
        for (int m = 1; m < N; ++m) profile[m] = draw_type(s.type_dist, cfg.seed, i, m);
        const AgentContract c = offer_contract(mech, s, profile, 0, cfg.mech, derive_seed(cfg.seed, i, 7));
        const double q = policy == EffortPolicy::Optimal ? optimal_effort(c.pay, theta, model, s.prior) : c.requested;
        const double expected = analytic_agent_payoff(c.pay, q, theta, model, s.prior);
        if (mech.kind == MechanismKind::Homogeneous && expected < 0.0) {
            out[i] = 0.0;
            continue;
        }
        if (cfg.analytic_inner) {
            out[i] = expected;
            continue;
        }
        const double x = s.prior.mu0 + sd * standard_normal(RngKey{cfg.seed, i, 0, Purpose::World});
        const auto y = observation_from_noise(x, q, standard_normal(RngKey{cfg.seed, i, 0, Purpose::Noise}));
        const double y_hat = y ? truthful_report_obs(*y, q, s.prior) : s.prior.mu0;
        out[i] = c.pay.realized(x, y_hat) - model.total(q, theta);
    }
    return out;
}

Estimate interim_payoff(double theta, double theta_hat, EffortPolicy policy, const MechanismSpec& mech, const Scenario& s,
                        const OracleConfig& cfg) {
    Welford w;
    for (double v : interim_payoff_draws(theta, theta_hat, policy, mech, s, cfg)) w.add(v);
    return w.estimate();
}

namespace {
double mean_of(const std::vector<double>& v) {
    Welford w;
    for (double x : v) w.add(x);
    return w.mean();
}
}  // namespace

BestResponseType best_response_type(double theta, const MechanismSpec& mech, const Scenario& s, const BestResponseConfig& cfg) {
    if (cfg.grid_points < 2) throw DomainError("grid needs at least two points");
    const double base = s.type_dist.lo(), hi = s.type_dist.hi();
    const double lo = base + kTypeFloor;
    BestResponseType r;
    r.grid_step = (hi - base) / (cfg.grid_points - 1);

    auto eval = [&](double th) { return interim_payoff_draws(theta, th, EffortPolicy::Optimal, mech, s, cfg.oracle); };
    const auto truth = eval(theta);
    r.payoff_truth = mean_of(truth);

    std::vector<double> best_draws;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    auto consider = [&](double th) {
        auto d = eval(th);
        const double m = mean_of(d);
        r.candidates.push_back(th);
        r.payoffs.push_back(m);
        if (m > best) {
            best = m;
            best_idx = r.candidates.size() - 1;
            best_draws = std::move(d);
        }
    };
    for (int k = 0; k < cfg.grid_points; ++k) consider(std::clamp(base + k * r.grid_step, lo, hi));
    if (cfg.refine) {
        const double centre = r.candidates[best_idx];
        for (int j = -10; j <= 10; ++j) {
            if (j == 0) continue;
            const double th = centre + j * r.grid_step / 10.0;
            if (th < lo || th > hi) continue;
            consider(th);
        }
    }
    r.theta_hat = r.candidates[best_idx];
    r.payoff_max = best;
    const double tie_tol = 1e-12 * (1.0 + std::abs(best));
    for (std::size_t i = 0; i < r.candidates.size(); ++i)
        if (r.payoffs[i] >= best - tie_tol) r.argmax_set.push_back(r.candidates[i]);
    std::sort(r.argmax_set.begin(), r.argmax_set.end());

    Welford diff;
    for (std::size_t i = 0; i < truth.size(); ++i) diff.add(best_draws[i] - truth[i]);
    r.se_gap = diff.se();
    r.truthful_ok = std::abs(r.theta_hat - theta) <= r.grid_step * (1.0 + 1e-9) ||
                    r.payoff_truth >= r.payoff_max - cfg.se_band * r.se_gap - tie_tol;
    return r;
}

double information_rent(double theta, const MechanismSpec& mech, const Scenario& s, int gl_points) {
    const auto& dist = s.type_dist;
    const int others = s.n_agents - 1;
    if (mech.kind == MechanismKind::CopeLinear) {
        // Q(z, theta_-n) = Q1(z) exactly when every other report exceeds z.
        auto integrand = [&](double z) {
            return linear_winner_effort(dist, s.prior.var0, z) * std::pow(1.0 - dist.cdf(z), others);
        };
        double upper = dist.hi();
        const double a = s.prior.precision();
        if (a > 0.0 && theta < upper && linear_winner_effort(dist, s.prior.var0, upper) == 0.0) {
            if (linear_winner_effort(dist, s.prior.var0, theta) == 0.0) return 0.0;
            upper = find_root([&](double z) { return virtual_cost(dist, z) - 1.0 / (a * a); }, theta, upper);
        }
        return integrate(integrand, theta, upper, 1e-12);
    }
    if (mech.kind == MechanismKind::CopeQuadratic) {
        if (others > 4) throw DomainError("the quadratic rent oracle supports at most 5 agents");
        // Composite Gauss-Legendre over each other type, weighted by the density.
        const double lo = dist.lo(), hi = dist.hi();
        const double cut = lo + 0.1 * (hi - lo);
        std::vector<double> nodes, weights;
        for (auto [l, h] : {std::pair{lo, cut}, std::pair{cut, hi}}) {
            const auto rule = gauss_legendre(gl_points, l, h);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                nodes.push_back(1.0 / virtual_cost(dist, rule.nodes[i]));
                weights.push_back(rule.weights[i] * dist.pdf(rule.nodes[i]));
            }
        }
        std::vector<std::pair<double, double>> rest{{0.0, 1.0}};
        for (int k = 0; k < others; ++k) {
            std::vector<std::pair<double, double>> next;
            next.reserve(rest.size() * nodes.size());
            for (auto [sum, w] : rest)
                for (std::size_t i = 0; i < nodes.size(); ++i) next.emplace_back(sum + nodes[i], w * weights[i]);
            rest = std::move(next);
        }
        auto integrand = [&](double z) {
            double e = 0.0;
            for (auto [sum, w] : rest) {
                const double q = quadratic_effort_given_rest(dist, s.prior.var0, z, sum);
                e += w * q * q;
            }
            return 0.5 * e;
        };
        return integrate(integrand, theta, dist.hi(), 1e-10);
    }
    throw DomainError("information_rent is available for linear and quadratic COPE");
}

}  // namespace cope
