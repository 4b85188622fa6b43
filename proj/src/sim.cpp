#include "cope/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "cope/rng.hpp"

namespace cope {

namespace {
constexpr std::uint64_t kBlock = 256;

const char* cost_name(CostKind k) {
    switch (k) {
        case CostKind::Linear: return "linear";
        case CostKind::Quadratic: return "quadratic";
        default: return "general";
    }
}
}  // namespace

std::uint64_t trial_seed(std::uint64_t master, int n_agents, std::uint64_t trial) {
    return derive_seed(master, static_cast<std::uint64_t>(n_agents), trial);
}

double normalize_payoff(double raw, const GaussianPrior& prior) { return raw / prior.var0; }

int default_parallelism() {
    if (const char* env = std::getenv("COPE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

TrialRecord run_trial(const Scenario& s, const MechanismSpec& mech, AgentMode mode, std::uint64_t seed,
                      const TrialOptions& opts, const std::vector<double>* types) {
    s.validate();
    const int N = s.n_agents;
    const CostModel& model = scenario_cost(s);
    const GaussianPrior& prior = s.prior;
    TrialRecord r;
    World w = draw_world(s, seed);
    r.x = w.x;
    r.types = types ? *types : w.types;
    if (static_cast<int>(r.types.size()) != N) throw DomainError("type vector length differs from n_agents");

    r.reported_types = r.types;
    const bool strategic = mode == AgentMode::BestResponse && mech.kind != MechanismKind::Centralized &&
                           mech.kind != MechanismKind::Homogeneous;
    if (strategic) {
        for (int n = 0; n < N; ++n) {
            auto cfg = opts.best_response;
            cfg.oracle.mech = opts.mech;
            cfg.oracle.seed = derive_seed(seed, n, 11);
            r.reported_types[n] = best_response_type(r.types[n], mech, s, cfg).theta_hat;
        }
    }

    r.requested.assign(N, 0.0);
    r.efforts.assign(N, 0.0);
    r.payments.assign(N, 0.0);
    r.participating.assign(N, false);
    std::vector<AgentContract> contracts;
    bool abstain = false;
    HomogeneousContract hom;

    switch (mech.kind) {
        case MechanismKind::Centralized: {
            const auto sol = centralized_efforts(r.types, s.cost_kind, prior.var0, s.general_cost.get(),
                                                 {opts.mech.tie, derive_seed(seed, 0, 13)});
            r.requested = sol.efforts;
            r.efforts = sol.efforts;
            for (int n = 0; n < N; ++n) r.participating[n] = r.efforts[n] > 0.0;
            break;
        }
        case MechanismKind::Homogeneous: {
            hom = homogeneous_contract(mech.theta_dagger, N, s.cost_kind, prior.var0, opts.mech.homogeneous);
            abstain = homogeneous_principal_abstains(hom, prior.var0);
            r.requested.assign(N, abstain ? 0.0 : hom.q_dagger);
            if (!abstain) {
                for (int n = 0; n < N; ++n) {
                    const auto resp = homogeneous_agent_response(r.types[n], hom, prior.var0);
                    r.participating[n] = resp.participate;
                    r.efforts[n] = resp.q;
                }
            }
            break;
        }
        default: {
            contracts = offer_contracts(mech, s, r.reported_types, opts.mech, derive_seed(seed, 0, 13));
            for (int n = 0; n < N; ++n) {
                r.requested[n] = contracts[n].requested;
                r.efforts[n] = mode == AgentMode::Truthful ? contracts[n].requested
                                                           : optimal_effort(contracts[n].pay, r.types[n], model, prior);
                r.participating[n] = true;
            }
            break;
        }
    }

    r.observations.assign(N, std::numeric_limits<double>::quiet_NaN());
    r.reports.assign(N, prior.mu0);
    for (int n = 0; n < N; ++n) {
        const double z = standard_normal(RngKey{seed, 0, static_cast<std::uint64_t>(n), Purpose::Noise});
        const auto y = observation_from_noise(r.x, r.efforts[n], z);
        if (y) {
            r.observations[n] = *y;
            r.reports[n] = truthful_report_obs(*y, r.efforts[n], prior);
        }
    }

    switch (mech.kind) {
        case MechanismKind::Centralized: {
            std::vector<Observation> obs;
            for (int n = 0; n < N; ++n)
                if (r.efforts[n] > 0.0) obs.push_back({r.observations[n], r.efforts[n]});
            r.prediction = posterior_mean_var(prior, obs).mean;
            break;
        }
        case MechanismKind::Homogeneous: {
            std::vector<double> part;
            for (int n = 0; n < N; ++n)
                if (r.participating[n]) part.push_back(r.reports[n]);
            r.prediction = abstain ? prior.mu0 : homogeneous_predict(hom, part, prior, opts.mech.homogeneous);
            for (int n = 0; n < N; ++n)
                if (r.participating[n]) r.payments[n] = hom.payment().realized(r.x, r.reports[n]);
            break;
        }
        default: {
            r.prediction = predict(prior, r.reports, r.requested);
            for (int n = 0; n < N; ++n) r.payments[n] = contracts[n].pay.realized(r.x, r.reports[n]);
            break;
        }
    }

    const double err = r.x - r.prediction;
    r.prediction_sq_error = err * err;
    double paid = 0.0, cost = 0.0;
    for (int n = 0; n < N; ++n) {
        paid += r.payments[n];
        cost += model.total(r.efforts[n], r.types[n]);
    }
    r.principal_payoff = -r.prediction_sq_error - paid;
    r.network_profit = -r.prediction_sq_error - cost;
    r.bayes_risk = principal_bayes_risk(prior, r.requested);
    if (!std::isfinite(r.principal_payoff) || !std::isfinite(r.network_profit))
        throw SolverError("trial produced a non-finite payoff");
    return r;
}

namespace {

struct CellAccumulators {
    std::vector<std::vector<Welford>> by_mech;  // [mechanism][metric]
};

void accumulate(std::vector<Welford>& acc, const TrialRecord& r, const GaussianPrior& prior) {
    double paid = 0.0;
    int active = 0;
    for (std::size_t n = 0; n < r.payments.size(); ++n) {
        paid += r.payments[n];
        if (r.efforts[n] > 0.0) ++active;
    }
    acc[0].add(normalize_payoff(r.principal_payoff, prior));
    acc[1].add(normalize_payoff(r.network_profit, prior));
    acc[2].add(normalize_payoff(r.prediction_sq_error, prior));
    acc[3].add(normalize_payoff(r.bayes_risk, prior));
    acc[4].add(normalize_payoff(paid, prior));
    acc[5].add(static_cast<double>(active));
}

MechanismSpec adapt(const MechanismSpec& m, CostKind cost) {
    if (m.family() == "cope") return MechanismSpec::cope_for(cost);
    return m;
}

}  // namespace

std::vector<ExperimentResult> run_experiment(const ExperimentSpec& spec) {
    if (spec.n_trials < 1) throw DomainError("n_trials must be >= 1");
    if (spec.mechanisms.empty()) throw DomainError("no mechanisms requested");
    std::vector<ExperimentResult> results;
    const std::size_t n_metrics = metric_names().size();
    const int threads = std::max(1, spec.parallelism);

    for (CostKind cost : spec.costs) {
        for (int N : spec.n_values) {
            Scenario s = spec.base;
            s.cost_kind = cost;
            s.n_agents = N;
            s.validate();
            std::vector<MechanismSpec> mechs;
            for (const auto& m : spec.mechanisms) mechs.push_back(adapt(m, cost));

            std::vector<double> fixed;
            if (spec.fixed_types)
                for (int n = 0; n < N; ++n) fixed.push_back(draw_type(s.type_dist, spec.seed, 0xf1edULL, n));

            const std::uint64_t n_blocks = (spec.n_trials + kBlock - 1) / kBlock;
            std::vector<CellAccumulators> blocks(n_blocks);
            std::atomic<std::uint64_t> next{0};
            std::atomic<bool> failed{false};
            std::mutex err_mu;
            std::uint64_t err_block = std::numeric_limits<std::uint64_t>::max();
            std::string err_msg;

            auto worker = [&] {
                for (;;) {
                    const std::uint64_t b = next.fetch_add(1);
                    if (b >= n_blocks || failed.load()) return;
                    auto& acc = blocks[b].by_mech;
                    acc.assign(mechs.size(), std::vector<Welford>(n_metrics));
                    const std::uint64_t end = std::min(spec.n_trials, (b + 1) * kBlock);
                    for (std::uint64_t t = b * kBlock; t < end; ++t) {
                        const std::uint64_t seed = trial_seed(spec.seed, N, t);
                        for (std::size_t k = 0; k < mechs.size(); ++k) {
                            try {
                                const auto rec = run_trial(s, mechs[k], spec.mode, seed, spec.options,
                                                           spec.fixed_types ? &fixed : nullptr);
                                accumulate(acc[k], rec, s.prior);
                            } catch (const std::exception& e) {
                                std::lock_guard<std::mutex> lk(err_mu);
                                if (b < err_block) {
                                    err_block = b;
                                    std::ostringstream os;
                                    os << "trial " << t << " (N=" << N << ", cost=" << cost_name(cost)
                                       << ", mechanism=" << mechs[k].family() << ", seed=" << seed << "): " << e.what();
                                    err_msg = os.str();
                                }
                                failed = true;
                                return;
                            }
                        }
                    }
                }
            };
            if (threads == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }
            if (failed) throw SolverError("experiment aborted: " + err_msg);

            for (std::size_t k = 0; k < mechs.size(); ++k) {
                std::vector<Welford> total(n_metrics);
                for (const auto& blk : blocks)
                    for (std::size_t m = 0; m < n_metrics; ++m) total[m].merge(blk.by_mech[k][m]);
                ExperimentResult res;
                res.mechanism = mechs[k];
                res.cost = cost;
                res.n_agents = N;
                res.n_trials = spec.n_trials;
                for (std::size_t m = 0; m < n_metrics; ++m) res.metrics[metric_names()[m]] = total[m].estimate();
                results.push_back(std::move(res));
            }
            if (spec.progress) {
                std::ostringstream os;
                os << "cell cost=" << cost_name(cost) << " N=" << N << " done (" << spec.n_trials << " trials)";
                spec.progress(os.str());
            }
        }
    }
    return results;
}

}  // namespace cope
