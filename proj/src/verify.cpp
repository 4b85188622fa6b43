#include "cope/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "cope/agent.hpp"
#include "cope/contracts.hpp"
#include "cope/cost.hpp"
#include "cope/cubic.hpp"
#include "cope/mechanism.hpp"
#include "cope/rng.hpp"

namespace cope {

bool SuiteReport::all_pass() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return r.gating && !r.pass; }));
}

void SuiteReport::print(std::ostream& os) const {
    os << "suite " << suite << ": " << rows.size() << " checks, " << failures() << " failed\n";
    os << std::left << std::setw(6) << "status" << "  " << std::setw(44) << "check" << std::right << std::setw(14) << "measured"
       << std::setw(12) << "tolerance" << std::setw(22) << "seed" << "  detail\n";
    for (const auto& r : rows) {
        const char* status = !r.gating ? "info" : (r.pass ? "PASS" : "FAIL");
        os << std::left << std::setw(6) << status << "  " << std::setw(44) << r.name << std::right << std::setw(14)
           << std::setprecision(6) << r.measured << std::setw(12) << std::setprecision(3) << r.tolerance << std::setw(22)
           << r.seed << "  " << r.detail << "\n";
    }
}

double cubic_root_bracketed(double a, double s) {
    const double c = std::cbrt(s);
    double lo = std::max(a, c), hi = a + c;
    auto f = [&](double w) { return w * w * (w - a) - s; };
    if (f(lo) >= 0.0) return lo;
    double w = hi;
    for (int i = 0; i < 200; ++i) {
        const double fw = f(w);
        if (fw == 0.0) return w;
        (fw > 0.0 ? hi : lo) = w;
        const double df = 3.0 * w * w - 2.0 * a * w;
        double next = df > 0.0 ? w - fw / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - w) <= 1e-16 * w || hi - lo <= 4e-16 * hi) return next;
        w = next;
    }
    return w;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string fmt_vec(const std::vector<double>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << std::setprecision(4) << v[i];
    os << "]";
    return os.str();
}

const char* cost_word(CostKind k) {
    switch (k) {
        case CostKind::Linear: return "linear";
        case CostKind::Quadratic: return "quadratic";
        case CostKind::General: return "general";
    }
    return "?";
}

double u01(std::uint64_t seed, std::uint64_t instance, std::uint64_t k) {
    return uniform01(RngKey{seed, instance, k, Purpose::Oracle});
}

Scenario base_scenario(CostKind kind, int n) {
    Scenario s;
    s.cost_kind = kind;
    s.n_agents = n;
    return s;
}

std::vector<double> random_types(const CostTypeDistribution& dist, std::uint64_t seed, std::uint64_t instance, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = draw_type(dist, seed, instance, i);
    return t;
}

}  // namespace

SuiteReport verify_cubic(const VerifyOptions& opts) {
    SuiteReport rep{"cubic", {}};
    double worst_res = 0.0, worst_gap = 0.0;
    std::string worst_res_at, worst_gap_at;
    std::uint64_t worst_res_seed = 0, worst_gap_seed = 0;
    for (int i = 0; i < opts.cubic_instances; ++i) {
        const auto inst = static_cast<std::uint64_t>(i);
        // Log-uniform a and s over many decades, with a = 0 now and then.
        const double a = u01(opts.seed, inst, 0) < 0.05 ? 0.0 : std::pow(10.0, -4.0 + 8.0 * u01(opts.seed, inst, 1));
        const double s = std::pow(10.0, -8.0 + 16.0 * u01(opts.seed, inst, 2));
        const auto sol = solve_cubic(a, s);
        const double res = cubic_residual(sol.W, a, s);
        const double ref = cubic_root_bracketed(a, s);
        const double gap = std::abs(sol.W - ref) / ref;
        if (res > worst_res) {
            worst_res = res;
            worst_res_at = "a=" + fmt(a) + " s=" + fmt(s);
            worst_res_seed = inst;
        }
        if (gap > worst_gap) {
            worst_gap = gap;
            worst_gap_at = "a=" + fmt(a) + " s=" + fmt(s);
            worst_gap_seed = inst;
        }
    }
    rep.rows.push_back({"residual, random (a, s)", worst_res, 1e-10, worst_res < 1e-10, worst_res_seed,
                        std::to_string(opts.cubic_instances) + " instances; worst " + worst_res_at});
    rep.rows.push_back({"root vs bracketed Newton", worst_gap, 1e-10, worst_gap < 1e-10, worst_gap_seed,
                        "relative gap; worst " + worst_gap_at});

    // Instances that arise in the mechanism: s = sum of 1/gamma over a type draw.
    const auto dist = CostTypeDistribution::uniform(0.0, 1.0);
    double worst_mech = 0.0;
    std::uint64_t worst_mech_seed = 0;
    for (int i = 0; i < opts.instances * 10; ++i) {
        const auto inst = static_cast<std::uint64_t>(i);
        const int n = 2 + static_cast<int>(u01(opts.seed + 1, inst, 99) * 18);
        const double var0 = std::pow(10.0, -2.0 + 4.0 * u01(opts.seed + 1, inst, 98));
        const auto types = random_types(dist, opts.seed + 1, inst, n);
        const auto sol = solve_W(types, dist, var0);
        double s = 0.0;
        for (double t : types) s += 1.0 / virtual_cost(dist, t);
        const double gap = std::abs(sol.W - cubic_root_bracketed(1.0 / var0, s)) / sol.W;
        const double res = cubic_residual(sol.W, 1.0 / var0, s);
        const double worst = std::max(gap, res);
        if (worst > worst_mech) {
            worst_mech = worst;
            worst_mech_seed = inst;
        }
    }
    rep.rows.push_back({"mechanism profiles", worst_mech, 1e-10, worst_mech < 1e-10, worst_mech_seed,
                        "max of residual and gap over uniform type draws"});
    return rep;
}

SuiteReport verify_closed_forms(const VerifyOptions& opts) {
    SuiteReport rep{"closed-forms", {}};
    const auto dist = CostTypeDistribution::uniform(0.0, 1.0);
    const double var0 = 1.0;
    const CostModel lin = CostModel::general([](double, double t) { return t; }, "theta");
    const CostModel quad = CostModel::general([](double q, double t) { return t * q; }, "theta*q");

    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic}) {
        const CostModel& model = kind == CostKind::Linear ? lin : quad;
        double worst_q = 0.0, worst_ks = 0.0;
        std::uint64_t seed_q = 0, seed_ks = 0;
        for (int i = 0; i < opts.closed_form_vectors; ++i) {
            const auto inst = static_cast<std::uint64_t>(i);
            const int n = 2 + static_cast<int>(u01(opts.seed, inst, 99) * 7);
            const auto types = random_types(dist, opts.seed, inst, n);
            const auto q_general = effort_general(model, dist, var0, types);
            const auto q_closed =
                kind == CostKind::Linear ? effort_linear(types, dist, var0) : effort_quadratic(types, dist, var0);
            for (int k = 0; k < n; ++k) {
                const double d = std::abs(q_general[k] - q_closed[k]);
                if (d > worst_q) {
                    worst_q = d;
                    seed_q = inst;
                }
            }
            const ProfileSchedule sched = [&](std::span<const double> r) { return effort_general(model, dist, var0, r); };
            const auto general = payment_rule_general(model, sched, dist, var0, types, 1e-8, false);
            const auto special =
                kind == CostKind::Linear ? payment_rule_linear(types, dist, var0) : payment_rule_quadratic(types, dist, var0);
            for (int k = 0; k < n; ++k) {
                const double dK = std::abs(general[k].K - special[k].K) / std::max(1.0, std::abs(special[k].K));
                const double dS = std::abs(general[k].S - special[k].S) / std::max(1.0, std::abs(special[k].S));
                if (std::max(dK, dS) > worst_ks) {
                    worst_ks = std::max(dK, dS);
                    seed_ks = inst;
                }
            }
        }
        const std::string tag = cost_word(kind);
        rep.rows.push_back({"general effort vs " + tag + " closed form", worst_q, 1e-6, worst_q < 1e-6, seed_q,
                            std::to_string(opts.closed_form_vectors) + " type vectors, max abs gap"});
        rep.rows.push_back({"general K, S vs " + tag + " payments", worst_ks, 1e-8, worst_ks < 1e-8, seed_ks,
                            "max relative gap"});

        // pi needs a schedule solve per quadrature node, so fewer vectors.
        double worst_pi = 0.0;
        std::uint64_t seed_pi = 0;
        const int n_pi = std::max(1, opts.closed_form_vectors / 10);
        for (int i = 0; i < n_pi; ++i) {
            const auto inst = static_cast<std::uint64_t>(1000 + i);
            const int n = 2 + static_cast<int>(u01(opts.seed, inst, 99) * 3);
            const auto types = random_types(dist, opts.seed, inst, n);
            const ProfileSchedule sched = [&](std::span<const double> r) { return effort_general(model, dist, var0, r); };
            const auto general = payment_rule_general(model, sched, dist, var0, types, 1e-9);
            const auto special =
                kind == CostKind::Linear ? payment_rule_linear(types, dist, var0) : payment_rule_quadratic(types, dist, var0);
            for (int k = 0; k < n; ++k) {
                const double d = std::abs(general[k].pi - special[k].pi) / std::max(1.0, std::abs(special[k].pi));
                if (d > worst_pi) {
                    worst_pi = d;
                    seed_pi = inst;
                }
            }
        }
        rep.rows.push_back({"general pi vs " + tag + " payments", worst_pi, 1e-6, worst_pi < 1e-6, seed_pi,
                            std::to_string(n_pi) + " type vectors, max relative gap"});
    }
    return rep;
}

SuiteReport verify_monotonicity(const VerifyOptions& opts) {
    SuiteReport rep{"monotonicity", {}};
    for (CostKind kind : opts.costs) {
        if (kind == CostKind::General) continue;
        const std::string tag = cost_word(kind);
        const CostModel& model = kind == CostKind::Linear ? scenario_cost(base_scenario(CostKind::Linear, 2))
                                                           : scenario_cost(base_scenario(CostKind::Quadratic, 2));
        const auto reg = check_regularity(model, {});
        rep.rows.push_back({tag + " regularity (weak)", reg.dc_dq_weak.worst, 1e-6, reg.weak_ok(), 0,
                            std::string("strict dc/dq > 0: ") + (reg.dc_dq_strict.pass ? "holds" : "fails")});

        int monotone_fail = 0, t3_fail = 0, checked = 0;
        double worst_t3 = -std::numeric_limits<double>::infinity();
        double min_ratio = std::numeric_limits<double>::infinity();
        std::uint64_t seed_mono = 0, seed_t3 = 0;
        for (int i = 0; i < opts.instances; ++i) {
            const auto inst = static_cast<std::uint64_t>(i);
            const int n = 2 + static_cast<int>(u01(opts.seed, inst, 99) * 5);
            const double var0 = std::pow(10.0, -1.0 + 2.0 * u01(opts.seed, inst, 98));
            Scenario s = base_scenario(kind, n);
            s.prior = GaussianPrior{0.0, var0};
            const auto mech = MechanismSpec::cope_for(kind);
            auto types = random_types(s.type_dist, opts.seed, inst, n);
            const ProfileSchedule sched = [&](std::span<const double> r) { return cope_efforts(mech, s, r); };
            for (int k = 0; k < n; ++k) {
                ++checked;
                if (!schedule_monotone(sched, types, k, s.type_dist)) {
                    ++monotone_fail;
                    seed_mono = inst;
                }
            }
            auto profile = types;
            const TypeSchedule own = [&](double t) {
                profile[0] = t;
                return cope_efforts(mech, s, profile)[0];
            };
            std::vector<double> grid;
            for (int j = 0; j < 60; ++j) grid.push_back(0.01 + 0.98 * j / 59.0);
            const auto t3 = risk_cost_condition(model, own, grid, s.prior);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (!(t3.effort[j] > 0.0)) continue;
                worst_t3 = std::max(worst_t3, t3.derivative[j]);
            }
            if (!t3.all_pass_where_active()) {
                ++t3_fail;
                seed_t3 = inst;
            }
            if (kind == CostKind::Quadratic) {
                const double a = s.prior.precision();
                for (double t : grid) {
                    const double h = fd_step(t), q = own(t);
                    const double dq = (own(t + h) - own(t - h)) / (2.0 * h);
                    min_ratio = std::min(min_ratio, -dq * t / (q + a));
                }
            }
        }
        rep.rows.push_back({tag + " schedule nonincreasing in own type", static_cast<double>(monotone_fail), 0.0,
                            monotone_fail == 0, seed_mono,
                            std::to_string(checked) + " agent sweeps of 200 points"});
        rep.rows.push_back({tag + " marginal cost per unit risk nonincreasing", worst_t3, 1e-6, t3_fail == 0, seed_t3,
                            "largest active derivative; " + std::to_string(t3_fail) + " failing profiles"});
        if (kind == CostKind::Quadratic)
            rep.rows.push_back({"quadratic -Q' theta/(Q + 1/var0) >= 1/2", min_ratio, 0.5, min_ratio >= 0.5, opts.seed,
                                "sufficient condition only; smallest ratio seen", false});
    }
    return rep;
}

SuiteReport verify_bic(const VerifyOptions& opts) {
    SuiteReport rep{"bic", {}};
    for (CostKind kind : opts.costs) {
        if (kind == CostKind::General) continue;
        const std::string tag = cost_word(kind);
        const auto mech = MechanismSpec::cope_for(kind);
        int type_fail = 0, effort_fail = 0, foc_fail = 0;
        double worst_gap_steps = 0.0, worst_effort = 0.0, worst_foc = 0.0;
        std::uint64_t seed_type = 0, seed_effort = 0, seed_foc = 0;
        std::string type_detail;
        for (int i = 0; i < opts.instances; ++i) {
            const auto inst = static_cast<std::uint64_t>(i);
            const int n = 2 + static_cast<int>(u01(opts.seed, inst, 99) * 3);
            Scenario s = base_scenario(kind, n);
            const double theta = 0.02 + 0.96 * u01(opts.seed, inst, 97);

            BestResponseConfig cfg;
            cfg.grid_points = opts.bic_grid;
            cfg.oracle.n_mc = opts.n_mc;
            cfg.oracle.seed = derive_seed(opts.seed, inst, 11);
            cfg.oracle.analytic_inner = true;
            const auto br = best_response_type(theta, mech, s, cfg);
            const double steps = std::abs(br.theta_hat - theta) / br.grid_step;
            if (!br.truthful_ok) {
                ++type_fail;
                seed_type = inst;
                type_detail = "theta=" + fmt(theta) + " best=" + fmt(br.theta_hat);
            }
            worst_gap_steps = std::max(worst_gap_steps, steps);

            // Effort under a truthful report against a random profile of others.
            auto profile = random_types(s.type_dist, derive_seed(opts.seed, inst, 12), 0, n);
            profile[0] = theta;
            const auto contract = offer_contract(mech, s, profile, 0);
            const double q_star = best_response_effort(theta, contract, s);
            const double rel = std::abs(q_star - contract.requested) / std::max(contract.requested, 1e-3);
            if (rel > worst_effort) {
                worst_effort = rel;
                seed_effort = inst;
            }
            if (rel > 1e-4) ++effort_fail;

            if (contract.requested > 0.0) {
                const CostModel& model = scenario_cost(s);
                auto pay = [&](double q) { return analytic_agent_payoff(contract.pay, q, theta, model, s.prior); };
                const double h = 1e-6 * std::max(1.0, contract.requested);
                const double d = std::abs(pay(contract.requested + h) - pay(contract.requested - h)) / (2.0 * h);
                if (d > worst_foc) {
                    worst_foc = d;
                    seed_foc = inst;
                }
                if (d > 1e-6) ++foc_fail;
            }
        }
        rep.rows.push_back({tag + " type report: truth in argmax band", static_cast<double>(type_fail), 0.0, type_fail == 0,
                            seed_type,
                            "failing instances of " + std::to_string(opts.instances) + "; argmax up to " +
                                fmt(worst_gap_steps) + " grid steps from truth on flat stretches" +
                                (type_fail ? "; failing " + type_detail : std::string())});
        rep.rows.push_back({tag + " effort: best response = requested", worst_effort, 1e-4, effort_fail == 0, seed_effort,
                            "relative gap"});
        rep.rows.push_back({tag + " effort first-order condition", worst_foc, 1e-6, foc_fail == 0, seed_foc,
                            "|d payoff / dq| at the requested effort"});
    }

    // The truthful observation report minimises the posterior expected loss.
    const GaussianPrior prior{0.3, 2.0};
    double worst_obs = 0.0;
    for (int i = 0; i < opts.instances; ++i) {
        const auto inst = static_cast<std::uint64_t>(i);
        const double y = -3.0 + 6.0 * u01(opts.seed, inst, 1);
        const double q = std::pow(10.0, -2.0 + 4.0 * u01(opts.seed, inst, 2));
        const double a = prior.precision();
        const double m = (a * prior.mu0 + q * y) / (a + q);
        const double report = truthful_report_obs(y, q, prior);
        double best = 0.0, best_loss = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 20000; ++j) {
            const double c = -4.0 + 8.0 * j / 20000.0;
            const double loss = (c - m) * (c - m) + 1.0 / (a + q);
            if (loss < best_loss) {
                best_loss = loss;
                best = c;
            }
        }
        worst_obs = std::max(worst_obs, std::abs(best - report));
    }
    rep.rows.push_back({"observation report minimises expected loss", worst_obs, 4e-4, worst_obs <= 4e-4, opts.seed,
                        "grid of step 4e-4 over [-4, 4]"});
    return rep;
}

SuiteReport verify_bir(const VerifyOptions& opts) {
    SuiteReport rep{"bir", {}};
    for (CostKind kind : opts.costs) {
        if (kind == CostKind::General) continue;
        const std::string tag = cost_word(kind);
        const auto mech = MechanismSpec::cope_for(kind);
        Scenario s = base_scenario(kind, 3);
        OracleConfig cfg;
        cfg.n_mc = opts.n_mc;
        cfg.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(kind), 21);
        cfg.analytic_inner = false;

        double worst_neg = -std::numeric_limits<double>::infinity(), worst_rent = 0.0;
        bool neg_ok = true, rent_ok = true;
        std::string neg_at, rent_at;
        std::vector<double> grid;
        const double lo = s.type_dist.lo(), hi = s.type_dist.hi();
        for (int j = 0; j < 10; ++j) grid.push_back(lo + (hi - lo) * (0.02 + 0.98 * j / 10.0));
        for (double theta : grid) {
            const auto e = interim_payoff(theta, theta, EffortPolicy::Requested, mech, s, cfg);
            const double band = 3.0 * e.se + 1e-12;
            const double neg = -e.mean / band;
            if (neg > worst_neg) worst_neg = neg;
            if (e.mean < -band) {
                neg_ok = false;
                neg_at = "theta=" + fmt(theta);
            }
            const double rent = information_rent(theta, mech, s);
            const double z = std::abs(e.mean - rent) / band;
            if (z > worst_rent) {
                worst_rent = z;
                rent_at = "theta=" + fmt(theta) + " mc=" + fmt(e.mean) + " rent=" + fmt(rent);
            }
            if (std::abs(e.mean - rent) > band) rent_ok = false;
        }
        rep.rows.push_back({tag + " interim payoff >= -3 SE", worst_neg, 1.0, neg_ok, cfg.seed,
                            "worst -mean/(3 SE) over " + fmt_vec(grid) + (neg_ok ? "" : "; fails at " + neg_at)});
        const auto top = interim_payoff(hi, hi, EffortPolicy::Requested, mech, s, cfg);
        const double top_z = std::abs(top.mean) / (3.0 * top.se + 1e-12);
        rep.rows.push_back({tag + " interim payoff at top type = 0", top_z, 1.0, top_z <= 1.0, cfg.seed,
                            "mean " + fmt(top.mean) + ", SE " + fmt(top.se)});
        rep.rows.push_back({tag + " interim payoff = information rent", worst_rent, 1.0, rent_ok, cfg.seed,
                            "worst |mc - rent|/(3 SE) at " + rent_at});
    }
    return rep;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"bic", "bir", "monotonicity", "cubic", "closed-forms"};
    return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
    if (name == "bic") return verify_bic(opts);
    if (name == "bir") return verify_bir(opts);
    if (name == "monotonicity") return verify_monotonicity(opts);
    if (name == "cubic") return verify_cubic(opts);
    if (name == "closed-forms") return verify_closed_forms(opts);
    throw DomainError("unknown suite: " + name);
}

}  // namespace cope
