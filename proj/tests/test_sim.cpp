#include <doctest.h>

#include <cmath>
#include <vector>

#include "cope/benchmarks.hpp"
#include "cope/cost.hpp"
#include "cope/rng.hpp"
#include "cope/sim.hpp"

using namespace cope;

namespace {
Scenario scenario(CostKind kind, int n, double var0 = 1.0) {
    Scenario s;
    s.prior = GaussianPrior{0.0, var0};
    s.n_agents = n;
    s.cost_kind = kind;
    return s;
}

int nonzero(const std::vector<double>& v) {
    int k = 0;
    for (double x : v) k += x != 0.0;
    return k;
}

ExperimentSpec small_spec(int parallelism) {
    ExperimentSpec spec;
    spec.costs = {CostKind::Linear, CostKind::Quadratic};
    spec.n_values = {3, 6};
    spec.mechanisms = {MechanismSpec::cope_for(CostKind::Linear), MechanismSpec::centralized(),
                       MechanismSpec::homogeneous(0.5)};
    spec.n_trials = 700;
    spec.seed = 99;
    spec.parallelism = parallelism;
    return spec;
}
}  // namespace

TEST_CASE("linear COPE trial recruits one agent") {
    const auto s = scenario(CostKind::Linear, 5);
    int recruited = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = run_trial(s, MechanismSpec::cope_for(CostKind::Linear), AgentMode::Truthful, seed);
        CHECK(nonzero(r.efforts) <= 1);
        CHECK(nonzero(r.payments) == nonzero(r.efforts));
        recruited += nonzero(r.efforts);
    }
    CHECK(recruited > 100);
}

TEST_CASE("quadratic COPE trial recruits every agent") {
    const auto s = scenario(CostKind::Quadratic, 5);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto r = run_trial(s, MechanismSpec::cope_for(CostKind::Quadratic), AgentMode::Truthful, seed);
        for (double q : r.efforts) CHECK(q > 0.0);
    }
}

TEST_CASE("trial record bookkeeping") {
    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic}) {
        const auto s = scenario(kind, 4);
        const auto model = kind == CostKind::Linear ? CostModel::linear() : CostModel::quadratic();
        for (const auto& mech : {MechanismSpec::cope_for(kind), MechanismSpec::centralized(), MechanismSpec::homogeneous(0.2)}) {
            const auto r = run_trial(s, mech, AgentMode::Truthful, 12);
            double paid = 0.0, cost = 0.0;
            for (std::size_t n = 0; n < r.types.size(); ++n) {
                paid += r.payments[n];
                cost += model.total(r.efforts[n], r.types[n]);
            }
            const double err = (r.x - r.prediction) * (r.x - r.prediction);
            CHECK(r.prediction_sq_error == doctest::Approx(err));
            CHECK(r.principal_payoff == doctest::Approx(-err - paid));
            CHECK(r.network_profit == doctest::Approx(-err - cost));
        }
    }
}

TEST_CASE("centralized trials pay nothing and dominate COPE in expected network profit") {
    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic}) {
        const auto s = scenario(kind, 6);
        const auto model = kind == CostKind::Linear ? CostModel::linear() : CostModel::quadratic();
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto c = run_trial(s, MechanismSpec::centralized(), AgentMode::Truthful, seed);
            const auto p = run_trial(s, MechanismSpec::cope_for(kind), AgentMode::Truthful, seed);
            for (double pay : c.payments) CHECK(pay == 0.0);
            REQUIRE(c.types == p.types);
            CHECK(c.x == p.x);
            CHECK(network_profit(s.prior, c.types, c.efforts, model) >=
                  network_profit(s.prior, p.types, p.efforts, model) - 1e-12);
        }
    }
}

TEST_CASE("homogeneous agents of the believed type exert q-dagger") {
    const auto s = scenario(CostKind::Quadratic, 3);
    const std::vector<double> types(3, 0.8);
    const auto r = run_trial(s, MechanismSpec::homogeneous(0.8), AgentMode::Truthful, 5, {}, &types);
    const auto c = homogeneous_contract(0.8, 3, CostKind::Quadratic, 1.0);
    for (double q : r.efforts) CHECK(q == doctest::Approx(c.q_dagger).epsilon(1e-10));

    TrialOptions even;
    even.mech.homogeneous.linear_alpha = LinearAlpha::BreakEven;
    const auto sl = scenario(CostKind::Linear, 3);
    const std::vector<double> cheap(3, 0.2);
    const auto rl = run_trial(sl, MechanismSpec::homogeneous(0.2), AgentMode::Truthful, 5, even, &cheap);
    const auto cl = homogeneous_contract(0.2, 3, CostKind::Linear, 1.0, even.mech.homogeneous);
    for (double q : rl.efforts) CHECK(q == doctest::Approx(cl.q_dagger).epsilon(1e-10));
}

TEST_CASE("payoff normalisation") {
    CHECK(normalize_payoff(-0.7, GaussianPrior{0.0, 1.0}) == -0.7);
    CHECK(normalize_payoff(0.0, GaussianPrior{0.0, 3.0}) == 0.0);
    // No action: predict mu0, pay nothing. Expected loss var0 normalises to -1.
    for (double var0 : {0.5, 4.0}) {
        const GaussianPrior prior{1.0, var0};
        Welford w;
        for (std::uint64_t i = 0; i < 20000; ++i) {
            const double x = prior.mu0 + std::sqrt(var0) * standard_normal(RngKey{4, i, 0, Purpose::World});
            w.add(normalize_payoff(-(x - prior.mu0) * (x - prior.mu0), prior));
        }
        const auto e = w.estimate();
        CHECK(std::abs(e.mean + 1.0) <= 3.0 * e.se);
    }
}

TEST_CASE("single trial experiment has zero standard error") {
    auto spec = small_spec(1);
    spec.n_trials = 1;
    spec.n_values = {4};
    spec.costs = {CostKind::Linear};
    const auto res = run_experiment(spec);
    REQUIRE(!res.empty());
    const auto& cell = res.front();
    const auto r = run_trial(scenario(CostKind::Linear, 4), cell.mechanism, AgentMode::Truthful, trial_seed(99, 4, 0));
    CHECK(cell.metrics.at("principal_payoff").mean == r.principal_payoff);
    for (const auto& [name, e] : cell.metrics) CHECK(e.se == 0.0);
}

TEST_CASE("experiments are deterministic and thread-count independent") {
    const auto a = run_experiment(small_spec(1));
    const auto b = run_experiment(small_spec(1));
    const auto c = run_experiment(small_spec(3));
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const auto& [name, e] : a[i].metrics) {
            CHECK(e.mean == b[i].metrics.at(name).mean);
            CHECK(e.se == b[i].metrics.at(name).se);
            CHECK(e.mean == c[i].metrics.at(name).mean);
            CHECK(e.se == c[i].metrics.at(name).se);
        }
}

TEST_CASE("COPE beats the no-action baseline and its MSE matches the Bayes risk") {
    auto spec = small_spec(1);
    spec.mechanisms = {MechanismSpec::cope_for(CostKind::Linear)};
    spec.n_values = {3, 7};
    spec.n_trials = 4000;
    for (const auto& r : run_experiment(spec)) {
        const auto pay = r.metrics.at("principal_payoff");
        CHECK(pay.mean >= -1.0 - 3.0 * pay.se);
        const auto mse = r.metrics.at("prediction_sq_error");
        const auto risk = r.metrics.at("bayes_risk");
        CHECK(std::abs(mse.mean - risk.mean) <= 3.0 * std::hypot(mse.se, risk.se));
    }
}

TEST_CASE("top-type agents earn zero on average") {
    // Fixed profile with agent 0 at the top of the support; averaged realized payoff.
    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic}) {
        const auto s = scenario(kind, 3);
        const auto model = kind == CostKind::Linear ? CostModel::linear() : CostModel::quadratic();
        const std::vector<double> types{1.0, 0.3, 0.6};
        Welford w;
        for (std::uint64_t seed = 0; seed < 3000; ++seed) {
            const auto r = run_trial(s, MechanismSpec::cope_for(kind), AgentMode::Truthful, seed, {}, &types);
            w.add(r.payments[0] - model.total(r.efforts[0], types[0]));
        }
        const auto e = w.estimate();
        CHECK(std::abs(e.mean) <= 3.0 * e.se + 1e-12);
    }
}
