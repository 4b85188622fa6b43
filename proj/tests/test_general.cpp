#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cope/mechanism.hpp"
#include "cope/rng.hpp"

using namespace cope;

namespace {
const auto kUnit = CostTypeDistribution::uniform(0.0, 1.0);
constexpr double kFlat = std::numeric_limits<double>::infinity();

CostModel lin_general() { return CostModel::general([](double, double t) { return t; }, "theta"); }
CostModel quad_general() { return CostModel::general([](double q, double t) { return t * q; }, "theta*q"); }
}  // namespace

TEST_CASE("general effort matches the linear closed form") {
    const std::vector<double> r{0.125, 0.9};
    const auto q = effort_general(lin_general(), kUnit, 1.0, r);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(q[1]) < 1e-6);
}

TEST_CASE("general effort matches the quadratic closed form under a flat prior") {
    const std::vector<double> r{0.5};
    const auto q = effort_general(quad_general(), kUnit, kFlat, r);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("general effort is zero when even the cheapest agent is clamped") {
    // gamma = 1.2 at the lowest report, and 1/sqrt(1.2) < 1.
    const std::vector<double> r{0.6, 0.9, 0.75};
    for (double v : effort_general(lin_general(), kUnit, 1.0, r)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("general optimizer handles near ties") {
    for (double e : {0.0, 1e-12, 1e-9, 5e-9, 1e-6}) {
        const std::vector<double> r{0.3, 0.3 + e, 0.6};
        const auto s = solve_general(lin_general(), kUnit, 1.0, r);
        CHECK(s.pg_norm < 1e-9);
        CHECK(s.q[0] + s.q[1] == doctest::Approx(std::pow(0.6, -0.5) - 1.0).epsilon(1e-8));
    }
}

TEST_CASE("general objective is concave at the optimum") {
    const GaussianPrior prior{0.0, 1.0};
    for (std::uint64_t t = 0; t < 5; ++t) {
        std::vector<double> r(4);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = draw_type(kUnit, 31, t, k);
        const auto q = effort_general(quad_general(), kUnit, 1.0, r);
        CHECK(general_hessian_max_eigenvalue(quad_general(), kUnit, prior, r, q) < 0.0);
        // Random feasible points never beat the returned one.
        const double best = general_objective(quad_general(), kUnit, prior, r, q);
        for (std::uint64_t j = 0; j < 20; ++j) {
            std::vector<double> p(q);
            for (std::size_t k = 0; k < p.size(); ++k)
                p[k] = std::max(0.0, p[k] + 0.2 * (uniform01(RngKey{77, t * 100 + j, k, Purpose::Oracle}) - 0.5));
            CHECK(general_objective(quad_general(), kUnit, prior, r, p) <= best + 1e-12);
        }
    }
}

TEST_CASE("general payments reduce to the linear K and S") {
    // var0 = 4: Q = 1/sqrt(1) - 1/4 = 0.75 > 0, K = theta/gamma, S = theta/sqrt(gamma).
    const std::vector<double> r{0.5, 0.9};
    const auto model = lin_general();
    const ProfileSchedule sched = [&](std::span<const double> p) { return effort_general(model, kUnit, 4.0, p); };
    const auto rule = payment_rule_general(model, sched, kUnit, 4.0, r, 1e-8, false);
    CHECK(rule[0].K == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rule[0].S == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rule[1].K == 0.0);
    const auto special = payment_rule_linear(r, kUnit, 4.0);
    CHECK(rule[0].K == doctest::Approx(special[0].K).epsilon(1e-8));
}

TEST_CASE("general payments reduce to the quadratic K and S") {
    const std::vector<double> r{0.5};
    const auto model = quad_general();
    const ProfileSchedule sched = [&](std::span<const double> p) { return effort_general(model, kUnit, kFlat, p); };
    const auto rule = payment_rule_general(model, sched, kUnit, kFlat, r);
    CHECK(rule[0].K == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rule[0].S == doctest::Approx(0.5).epsilon(1e-8));
    const auto special = payment_rule_quadratic(r, kUnit, kFlat);
    CHECK(rule[0].pi == doctest::Approx(special[0].pi).epsilon(1e-6));
}

TEST_CASE("zero marginal cost gives zero K and S") {
    const auto model = CostModel::general([](double, double) { return 0.0; }, "free");
    const ProfileSchedule sched = [](std::span<const double> p) { return std::vector<double>(p.size(), 1.0); };
    const std::vector<double> r{0.4, 0.7};
    for (const auto& p : payment_rule_general(model, sched, kUnit, 1.0, r)) {
        CHECK(p.K == 0.0);
        CHECK(p.S == 0.0);
    }
}

TEST_CASE("general schedules are monotone in own report") {
    const auto model = quad_general();
    const ProfileSchedule sched = [&](std::span<const double> p) { return effort_general(model, kUnit, 1.0, p); };
    const std::vector<double> r{0.2, 0.5, 0.7};
    for (std::size_t n = 0; n < r.size(); ++n) CHECK(schedule_monotone(sched, r, n, kUnit, 40));
}
