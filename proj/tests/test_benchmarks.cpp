#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cope/benchmarks.hpp"
#include "cope/cost.hpp"
#include "cope/rng.hpp"

using namespace cope;

namespace {
const auto kUnit = CostTypeDistribution::uniform(0.0, 1.0);
constexpr double kFlat = std::numeric_limits<double>::infinity();

// Plain bisection for W^3 - a W^2 - s = 0.
double bisect_W(double a, double s) {
    double lo = a, hi = a + std::cbrt(s) + 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (m * m * m - a * m * m - s > 0.0 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> draw_types(std::uint64_t seed, std::uint64_t trial, int n) {
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = draw_type(kUnit, seed, trial, k);
    return t;
}
}  // namespace

TEST_CASE("centralized efforts: examples") {
    const auto lin = centralized_efforts(std::vector<double>{0.25, 0.8}, CostKind::Linear, 1.0);
    CHECK(lin.efforts[0] == doctest::Approx(1.0));
    CHECK(lin.efforts[1] == 0.0);

    const auto quad = centralized_efforts(std::vector<double>{0.5}, CostKind::Quadratic, kFlat);
    CHECK(quad.W_o == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
    CHECK(quad.efforts[0] == doctest::Approx(1.259921).epsilon(1e-6));

    CHECK(centralized_efforts(std::vector<double>{1.0}, CostKind::Linear, 1.0).efforts[0] == 0.0);
    CHECK_THROWS_AS(centralized_efforts(std::vector<double>{0.0, 0.5}, CostKind::Quadratic, 1.0), DomainError);
}

TEST_CASE("centralized quadratic matches a bisection cubic") {
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto th = draw_types(5, t, 2 + static_cast<int>(t % 6));
        double s = 0.0;
        for (double v : th) s += 1.0 / v;
        const double W = bisect_W(1.0, s);
        const auto sol = centralized_efforts(th, CostKind::Quadratic, 1.0);
        CHECK(std::abs(sol.W_o * sol.W_o * sol.W_o - sol.W_o * sol.W_o - s) / std::max(1.0, s) < 1e-10);
        for (std::size_t k = 0; k < th.size(); ++k)
            CHECK(sol.efforts[k] == doctest::Approx(1.0 / (th[k] * W * W)).epsilon(1e-10));
    }
}

TEST_CASE("centralized efforts dominate COPE quadratic efforts") {
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto th = draw_types(6, t, 2 + static_cast<int>(t % 8));
        const auto c = centralized_efforts(th, CostKind::Quadratic, 1.0).efforts;
        const auto p = effort_quadratic(th, kUnit, 1.0);
        for (std::size_t k = 0; k < th.size(); ++k) CHECK(c[k] >= p[k]);
    }
}

TEST_CASE("centralized network profit dominates COPE on every draw") {
    const GaussianPrior prior{0.0, 1.0};
    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic}) {
        const auto model = kind == CostKind::Linear ? CostModel::linear() : CostModel::quadratic();
        for (std::uint64_t t = 0; t < 200; ++t) {
            const auto th = draw_types(8, t, 3 + static_cast<int>(t % 10));
            const auto c = centralized_efforts(th, kind, 1.0).efforts;
            const auto p = kind == CostKind::Linear ? effort_linear(th, kUnit, 1.0) : effort_quadratic(th, kUnit, 1.0);
            CHECK(network_profit(prior, th, c, model) >= network_profit(prior, th, p, model) - 1e-12);
        }
    }
}

TEST_CASE("homogeneous contract: examples") {
    const auto c = homogeneous_contract(0.25, 2, CostKind::Linear, 1.0);
    CHECK(c.q_dagger == doctest::Approx(0.5));
    CHECK(c.beta == doctest::Approx(1.5 * 1.5 * 0.25));
    CHECK(c.alpha == doctest::Approx(1.5 * 0.25 * 0.5 + 0.25 * 0.5));
    CHECK(c.beta > 0.0);
    for (int n : {1, 3, 9}) CHECK(homogeneous_contract(1.0, n, CostKind::Linear, 1.0).q_dagger == 0.0);

    const auto q = homogeneous_contract(1.0, 1, CostKind::Quadratic, kFlat);
    CHECK(q.q_dagger == doctest::Approx(1.0).epsilon(1e-10));

    const auto q3 = homogeneous_contract(0.5, 3, CostKind::Quadratic, 1.0);
    const double r = 1.0 / std::pow(1.0 + 3.0 * q3.q_dagger, 2) - 0.5 * q3.q_dagger;
    CHECK(std::abs(r) < 1e-10);

    CHECK_THROWS_AS(homogeneous_contract(0.0, 3, CostKind::Linear, 1.0), DomainError);
    CHECK_THROWS_AS(homogeneous_contract(-0.1, 3, CostKind::Quadratic, 1.0), DomainError);
}

TEST_CASE("homogeneous response reproduces q-dagger at the believed type") {
    HomogeneousOptions even;
    even.linear_alpha = LinearAlpha::BreakEven;
    for (CostKind kind : {CostKind::Linear, CostKind::Quadratic})
        for (double td : {0.2, 0.5, 0.8})
            for (int n : {3, 7, 19}) {
                const auto c = homogeneous_contract(td, n, kind, 1.0, even);
                const auto r = homogeneous_agent_response(td, c, 1.0);
                CHECK(r.participate);
                CHECK(std::abs(r.q - c.q_dagger) < 1e-10);
                CHECK(std::abs(r.expected_payoff) < 1e-12);
            }
}

TEST_CASE("standard linear alpha leaves the believed type short when q-dagger < 1") {
    const auto c = homogeneous_contract(0.5, 3, CostKind::Linear, 1.0);
    REQUIRE(c.q_dagger < 1.0);
    const double a = 1.0;
    const auto r = homogeneous_agent_response(0.5, c, 1.0);
    const double payoff = (a + c.q_dagger) * 0.5 * (c.q_dagger - 1.0);
    CHECK(r.expected_payoff == doctest::Approx(payoff));
    CHECK_FALSE(r.participate);
}

TEST_CASE("homogeneous response: cheaper agents work harder") {
    HomogeneousOptions even;
    even.linear_alpha = LinearAlpha::BreakEven;
    const auto c = homogeneous_contract(0.5, 3, CostKind::Linear, 1.0, even);
    double prev = std::numeric_limits<double>::infinity();
    for (double th = 0.05; th <= 0.5; th += 0.05) {
        const double q = homogeneous_agent_response(th, c, 1.0).q;
        CHECK(q <= prev);
        if (th < 0.45) CHECK(q > c.q_dagger);
        prev = q;
    }
}

TEST_CASE("homogeneous response: expensive agents opt out") {
    const auto c = homogeneous_contract(0.2, 3, CostKind::Linear, 1.0);
    const auto r = homogeneous_agent_response(1.0, c, 1.0);
    CHECK_FALSE(r.participate);
    CHECK(r.expected_payoff < 0.0);
    // Closed form of the same payoff.
    const double q = std::max(std::sqrt(c.beta) - 1.0, 0.0);
    CHECK(r.expected_payoff == doctest::Approx(c.alpha - c.beta / (1.0 + q) - q));
    CHECK(homogeneous_agent_response(0.01, c, 1.0).participate);
}

TEST_CASE("homogeneous prediction") {
    const GaussianPrior prior{0.0, 1.0};
    const auto c = homogeneous_contract(0.25, 1, CostKind::Linear, 1.0);
    REQUIRE(c.q_dagger == doctest::Approx(1.0));
    CHECK(homogeneous_predict(c, std::vector<double>{0.5}, prior) == doctest::Approx(0.5));
    const GaussianPrior shifted{0.3, 1.0};
    const auto c3 = homogeneous_contract(0.25, 3, CostKind::Linear, 1.0);
    CHECK(homogeneous_predict(c3, std::vector<double>{0.3, 0.3}, shifted) == doctest::Approx(0.3));
    CHECK(homogeneous_predict(c3, std::vector<double>{}, shifted) == 0.3);
    const auto idle = homogeneous_contract(1.0, 3, CostKind::Linear, 1.0);
    CHECK(homogeneous_predict(idle, std::vector<double>{0.9}, shifted) == 0.3);
}

TEST_CASE("homogeneous prediction: participant count versus all agents") {
    const GaussianPrior prior{0.0, 1.0};
    const auto c = homogeneous_contract(0.25, 3, CostKind::Linear, 1.0);
    const std::vector<double> reports{0.4};
    const double q = c.q_dagger;
    const double g = 0.4 + 0.4 / q;
    CHECK(homogeneous_predict(c, reports, prior) == doctest::Approx(q * g / (1.0 + q)));
    HomogeneousOptions all;
    all.count = ParticipantCount::All;
    CHECK(homogeneous_predict(c, reports, prior, all) == doctest::Approx(q * g / (1.0 + 3.0 * q)));
}
