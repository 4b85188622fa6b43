#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cope/numerics.hpp"

using namespace cope;

TEST_CASE("integrate: smooth, kinked and empty intervals") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::max(0.3 - x, 0.0); }, 0.0, 1.0) == doctest::Approx(0.045).epsilon(1e-10));
    // 1/sqrt(x) on (0, 1]: integrable endpoint singularity.
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-8) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
    CHECK(integrate([](double) { return 1.0; }, 2.0, 1.0) == 0.0);
}

TEST_CASE("maximize_scalar finds interior and boundary maxima") {
    const auto in = maximize_scalar([](double x) { return -(x - 0.37) * (x - 0.37); }, 0.0, 1.0);
    CHECK(in.x == doctest::Approx(0.37).epsilon(1e-7));
    const auto edge = maximize_scalar([](double x) { return -x; }, 0.0, 1.0);
    CHECK(edge.x == 0.0);
}

TEST_CASE("root finders") {
    CHECK(find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, 0.0, 2.0), SolverError);
    CHECK(find_root_decreasing([](double x) { return 100.0 - x; }, 0.0, 1.0) == doctest::Approx(100.0));
    CHECK(find_root_decreasing([](double x) { return -1.0 - x; }, 0.0, 1.0) == 0.0);
}

TEST_CASE("Welford: mean, SE and merge order") {
    const double xs[] = {1.0, 4.0, 2.0, 8.0, 5.0, 7.0};
    Welford all, left, right;
    for (int i = 0; i < 6; ++i) {
        all.add(xs[i]);
        (i < 3 ? left : right).add(xs[i]);
    }
    left.merge(right);
    CHECK(all.mean() == doctest::Approx(4.5));
    // Two-pass sample variance: sum (x - 4.5)^2 / 5 = 37.5 / 5
    CHECK(all.variance() == doctest::Approx(7.5));
    CHECK(all.se() == doctest::Approx(std::sqrt(7.5 / 6.0)));
    CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-15));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-14));
    Welford one;
    one.add(3.0);
    CHECK(one.se() == 0.0);
    CHECK(one.estimate().n == 1);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int p : {7, 10, 15, 20, 30}) {
        const auto r = gauss_legendre(p, -1.0, 2.0);
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * p - 1);
        const double exact = (std::pow(2.0, 2 * p) - 1.0) / (2 * p);
        CHECK(s == doctest::Approx(exact).epsilon(1e-11));
    }
    CHECK_THROWS(gauss_legendre(8, 0.0, 1.0));
}
