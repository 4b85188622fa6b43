#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cope {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (7, 15) on [lo, hi]; panels are bisected at most
// max_depth times. Returns 0 for an empty or reversed interval.
double integrate(const ScalarFn& f, double lo, double hi, double abs_tol = 1e-10, unsigned max_depth = 50);

struct ScalarMax {
    double x = 0.0;
    double value = 0.0;
};

// Brent's method (golden section with parabolic steps) on [lo, hi].
ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, int bits = 52, std::uintmax_t max_iter = 500);

// Root of f on a sign-changing bracket.
double find_root(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi);
double find_root(const ScalarFn& f, double lo, double hi);

// Root of a decreasing f with f(lo) > 0, growing the upper bound as needed.
double find_root_decreasing(const ScalarFn& f, double lo, double hi_guess);

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::uint64_t n = 0;
};

// Streaming mean/variance with an exact pairwise merge.
class Welford {
public:
    void add(double x);
    void merge(const Welford& other);
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // sample variance; 0 for n < 2
    double se() const;        // 0 for n < 2
    Estimate estimate() const { return {mean_, se(), n_}; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule mapped onto [lo, hi].
QuadRule gauss_legendre(int points, double lo, double hi);

}  // namespace cope
