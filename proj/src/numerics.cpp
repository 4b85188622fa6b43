#include "cope/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace cope {

namespace {
struct Panel {
    double lo, hi, val, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

// One Gauss-Kronrod (7, 15) panel. The error is the Kronrod-Gauss gap, floored at
// the rounding level of the panel.
Panel gk15(const ScalarFn& f, double lo, double hi) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double f0 = f(c);
    double k = f0 * wk[0], g = f0 * wg[0], l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(c + h * x[i]), fm = f(c - h * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        // Gauss nodes are the even-indexed Kronrod abscissae.
        if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
    }
    const double err = std::max(std::abs(k - g) * h, 50.0 * std::numeric_limits<double>::epsilon() * l1 * h);
    return {lo, hi, k * h, err};
}
}  // namespace

double integrate(const ScalarFn& f, double lo, double hi, double abs_tol, unsigned max_depth) {
    if (!(hi > lo)) return 0.0;
    // Global adaptive bisection: always split the panel with the largest error.
    const double min_width = std::ldexp(hi - lo, -static_cast<int>(std::min(max_depth, 60u)));
    std::priority_queue<Panel> heap;
    heap.push(gk15(f, lo, hi));
    double total = heap.top().val, err = heap.top().err;
    std::vector<Panel> done;
    for (int panels = 1; panels < 4000 && !heap.empty(); ++panels) {
        if (err <= std::max(abs_tol, 1e-13 * std::abs(total))) break;
        const Panel p = heap.top();
        heap.pop();
        if (p.hi - p.lo <= min_width) {
            done.push_back(p);
            continue;
        }
        const double mid = 0.5 * (p.lo + p.hi);
        const Panel a = gk15(f, p.lo, mid), b = gk15(f, mid, p.hi);
        total += a.val + b.val - p.val;
        err += a.err + b.err - p.err;
        heap.push(a);
        heap.push(b);
    }
    // Re-add from the pieces to shed the running-sum drift.
    double sum = 0.0;
    for (const auto& p : done) sum += p.val;
    while (!heap.empty()) {
        sum += heap.top().val;
        heap.pop();
    }
    if (!std::isfinite(sum)) throw SolverError("quadrature produced a non-finite value");
    return sum;
}

ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, int bits, std::uintmax_t max_iter) {
    if (!(hi >= lo)) throw SolverError("maximize_scalar: empty interval");
    if (hi == lo) return {lo, f(lo)};
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, bits, max_iter);
    ScalarMax best{r.first, -r.second};
    // Brent never evaluates the endpoints; boundary maxima are common here (q = 0).
    for (double x : {lo, hi}) {
        const double v = f(x);
        if (v > best.value) best = {x, v};
    }
    return best;
}

double find_root(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw SolverError("find_root: bracket does not change sign");
    std::uintmax_t iters = 300;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (a + b);
}

double find_root(const ScalarFn& f, double lo, double hi) { return find_root(f, lo, hi, f(lo), f(hi)); }

double find_root_decreasing(const ScalarFn& f, double lo, double hi_guess) {
    const double f_lo = f(lo);
    if (f_lo <= 0.0) return lo;
    double hi = std::max(hi_guess, lo + 1.0);
    double f_hi = f(hi);
    for (int i = 0; f_hi > 0.0; ++i) {
        if (i > 200) throw SolverError("find_root_decreasing: no sign change");
        hi = lo + 2.0 * (hi - lo);
        f_hi = f(hi);
    }
    return find_root(f, lo, hi, f_lo, f_hi);
}

void Welford::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void Welford::merge(const Welford& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

double Welford::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double Welford::se() const { return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_)); }

namespace {
template <int P>
QuadRule gl_rule(double lo, double hi) {
    using G = boost::math::quadrature::gauss<double, P>;
    QuadRule r;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const auto& ab = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        const double wi = w[i] * h;
        if (ab[i] == 0.0) {
            r.nodes.push_back(c);
            r.weights.push_back(wi);
        } else {
            r.nodes.push_back(c - h * ab[i]);
            r.weights.push_back(wi);
            r.nodes.push_back(c + h * ab[i]);
            r.weights.push_back(wi);
        }
    }
    return r;
}
}  // namespace

QuadRule gauss_legendre(int points, double lo, double hi) {
    switch (points) {
        case 7: return gl_rule<7>(lo, hi);
        case 10: return gl_rule<10>(lo, hi);
        case 15: return gl_rule<15>(lo, hi);
        case 20: return gl_rule<20>(lo, hi);
        case 30: return gl_rule<30>(lo, hi);
        default: throw SolverError("gauss_legendre: supported sizes are 7, 10, 15, 20, 30");
    }
}

}  // namespace cope
