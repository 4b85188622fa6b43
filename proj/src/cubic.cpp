#include "cope/cubic.hpp"

#include <algorithm>
#include <cmath>

#include "cope/model.hpp"

namespace cope {

CubicSolution solve_cubic(double a, double s) {
    if (!(a >= 0.0) || !(s >= 0.0) || !std::isfinite(a) || !std::isfinite(s))
        throw DomainError("cubic coefficients must be finite and nonnegative");
    if (a == 0.0 && s == 0.0) throw DomainError("cubic has no positive root when a = s = 0");
    const double a3 = a * a * a / 27.0;
    const double lambda = s * a3 + 0.25 * s * s;
    const double r = std::sqrt(lambda);
    const double base = a3 + 0.5 * s;
    // cbrt(base - r) = (a/3)^2 / cbrt(base + r), which avoids the cancellation in base - r.
    const double u = std::cbrt(base + r);
    double W = a / 3.0 + u + a * a / (9.0 * u);
    W = std::max(W, a);
    const double f = W * W * W - a * W * W - s;
    const double df = 3.0 * W * W - 2.0 * a * W;
    if (df > 0.0) W -= f / df;
    return {W, lambda};
}

double cubic_residual(double W, double a, double s) {
    return std::abs(W * W * W - a * W * W - s) / std::max(1.0, W * W * W);
}

}  // namespace cope
