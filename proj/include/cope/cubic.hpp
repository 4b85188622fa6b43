#pragma once

namespace cope {

struct CubicSolution {
    double W = 0.0;
    double lambda = 0.0;
};

// Positive real root of W^3 - a W^2 - s = 0 for a >= 0, s >= 0 (not both zero):
// Cardano's closed form followed by one Newton step.
CubicSolution solve_cubic(double a, double s);

// |W^3 - a W^2 - s| / max(1, W^3)
double cubic_residual(double W, double a, double s);

}  // namespace cope
