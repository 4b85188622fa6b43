#include "cope/mechanism.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cope/numerics.hpp"
#include "cope/rng.hpp"

namespace cope {

double virtual_cost(const CostTypeDistribution& dist, double theta) {
    if (dist.kind() == DistKind::Uniform) return 2.0 * theta - dist.lo();
    return theta + dist.inv_hazard(theta);
}

namespace {
void require_nonempty(std::span<const double> reports) {
    if (reports.empty()) throw DomainError("report vector is empty");
}

double rest_sum(const std::vector<double>& inv_gamma, std::size_t skip) {
    double s = 0.0;
    for (std::size_t m = 0; m < inv_gamma.size(); ++m)
        if (m != skip) s += inv_gamma[m];
    return s;
}

std::vector<double> inverse_gammas(std::span<const double> reports, const CostTypeDistribution& dist) {
    std::vector<double> out(reports.size());
    for (std::size_t m = 0; m < reports.size(); ++m) {
        const double g = virtual_cost(dist, reports[m]);
        if (!(g > 0.0)) throw DomainError("virtual cost must be positive (2 theta - theta_lo > 0)");
        out[m] = 1.0 / g;
    }
    return out;
}
}  // namespace

std::size_t linear_winner(std::span<const double> reports, const TieRule& tie) {
    require_nonempty(reports);
    const double best = *std::min_element(reports.begin(), reports.end());
    std::vector<std::size_t> ties;
    for (std::size_t m = 0; m < reports.size(); ++m)
        if (reports[m] == best) ties.push_back(m);
    if (tie.mode == TieBreak::LowestIndex || ties.size() == 1) return ties.front();
    const double u = uniform01(RngKey{tie.seed, 0, 0, Purpose::TieBreak});
    return ties[std::min(ties.size() - 1, static_cast<std::size_t>(u * static_cast<double>(ties.size())))];
}

double linear_winner_effort(const CostTypeDistribution& dist, double var0, double theta) {
    const double g = virtual_cost(dist, theta);
    if (!(g > 0.0)) throw DomainError("virtual cost must be positive");
    return std::max(1.0 / std::sqrt(g) - 1.0 / var0, 0.0);
}

std::vector<double> effort_linear(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                  const TieRule& tie) {
    const std::size_t w = linear_winner(reports, tie);
    std::vector<double> q(reports.size(), 0.0);
    q[w] = linear_winner_effort(dist, var0, reports[w]);
    return q;
}

CubicSolution solve_W(std::span<const double> reports, const CostTypeDistribution& dist, double var0) {
    require_nonempty(reports);
    const auto ig = inverse_gammas(reports, dist);
    return solve_cubic(1.0 / var0, std::accumulate(ig.begin(), ig.end(), 0.0));
}

std::vector<double> effort_quadratic(std::span<const double> reports, const CostTypeDistribution& dist, double var0) {
    const auto ig = inverse_gammas(reports, dist);
    const double W = solve_cubic(1.0 / var0, std::accumulate(ig.begin(), ig.end(), 0.0)).W;
    std::vector<double> q(reports.size());
    for (std::size_t n = 0; n < q.size(); ++n) q[n] = ig[n] / (W * W);
    return q;
}

double quadratic_effort_given_rest(const CostTypeDistribution& dist, double var0, double theta, double rest) {
    const double ig = 1.0 / virtual_cost(dist, theta);
    const double W = solve_cubic(1.0 / var0, rest + ig).W;
    return ig / (W * W);
}

double Payment::realized(double x, double y_hat) const {
    const double e = x - y_hat;
    return pi - K * e * e + S;
}

PaymentRule payment_rule_linear(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                const LinearOptions& opts) {
    const std::size_t w = linear_winner(reports, opts.tie);
    PaymentRule rule(reports.size());
    const double a = 1.0 / var0;
    const double t = reports[w];
    const double g = virtual_cost(dist, t);
    if (!(g > 0.0)) throw DomainError("virtual cost must be positive");
    // Zero rule once the requested effort is strictly clamped.
    if (1.0 / std::sqrt(g) - a < 0.0) return rule;
    const double Q = linear_winner_effort(dist, var0, t);

    double upper = dist.hi();
    if (opts.pi_rule == LinearPiRule::RunnerUp) {
        for (std::size_t m = 0; m < reports.size(); ++m)
            if (m != w) upper = std::min(upper, reports[m]);
    }
    auto qz = [&](double z) { return linear_winner_effort(dist, var0, z); };
    // Stop at the clamp so the integrand stays smooth.
    if (a > 0.0 && upper > t && qz(upper) == 0.0) {
        const double target = 1.0 / (a * a);
        upper = dist.kind() == DistKind::Uniform
                    ? 0.5 * (target + dist.lo())
                    : find_root([&](double z) { return virtual_cost(dist, z) - target; }, t, upper);
    }
    Payment& p = rule[w];
    p.K = t / g;
    p.S = t / std::sqrt(g);
    p.pi = t * Q + integrate(qz, t, upper, opts.abs_tol);
    return rule;
}

double linear_pi_antiderivative(double t, double lo, double hi, double var0) {
    const double a = 1.0 / var0;
    return t / std::sqrt(2.0 * t - lo) - hi * a + (std::sqrt(2.0 * hi - lo) - std::sqrt(2.0 * t - lo));
}

double linear_pi_doubled_bracket(double t, double lo, double hi, double var0) {
    const double a = 1.0 / var0;
    return t / std::sqrt(2.0 * t - lo) - hi * a + 2.0 * (std::sqrt(2.0 * hi - lo) - std::sqrt(2.0 * t - lo));
}

Payment quadratic_payment(std::span<const double> reports, std::size_t n, const CostTypeDistribution& dist, double var0,
                          double abs_tol) {
    const auto ig = inverse_gammas(reports, dist);
    const double a = 1.0 / var0;
    const double rest = rest_sum(ig, n);
    const double t = reports[n];
    const double Q = quadratic_effort_given_rest(dist, var0, t, rest);
    auto q2 = [&](double z) {
        const double q = quadratic_effort_given_rest(dist, var0, z, rest);
        return q * q;
    };
    Payment p;
    p.K = (Q + a) * (Q + a) * t * Q;
    p.S = (Q + a) * t * Q;
    p.pi = 0.5 * (t * Q * Q + integrate(q2, t, dist.hi(), abs_tol));
    return p;
}

PaymentRule payment_rule_quadratic(std::span<const double> reports, const CostTypeDistribution& dist, double var0,
                                   double abs_tol) {
    PaymentRule rule(reports.size());
    for (std::size_t n = 0; n < reports.size(); ++n) rule[n] = quadratic_payment(reports, n, dist, var0, abs_tol);
    return rule;
}

// General setting: minimise f(q) = h(q) + sum phi_n(q_n) over q >= 0.

namespace {

struct GeneralProblem {
    const CostModel& model;
    double a;
    std::vector<double> theta;
    std::vector<double> H;  // F/f, or 0 for the centralized problem

    double value(std::span<const double> q) const {
        double s = 0.0, phi = 0.0;
        for (std::size_t n = 0; n < q.size(); ++n) {
            s += q[n];
            phi += model.total(q[n], theta[n]);
            if (H[n] != 0.0) phi += model.dtotal_dtheta(q[n], theta[n]) * H[n];
        }
        const double d = a + s;
        if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
        return 1.0 / d + phi;
    }

    double dphi(double q, double t, double h) const { return model.marginal(q, t) + model.dmarginal_dtheta(q, t) * h; }

    void gradient(std::span<const double> q, std::vector<double>& g, double& h2) const {
        const double d = a + std::accumulate(q.begin(), q.end(), 0.0);
        const double hp = -1.0 / (d * d);
        h2 = 2.0 / (d * d * d);
        g.resize(q.size());
        for (std::size_t n = 0; n < q.size(); ++n) g[n] = hp + dphi(q[n], theta[n], H[n]);
    }

    double curvature(double q, double t, double h) const {
        if (model.kind() != CostKind::General) return model.dmarginal_dq(q, t) + (model.kind() == CostKind::Quadratic ? h : 0.0);
        const double s = std::max(1e-4, 1e-4 * std::abs(q));
        return (dphi(q + s, t, h) - dphi(q - s, t, h)) / (2.0 * s);
    }
};

double projected_gradient_norm(std::span<const double> x, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = std::max(0.0, x[i] - g[i]) - x[i];
        s += step * step;
    }
    return std::sqrt(s);
}

struct RunResult {
    std::vector<double> x;
    double f = 0.0;
    double pg = 0.0;
    int iters = 0;
};

// Projected Newton with an Armijo search along the projection arc.
RunResult projected_newton(const GeneralProblem& P, std::vector<double> x, const GeneralSolverConfig& cfg) {
    const std::size_t n = x.size();
    std::vector<double> g, gn, d(n), xn(n), Dt(n);
    std::vector<bool> free_set(n);
    double h2 = 0.0, h2n = 0.0;
    double f = P.value(x);
    RunResult r;
    int polish = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        P.gradient(x, g, h2);
        r.pg = projected_gradient_norm(x, g);
        r.iters = it;
        // A few polishing steps past tol; payments built on Q inherit its error.
        if (r.pg < cfg.tol * 1e-3 || (r.pg < cfg.tol && ++polish > 4)) break;
        const double eps = std::min(1e-3, r.pg);
        const double mu = 1e-12 + 1e-6 * h2;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            free_set[i] = !(x[i] <= eps && g[i] > 0.0);
            Dt[i] = std::max(P.curvature(x[i], P.theta[i], P.H[i]), 0.0) + mu;
            if (free_set[i]) {
                s1 += 1.0 / Dt[i];
                s2 += g[i] / Dt[i];
            }
        }
        // (Dt + h2 11')^{-1} g on the free set, by Sherman-Morrison.
        const double coef = h2 * s2 / (1.0 + h2 * s1);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = free_set[i] ? -(g[i] - coef) / Dt[i] : -g[i] / (Dt[i] + h2);

        const double sigma = 1e-4;
        const double slack = 1e-13 * (1.0 + std::abs(f));
        // Below this predicted decrease, quadrature-based values are mostly noise;
        // fall back to the slope at the trial point, which bounds the change for convex f.
        const double noise = 1e-9 * (1.0 + std::abs(f));
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
            double pred = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                xn[i] = std::max(0.0, x[i] + alpha * d[i]);
                pred += free_set[i] ? -alpha * g[i] * d[i] : g[i] * (x[i] - xn[i]);
            }
            bool ok;
            double fn;
            if (pred < noise) {
                P.gradient(xn, gn, h2n);
                double slope = 0.0;
                for (std::size_t i = 0; i < n; ++i) slope += gn[i] * (xn[i] - x[i]);
                ok = slope <= 0.0;
                fn = ok ? P.value(xn) : f;
            } else {
                fn = P.value(xn);
                ok = fn <= f - sigma * pred + slack;
            }
            if (ok) {
                x = xn;
                f = fn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    P.gradient(x, g, h2);
    r.pg = projected_gradient_norm(x, g);
    r.x = std::move(x);
    r.f = f;
    return r;
}

GeneralProblem make_problem(const CostModel& model, const CostTypeDistribution& dist, double var0,
                            std::span<const double> reports, bool virtual_costs) {
    GeneralProblem P{model, 1.0 / var0, {reports.begin(), reports.end()}, std::vector<double>(reports.size(), 0.0)};
    if (virtual_costs)
        for (std::size_t n = 0; n < reports.size(); ++n) P.H[n] = dist.inv_hazard(reports[n]);
    return P;
}

}  // namespace

double general_objective(const CostModel& model, const CostTypeDistribution& dist, const GaussianPrior& prior,
                         std::span<const double> reports, std::span<const double> q, bool virtual_costs) {
    return -make_problem(model, dist, prior.var0, reports, virtual_costs).value(q);
}

GeneralSolution solve_general(const CostModel& model, const CostTypeDistribution& dist, double var0,
                              std::span<const double> reports, const GeneralSolverConfig& cfg) {
    require_nonempty(reports);
    const auto P = make_problem(model, dist, var0, reports, cfg.virtual_costs);
    const std::size_t n = reports.size();
    const double floor = P.a > 0.0 ? 0.0 : 1e-3;
    RunResult best;
    best.f = std::numeric_limits<double>::infinity();
    int converged = 0, total_iters = 0;
    for (int k = 0; k < std::max(1, cfg.multistart); ++k) {
        std::vector<double> x0(n);
        static constexpr double kLevels[] = {0.0, 0.05, 0.5, 2.0};
        for (std::size_t i = 0; i < n; ++i)
            x0[i] = k < 4 ? std::max(floor, kLevels[k]) : floor + 2.0 * uniform01(RngKey{cfg.seed, static_cast<std::uint64_t>(k), i, Purpose::Oracle});
        auto r = projected_newton(P, std::move(x0), cfg);
        total_iters += r.iters;
        const bool ok = r.pg < cfg.tol;
        const bool best_ok = !best.x.empty() && best.pg < cfg.tol;
        if (ok) ++converged;
        if (best.x.empty() || (ok && (!best_ok || r.f < best.f)) || (!ok && !best_ok && r.pg < best.pg)) best = std::move(r);
    }
    if (converged == 0) {
        std::ostringstream msg;
        msg << "general optimizer did not converge: projected-gradient norm " << best.pg << " after " << total_iters
            << " iterations over " << cfg.multistart << " starts";
        throw SolverError(msg.str());
    }
    return {best.x, -best.f, best.pg, total_iters, converged};
}

std::vector<double> effort_general(const CostModel& model, const CostTypeDistribution& dist, double var0,
                                   std::span<const double> reports, const GeneralSolverConfig& cfg) {
    return solve_general(model, dist, var0, reports, cfg).q;
}

double general_hessian_max_eigenvalue(const CostModel& model, const CostTypeDistribution& dist, const GaussianPrior& prior,
                                      std::span<const double> reports, std::span<const double> q) {
    const auto P = make_problem(model, dist, prior.var0, reports, true);
    const std::size_t n = q.size();
    Eigen::MatrixXd Hm(n, n);
    std::vector<double> gp, gm, x(q.begin(), q.end());
    double h2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = std::max(1e-5, 1e-5 * std::abs(x[j]));
        const double keep = x[j];
        x[j] = keep + s;
        P.gradient(x, gp, h2);
        x[j] = keep - s;
        P.gradient(x, gm, h2);
        x[j] = keep;
        // Hessian of the maximised objective, i.e. of -f.
        for (std::size_t i = 0; i < n; ++i) Hm(i, j) = -(gp[i] - gm[i]) / (2.0 * s);
    }
    const Eigen::MatrixXd Hs = 0.5 * (Hm + Hm.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

PaymentRule payment_rule_general(const CostModel& model, const ProfileSchedule& schedule, const CostTypeDistribution& dist,
                                 double var0, std::span<const double> reports, double abs_tol, bool compute_pi) {
    const GaussianPrior prior{0.0, var0};
    const auto q = schedule(reports);
    PaymentRule rule(reports.size());
    std::vector<double> profile(reports.begin(), reports.end());
    for (std::size_t n = 0; n < reports.size(); ++n) {
        if (!(q[n] > 0.0)) continue;  // not recruited
        const double t = reports[n];
        const double c = model.marginal(q[n], t);
        const double hp = agent_bayes_risk_dq(prior, q[n]);
        if (hp == 0.0) throw SolverError("payment rule is singular: dh/dq = 0 at the requested effort");
        Payment& p = rule[n];
        p.K = -c / hp;
        p.S = -c * agent_bayes_risk(prior, q[n]) / hp;
        if (!compute_pi) continue;
        auto rent = [&](double z) {
            profile[n] = z;
            const double qz = schedule(profile)[n];
            return model.dtotal_dtheta(qz, z);
        };
        p.pi = model.total(q[n], t) + integrate(rent, t, dist.hi(), abs_tol, 40);
        profile[n] = t;
    }
    return rule;
}

bool schedule_monotone(const ProfileSchedule& schedule, std::span<const double> reports, std::size_t n,
                       const CostTypeDistribution& dist, int points, double tol) {
    std::vector<double> profile(reports.begin(), reports.end());
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        profile[n] = dist.lo() + kTypeFloor + (dist.hi() - dist.lo() - kTypeFloor) * i / (points - 1);
        const double q = schedule(profile)[n];
        if (q > prev + tol * std::max(1.0, std::abs(prev))) return false;
        prev = q;
    }
    return true;
}

double predict(const GaussianPrior& prior, std::span<const double> reports, std::span<const double> q) {
    if (reports.size() != q.size()) throw DomainError("reports and efforts differ in length");
    const double a = prior.precision();
    double num = 0.0, den = a;
    int active = 0;
    for (std::size_t n = 0; n < q.size(); ++n) {
        if (!(q[n] > 0.0)) continue;
        num += (a + q[n]) * reports[n];
        den += q[n];
        ++active;
    }
    if (active == 0) return prior.mu0;
    num += (1.0 - active) * a * prior.mu0;
    return num / den;
}

double unshrink(const GaussianPrior& prior, double y_hat, double q) {
    if (!(q > 0.0)) return prior.mu0;
    return y_hat + prior.precision() * (y_hat - prior.mu0) / q;
}

}  // namespace cope
