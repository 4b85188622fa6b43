#include "cope/model.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cope/cost.hpp"
#include "cope/rng.hpp"

namespace cope {

GaussianPrior::GaussianPrior(double mu, double var) : mu0(mu), var0(var) {
    if (!(var > 0.0)) throw DomainError("prior variance must be positive");
}

CostTypeDistribution CostTypeDistribution::uniform(double lo, double hi) {
    if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("need 0 <= theta_lo < theta_hi < inf");
    CostTypeDistribution d;
    d.lo_ = lo;
    d.hi_ = hi;
    d.kind_ = DistKind::Uniform;
    return d;
}

CostTypeDistribution CostTypeDistribution::custom(double lo, double hi, Fn cdf, Fn pdf, Fn inv_hazard) {
    if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("need 0 <= theta_lo < theta_hi < inf");
    if (!cdf || !pdf) throw DomainError("custom distribution needs F and f");
    CostTypeDistribution d;
    d.lo_ = lo;
    d.hi_ = hi;
    d.kind_ = DistKind::Custom;
    d.cdf_ = std::move(cdf);
    d.pdf_ = std::move(pdf);
    d.inv_hazard_ = std::move(inv_hazard);
    return d;
}

double CostTypeDistribution::cdf(double t) const {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return 1.0;
    if (kind_ == DistKind::Uniform) return (t - lo_) / (hi_ - lo_);
    return cdf_(t);
}

double CostTypeDistribution::pdf(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    if (kind_ == DistKind::Uniform) return 1.0 / (hi_ - lo_);
    return pdf_(t);
}

double CostTypeDistribution::inv_hazard(double t) const {
    if (t <= lo_) return 0.0;
    if (kind_ == DistKind::Uniform) return std::min(t, hi_) - lo_;
    if (inv_hazard_) return inv_hazard_(t);
    const double f = pdf(t);
    if (!(f > 0.0)) throw DomainError("density vanishes inside the support");
    return cdf(t) / f;
}

double CostTypeDistribution::quantile(double u) const {
    if (u <= 0.0) return lo_;
    if (u >= 1.0) return hi_;
    if (kind_ == DistKind::Uniform) return lo_ + u * (hi_ - lo_);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve([&](double t) { return cdf(t) - u; }, lo_, hi_, -u, 1.0 - u,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
}

bool is_log_concave(const CostTypeDistribution& dist, int n_points) {
    const double lo = dist.lo(), hi = dist.hi();
    const double h = (hi - lo) / n_points;
    std::vector<double> lf;
    lf.reserve(n_points);
    for (int i = 1; i < n_points; ++i) {
        const double F = dist.cdf(lo + i * h);
        if (!(F > 0.0)) return false;
        lf.push_back(std::log(F));
    }
    for (std::size_t i = 1; i + 1 < lf.size(); ++i) {
        const double d2 = lf[i + 1] - 2.0 * lf[i] + lf[i - 1];
        if (d2 > 1e-9 * (1.0 + std::abs(lf[i]))) return false;
    }
    return true;
}

void Scenario::validate() const {
    if (n_agents < 1) throw DomainError("n_agents must be >= 1");
    if (!(prior.var0 > 0.0)) throw DomainError("prior variance must be positive");
    if (cost_kind == CostKind::General && !general_cost) throw DomainError("general cost kind needs a cost model");
}

double draw_type(const CostTypeDistribution& dist, std::uint64_t seed, std::uint64_t trial, std::uint64_t agent) {
    const double u = uniform01(RngKey{seed, trial, agent, Purpose::Type});
    return std::clamp(dist.quantile(u), dist.lo() + kTypeFloor, dist.hi());
}

World draw_world(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    World w;
    w.x = scenario.prior.mu0 + std::sqrt(scenario.prior.var0) * standard_normal(RngKey{seed, 0, 0, Purpose::World});
    w.types.resize(scenario.n_agents);
    for (int n = 0; n < scenario.n_agents; ++n) w.types[n] = draw_type(scenario.type_dist, seed, 0, n);
    return w;
}

std::optional<double> observation_from_noise(double x, double effort, double z) {
    if (effort < 0.0 || std::isnan(effort)) throw DomainError("effort must be nonnegative");
    if (effort == 0.0) return std::nullopt;
    return x + z / std::sqrt(effort);
}

std::optional<double> draw_observation(double x, double effort, std::uint64_t seed) {
    return observation_from_noise(x, effort, standard_normal(RngKey{seed, 0, 0, Purpose::Noise}));
}

Posterior posterior_mean_var(const GaussianPrior& prior, std::span<const Observation> reports) {
    const double a = prior.precision();
    double num = a * prior.mu0, den = a;
    for (const auto& r : reports) {
        if (r.effort < 0.0) throw DomainError("effort must be nonnegative");
        if (!r.informative()) continue;
        num += r.value * r.effort;
        den += r.effort;
    }
    if (den == 0.0) return {prior.mu0, prior.var0};
    return {num / den, 1.0 / den};
}

double principal_bayes_risk(const GaussianPrior& prior, std::span<const double> efforts) {
    double den = prior.precision();
    for (double q : efforts) den += q;
    return 1.0 / den;
}

double agent_bayes_risk(const GaussianPrior& prior, double q) { return 1.0 / (prior.precision() + q); }

double agent_bayes_risk_dq(const GaussianPrior& prior, double q) {
    const double d = prior.precision() + q;
    return -1.0 / (d * d);
}

}  // namespace cope
