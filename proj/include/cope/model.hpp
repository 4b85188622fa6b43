#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cope {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct GaussianPrior {
    double mu0 = 0.0;
    double var0 = 1.0;  // may be +inf for a flat prior in closed-form work

    GaussianPrior() = default;
    GaussianPrior(double mu, double var);

    // 1/var0, zero for a flat prior.
    double precision() const { return 1.0 / var0; }
};

enum class DistKind { Uniform, Custom };

class CostTypeDistribution {
public:
    using Fn = std::function<double(double)>;

    static CostTypeDistribution uniform(double lo, double hi);
    // inv_hazard may be empty, in which case F/f is formed from cdf and pdf.
    static CostTypeDistribution custom(double lo, double hi, Fn cdf, Fn pdf, Fn inv_hazard = {});

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    DistKind kind() const { return kind_; }

    double cdf(double theta) const;
    double pdf(double theta) const;
    // F/f, defined as 0 at the lower end of the support.
    double inv_hazard(double theta) const;
    double quantile(double u) const;
    bool contains(double theta) const { return theta >= lo_ && theta <= hi_; }

private:
    CostTypeDistribution() = default;
    double lo_ = 0.0, hi_ = 1.0;
    DistKind kind_ = DistKind::Uniform;
    Fn cdf_, pdf_, inv_hazard_;
};

// Numerical check that log F is concave on the interior of the support.
bool is_log_concave(const CostTypeDistribution& dist, int n_points = 400);

class CostModel;
enum class CostKind { Linear, Quadratic, General };

struct Scenario {
    GaussianPrior prior;
    CostTypeDistribution type_dist = CostTypeDistribution::uniform(0.0, 1.0);
    int n_agents = 3;
    CostKind cost_kind = CostKind::Linear;
    // Required when cost_kind == General.
    std::shared_ptr<const CostModel> general_cost;

    void validate() const;
};

struct Observation {
    double value = 0.0;
    double effort = 0.0;
    bool informative() const { return effort > 0.0; }
};

struct World {
    double x = 0.0;
    std::vector<double> types;
};

// Types are clamped to [lo + 1e-12, hi] so 1/theta stays finite.
inline constexpr double kTypeFloor = 1e-12;

World draw_world(const Scenario& scenario, std::uint64_t seed);
double draw_type(const CostTypeDistribution& dist, std::uint64_t seed, std::uint64_t trial, std::uint64_t agent);

// nullopt when effort is zero: the observation carries no information.
std::optional<double> draw_observation(double x, double effort, std::uint64_t seed);
// Same draw from an already generated standard normal.
std::optional<double> observation_from_noise(double x, double effort, double z);

struct Posterior {
    double mean = 0.0;
    double var = 0.0;
};

Posterior posterior_mean_var(const GaussianPrior& prior, std::span<const Observation> reports);

double principal_bayes_risk(const GaussianPrior& prior, std::span<const double> efforts);
double agent_bayes_risk(const GaussianPrior& prior, double q);
double agent_bayes_risk_dq(const GaussianPrior& prior, double q);

}  // namespace cope
