#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aep {

inline constexpr int kMaxDimension = 10;

// A probability carried together with its complement. Both halves are
// computed directly, so whichever one is small keeps full relative precision
// (1 - 1e-17 is not representable, but a complement of 1e-17 is).
struct Prob {
    double p = 0.0;
    double q = 1.0;

    static constexpr Prob zero() { return {0.0, 1.0}; }
    static constexpr Prob one() { return {1.0, 0.0}; }
    static Prob from_p(double p) { return {p, 1.0 - p}; }
};

class MarginalDistribution {
public:
    enum class Kind { Pareto, Exponential, Lognormal, Uniform };

    static MarginalDistribution pareto(double theta);
    static MarginalDistribution exponential(double rate);
    static MarginalDistribution lognormal(double mu, double sigma2);
    static MarginalDistribution uniform(double upper);

    Kind kind() const noexcept { return kind_; }
    std::string name() const;
    // Parameters in declaration order: theta | rate | (mu, sigma2) | upper.
    std::vector<double> parameters() const;

    double lower_bound() const noexcept { return 0.0; }
    // Right end of the support (infinity except for Uniform).
    double upper_bound() const noexcept;

    double cdf(double x) const { return cdf_pair(x).p; }
    Prob cdf_pair(double x) const;
    double density(double x) const;

    double quantile(double p) const;
    // Inverse from a (p, 1-p) pair; uses whichever half is more accurate.
    double quantile(Prob u) const;

private:
    MarginalDistribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;  // theta | rate | mu | upper
    double b_;  // sigma (not sigma^2) for Lognormal, unused otherwise
};

// Per-coordinate state handed to Copula::combine. `g` is the coordinate's
// image under the copula's generator (or a log-space variant of it).
struct CopulaCoord {
    double u = 0.0;
    double ubar = 1.0;
    double g = 0.0;
};

class Copula {
public:
    enum class Kind { Independence, Comonotone, Clayton, Gumbel, Frank };

    static Copula independence();
    static Copula comonotone();
    static Copula clayton(double delta);
    static Copula gumbel(double gamma);
    static Copula frank(double theta);

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    std::string name() const;

    // Throws ConfigError when the parameter is not admissible in dimension d.
    void validate(int d) const;

    double cdf(std::span<const double> u) const;
    Prob cdf(std::span<const Prob> u) const;

    // Split evaluation: prepare() each coordinate once, then combine() any
    // selection of prepared coordinates. Lets a hypercube reuse 2d
    // transforms across its 2^d corners.
    CopulaCoord prepare(Prob u) const;
    Prob combine(std::span<const CopulaCoord> coords) const;

private:
    Copula(Kind kind, double param);

    Kind kind_;
    double param_;
    double aux_;  // Frank: expm1(-theta)
};

class JointModel {
public:
    JointModel(std::vector<MarginalDistribution> marginals, Copula copula,
               std::vector<double> lower_bound = {});

    int dimension() const noexcept { return static_cast<int>(marginals_.size()); }
    const std::vector<MarginalDistribution>& marginals() const noexcept { return marginals_; }
    const Copula& copula() const noexcept { return copula_; }
    const std::vector<double>& lower_bound() const noexcept { return lower_bound_; }
    double lower_bound_sum() const noexcept;

    double joint_cdf(std::span<const double> x) const;
    Prob joint_cdf_pair(std::span<const double> x) const;

    // V_H of Q(b, h). h < 0 is read as Q(b + h*1, |h|). Rounding noise just
    // below zero is clamped to 0; genuinely negative sums are returned as-is.
    double hypercube_measure(std::span<const double> b, double h) const;

    // Marginal quantile of coordinate k, including the lower-bound shift.
    double marginal_quantile(int k, Prob u) const;

private:
    std::vector<MarginalDistribution> marginals_;
    Copula copula_;
    std::vector<double> lower_bound_;
};

// Inclusion-exclusion over the 2^d corners of a hypercube, reusing per-axis
// marginal and copula transforms. Holds scratch buffers, so one instance per
// thread.
class CubeEvaluator {
public:
    explicit CubeEvaluator(const JointModel& model);

    // Signed sum, not clamped.
    double measure(std::span<const double> b, double h);

private:
    const JointModel* model_;
    int d_;
    std::array<std::array<CopulaCoord, 2>, kMaxDimension> axis_{};
    std::vector<Prob> corners_;
    std::array<CopulaCoord, kMaxDimension> pick_{};
};

}  // namespace aep
