#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "aep/model.hpp"

namespace aep {

// Reproducible random stream: std::mt19937_64 (whose output sequence is fixed
// by the standard) seeded with splitmix64(seed, stream). All variate
// transforms below are implemented here rather than through <random>
// distributions, whose algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    // Open interval (0, 1), 53-bit resolution.
    double uniform();
    double exponential();
    double normal();
    // Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);
    // Positive stable law with Laplace transform exp(-t^alpha), 0 < alpha < 1 (Kanter).
    double positive_stable(double alpha);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Throws CapabilityError unless the model's copula can be sampled.
void check_samplable(const JointModel& model);

// One draw of (U_1..U_d) from the copula, as (u, 1-u) pairs.
void sample_copula(const Copula& copula, std::span<Prob> out, Rng& rng);
std::vector<double> sample_joint(const JointModel& model, Rng& rng);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Fraction of joint samples with sum <= s. Samples are drawn in fixed-size
// chunks with one substream each, so the result depends on (seed, M) only.
McEstimate mc_estimate(const JointModel& model, double s, std::uint64_t samples, std::uint64_t seed, int workers = 1);
// Same draws shared across several thresholds.
std::vector<McEstimate> mc_estimate_many(const JointModel& model, std::span<const double> thresholds,
                                         std::uint64_t samples, std::uint64_t seed, int workers = 1);
// Empirical level-quantile of the sum.
double mc_quantile(const JointModel& model, double level, std::uint64_t samples, std::uint64_t seed,
                   int workers = 1);

// P[X_1 + ... + X_d <= s] for independent marginals, d in {2, 3}, by nested
// adaptive Gauss-Kronrod quadrature of the convolution.
double independent_convolution_oracle(std::span<const MarginalDistribution> marginals, double s);

// P[X_1 + ... + X_d <= s] under comonotonicity: the u solving sum_k q_k(u) = s.
double comonotone_oracle(std::span<const MarginalDistribution> marginals, double s);

}  // namespace aep
