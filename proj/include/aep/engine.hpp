#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aep/geometry.hpp"
#include "aep/model.hpp"

namespace aep {

enum class Strategy { DepthFirst, BreadthFirst };
enum class EstimateMode { Plain, Extrapolated };

struct AepConfig {
    int depth = 10;
    // Defaults to 2/(d+1). Extrapolation is only defined at that value.
    std::optional<RationalAlpha> alpha;
    Strategy strategy = Strategy::DepthFirst;
    bool extrapolate = true;
    int workers = 1;
    bool compensated_sum = true;
    // Breadth-first keeps a whole level in memory; refuse beyond this.
    std::size_t bfs_memory_budget = std::size_t{1} << 30;
};

struct AepResult {
    int dimension = 0;
    bool extrapolated = false;
    double estimate = 0.0;
    // per_level[i-1] = sum_k s_i^k V_H[Q_i^k]
    std::vector<double> per_level;
    std::uint64_t evaluations = 0;
    double lebesgue_residual = 0.0;
    double shell_halfwidth = 0.0;
    std::vector<std::string> warnings;

    int depth() const noexcept { return static_cast<int>(per_level.size()); }
    double plain(int m) const;
    double extrapolated_at(int m) const;
    // |ratio * per_level[n]|, the size of the extrapolated leaf term.
    double leaf_magnitude() const;
};

// P_m (plain) or P*_m (extrapolated) from stored level sums, 1 <= m <= size.
double level_sums_to_estimates(std::span<const double> per_level, int d, EstimateMode mode, int m);

// M(n) = sum_{k<n} 2^d f_S(d)^k, the joint-CDF evaluations at alpha = 2/(d+1).
std::uint64_t evaluation_count(int d, int n);

struct RateBound {
    double error_factor;     // f_*(d)^n
    double polynomial_rate;  // ln f_*(d) / ln f_S(d)
};
RateBound rate_bound(int d, int n);

// V_H[Q(b, h)] for an arbitrary joint law; must be safe to call concurrently.
using CubeMeasure = std::function<double(std::span<const double> base, double side)>;

// Wraps a joint CDF into an inclusion-exclusion cube measure.
CubeMeasure cube_measure_from_cdf(std::function<double(std::span<const double>)> cdf, int d);

// P[X_1 + ... + X_d <= s].
AepResult aep_run(const JointModel& model, double s, const AepConfig& cfg);
AepResult aep_run(const CubeMeasure& measure, std::span<const double> lower_bound, double s,
                  const AepConfig& cfg);

}  // namespace aep
