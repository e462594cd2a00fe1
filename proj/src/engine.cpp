#include "aep/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

#include "aep/errors.hpp"

namespace aep {

namespace {

// Neumaier's variant of Kahan summation.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x, bool compensated) {
        if (!compensated) {
            sum += x;
            return;
        }
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    void merge(const Accumulator& other, bool compensated) {
        add(other.sum, compensated);
        add(other.comp, compensated);
    }

    double value() const { return sum + comp; }
};

struct Node {
    std::array<double, kMaxDimension> b;
    double h;
    int sign;
    int depth;
};

// Subtrees handed to workers are cut at the first level whose expansion
// would exceed this many nodes. Depends only on (d, n), so the summation
// order, and hence the result, is the same for every worker count.
constexpr std::size_t kMaxSubtrees = 4096;
constexpr std::size_t kBfsChunk = 4096;

void expand(const Node& node, const DecompositionRule& rule, int d, std::vector<Node>& out) {
    const double side = rule.cube_side(node.h);
    for (const auto& c : rule.children()) {
        Node child = node;
        for (int k = 0; k < d; ++k)
            if ((c.mask >> k) & 1u) child.b[k] += side;
        child.h = rule.child_height(c, node.h);
        if (child.h == 0.0) continue;
        child.sign = node.sign * c.coefficient;
        child.depth = node.depth + 1;
        out.push_back(child);
    }
}

// Runs fn(i) for i in [0, count) on `workers` threads, pulling indices in order.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i, t);
        });
    }
}

struct LevelSums {
    std::vector<Accumulator> levels;
    std::uint64_t cubes = 0;
};

template <class Measure>
void depth_first(const Node& root, const DecompositionRule& rule, int d, int n, bool compensated,
                 Measure& measure, LevelSums& out) {
    std::vector<Node> stack;
    std::vector<Node> children;
    stack.reserve(static_cast<std::size_t>(n) * rule.children().size() + 1);
    stack.push_back(root);
    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        const double v = measure(std::span<const double>(node.b.data(), d), rule.cube_side(node.h));
        out.levels[node.depth - 1].add(node.sign * v, compensated);
        ++out.cubes;
        if (node.depth < n) {
            children.clear();
            expand(node, rule, d, children);
            stack.insert(stack.end(), children.rbegin(), children.rend());
        }
    }
}

template <class MakeMeasure>
AepResult run(MakeMeasure&& make_measure, int d, std::span<const double> lower_bound, double s,
              const AepConfig& cfg) {
    if (!std::isfinite(s)) throw DomainError("threshold s must be finite");
    if (d < 2) throw ConfigError("the sum needs at least two variables (d >= 2)");
    if (d > kMaxDimension) throw ConfigError("dimension exceeds the supported maximum");
    if (static_cast<int>(lower_bound.size()) != d) throw ConfigError("lower bound has the wrong dimension");
    if (cfg.depth < 1) throw ConfigError("depth n must be >= 1");
    if (cfg.workers < 1) throw ConfigError("worker count must be >= 1");

    const RationalAlpha alpha = cfg.alpha.value_or(RationalAlpha::optimal(d));
    const DecompositionRule rule(d, alpha);
    if (cfg.extrapolate && !(alpha == RationalAlpha::optimal(d)))
        throw ConfigError("extrapolation requires alpha = 2/(d+1); got " + alpha.str());

    const int n = cfg.depth;
    AepResult result;
    result.dimension = d;
    result.extrapolated = cfg.extrapolate;
    result.per_level.assign(n, 0.0);
    if (d > 8)
        result.warnings.push_back("d > 8: convergence is not guaranteed even with extrapolation");
    else if (d > 5)
        result.warnings.push_back("d > 5: only the extrapolated estimator is known to converge");

    double root_h = s;
    for (double v : lower_bound) root_h -= v;
    if (root_h <= 0.0) return result;

    Node root{};
    std::copy(lower_bound.begin(), lower_bound.end(), root.b.begin());
    root.h = root_h;
    root.sign = 1;
    root.depth = 1;

    const bool compensated = cfg.compensated_sum;
    std::vector<Accumulator> total(n);
    std::uint64_t cubes = 0;
    const std::size_t fanout = rule.children().size();

    if (cfg.strategy == Strategy::BreadthFirst) {
        double widest = 1.0;
        for (int i = 1; i < n; ++i) widest *= static_cast<double>(fanout);
        const double bytes = widest * static_cast<double>(sizeof(Node));
        if (bytes > static_cast<double>(cfg.bfs_memory_budget)) {
            std::ostringstream os;
            os << "breadth-first traversal needs about " << bytes / (1024.0 * 1024.0)
               << " MiB for depth " << n << ", over the budget of "
               << static_cast<double>(cfg.bfs_memory_budget) / (1024.0 * 1024.0)
               << " MiB; use the depth-first strategy instead";
            throw ResourceError(os.str());
        }
        std::vector<Node> level{root};
        std::vector<Node> next;
        for (int depth = 1; depth <= n; ++depth) {
            const std::size_t chunks = (level.size() + kBfsChunk - 1) / kBfsChunk;
            std::vector<Accumulator> partial(chunks);
            std::vector<decltype(make_measure())> measures;
            for (int t = 0; t < cfg.workers; ++t) measures.push_back(make_measure());
            parallel_for(chunks, cfg.workers, [&](std::size_t c, int worker) {
                const std::size_t end = std::min(level.size(), (c + 1) * kBfsChunk);
                for (std::size_t i = c * kBfsChunk; i < end; ++i) {
                    const Node& node = level[i];
                    const double v =
                        measures[worker](std::span<const double>(node.b.data(), d), rule.cube_side(node.h));
                    partial[c].add(node.sign * v, compensated);
                }
            });
            for (const auto& p : partial) total[depth - 1].merge(p, compensated);
            cubes += level.size();
            if (depth == n) break;
            next.clear();
            next.reserve(level.size() * fanout);
            for (const auto& node : level) expand(node, rule, d, next);
            level.swap(next);
        }
    } else {
        // Measure the top of the tree here until the frontier is wide enough
        // to hand out as independent subtrees.
        auto top_measure = make_measure();
        std::vector<Node> frontier{root};
        std::vector<Node> next;
        while (frontier.front().depth < n && frontier.size() * fanout <= kMaxSubtrees) {
            next.clear();
            for (const auto& node : frontier) {
                const double v =
                    top_measure(std::span<const double>(node.b.data(), d), rule.cube_side(node.h));
                total[node.depth - 1].add(node.sign * v, compensated);
                ++cubes;
                expand(node, rule, d, next);
            }
            frontier.swap(next);
            if (frontier.empty()) break;
        }

        std::vector<LevelSums> sub(frontier.size());
        std::vector<decltype(make_measure())> measures;
        for (int t = 0; t < cfg.workers; ++t) measures.push_back(make_measure());
        parallel_for(frontier.size(), cfg.workers, [&](std::size_t i, int worker) {
            sub[i].levels.assign(n, {});
            depth_first(frontier[i], rule, d, n, compensated, measures[worker], sub[i]);
        });
        for (const auto& part : sub) {
            for (int i = 0; i < n; ++i) total[i].merge(part.levels[i], compensated);
            cubes += part.cubes;
        }
    }

    for (int i = 0; i < n; ++i) result.per_level[i] = total[i].value();
    result.evaluations = cubes << d;
    result.estimate = level_sums_to_estimates(result.per_level, d,
                                              cfg.extrapolate ? EstimateMode::Extrapolated : EstimateMode::Plain, n);
    result.lebesgue_residual = simplex_lebesgue(root_h, d) * std::pow(volume_factor(d, alpha).value, n);
    result.shell_halfwidth = std::pow(gamma_factor(d, alpha).value, n) * root_h;
    return result;
}

}  // namespace

double AepResult::plain(int m) const {
    return level_sums_to_estimates(per_level, dimension, EstimateMode::Plain, m);
}

double AepResult::extrapolated_at(int m) const {
    return level_sums_to_estimates(per_level, dimension, EstimateMode::Extrapolated, m);
}

double AepResult::leaf_magnitude() const {
    if (per_level.empty()) return 0.0;
    return std::fabs(extrapolation_ratio(dimension).value * per_level.back());
}

double level_sums_to_estimates(std::span<const double> per_level, int d, EstimateMode mode, int m) {
    if (m < 1 || static_cast<std::size_t>(m) > per_level.size()) {
        std::ostringstream os;
        os << "level " << m << " is out of range [1, " << per_level.size() << "]";
        throw DomainError(os.str());
    }
    Accumulator acc;
    for (int i = 0; i + 1 < m; ++i) acc.add(per_level[i], true);
    const double leaf = per_level[m - 1];
    acc.add(mode == EstimateMode::Extrapolated ? extrapolation_ratio(d).value * leaf : leaf, true);
    return acc.value();
}

std::uint64_t evaluation_count(int d, int n) {
    if (d < 2 || d > 62) throw DomainError("evaluation_count: dimension out of range");
    if (n < 1) throw DomainError("evaluation_count: depth must be >= 1");
    const auto fs = static_cast<unsigned __int128>(child_count(d));
    unsigned __int128 term = 1;
    unsigned __int128 total = 0;
    for (int k = 0; k < n; ++k) {
        total += term;
        term *= fs;
        if (total > (~std::uint64_t{0} >> d)) throw DomainError("evaluation_count overflows 64 bits");
    }
    return static_cast<std::uint64_t>(total) << d;
}

RateBound rate_bound(int d, int n) {
    if (d > 8) throw CapabilityError("rate bound is only defined for d <= 8 (f_*(d) >= 1 beyond)");
    const double fstar = extrap_factor(d).value;
    return {std::pow(fstar, n), std::log(fstar) / std::log(static_cast<double>(child_count(d)))};
}

CubeMeasure cube_measure_from_cdf(std::function<double(std::span<const double>)> cdf, int d) {
    if (d < 2 || d > kMaxDimension) throw ConfigError("cube_measure_from_cdf: dimension out of range");
    return [cdf = std::move(cdf), d](std::span<const double> b, double h) {
        if (h == 0.0) return 0.0;
        std::array<double, kMaxDimension> x{};
        double sum = 0.0;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            for (int k = 0; k < d; ++k) {
                const double lo = h > 0.0 ? b[k] : b[k] + h;
                const double hi = h > 0.0 ? b[k] + h : b[k];
                x[k] = ((mask >> k) & 1u) ? hi : lo;
            }
            const double v = cdf(std::span<const double>(x.data(), d));
            sum += ((d - std::popcount(mask)) % 2 == 0) ? v : -v;
        }
        return sum;
    };
}

AepResult aep_run(const JointModel& model, double s, const AepConfig& cfg) {
    auto make = [&model] {
        return [eval = CubeEvaluator(model)](std::span<const double> b, double h) mutable { return eval.measure(b, h); };
    };
    return run(make, model.dimension(), model.lower_bound(), s, cfg);
}

AepResult aep_run(const CubeMeasure& measure, std::span<const double> lower_bound, double s,
                  const AepConfig& cfg) {
    auto make = [&measure] { return [&measure](std::span<const double> b, double h) { return measure(b, h); }; };
    return run(make, static_cast<int>(lower_bound.size()), lower_bound, s, cfg);
}

}  // namespace aep
