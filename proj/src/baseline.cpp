#include "aep/baseline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "aep/errors.hpp"

namespace aep {

namespace {

constexpr std::uint64_t kChunk = 1 << 16;
constexpr std::uint64_t kMinSamples = 1000;

template <class Fn>
void parallel_chunks(std::uint64_t chunks, int workers, Fn&& fn) {
    const auto threads = static_cast<std::uint64_t>(std::max(1, workers));
    if (threads <= 1 || chunks <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (std::uint64_t t = 0; t < std::min(threads, chunks); ++t)
        pool.emplace_back([&] {
            for (auto c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) fn(c);
        });
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-11, &err);
}

// Splits [0, upper] at the given kinks and at geometric points so that heavy
// tails and support edges each land on a panel boundary.
double integrate_pieces(const std::function<double(double)>& f, double upper, std::vector<double> kinks) {
    std::set<double> cuts{0.0, upper};
    for (double x = 0.5; x < upper; x *= 4.0) cuts.insert(x);
    for (double k : kinks)
        if (k > 0.0 && k < upper) cuts.insert(k);
    double total = 0.0;
    for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) total += integrate(f, *it, *std::next(it));
    return total;
}

// P[X + Y <= t] for independent X ~ a, Y ~ b.
double convolve2(const MarginalDistribution& a, const MarginalDistribution& b, double t) {
    if (t <= 0.0) return 0.0;
    const double upper = std::min(t, a.upper_bound());
    auto f = [&](double x) { return a.density(x) * b.cdf(std::max(0.0, t - x)); };
    return integrate_pieces(f, upper, {a.upper_bound(), t - b.upper_bound()});
}

}  // namespace

// ---------------------------------------------------------------------------
// Rng

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull))) {}

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
}

double Rng::gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

double Rng::positive_stable(double alpha) {
    const double theta = std::numbers::pi * uniform();
    const double w = exponential();
    const double a = std::sin(alpha * theta) / std::pow(std::sin(theta), 1.0 / alpha);
    return a * std::pow(std::sin((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
}

// ---------------------------------------------------------------------------
// Sampling

void check_samplable(const JointModel& model) {
    const Copula& c = model.copula();
    switch (c.kind()) {
        case Copula::Kind::Clayton:
            if (c.parameter() <= 0.0) throw CapabilityError("sampling a Clayton copula needs delta > 0");
            break;
        case Copula::Kind::Frank:
            if (model.dimension() != 2) throw CapabilityError("sampling a Frank copula is only supported for d = 2");
            break;
        default: break;
    }
}

void sample_copula(const Copula& copula, std::span<Prob> out, Rng& rng) {
    switch (copula.kind()) {
        case Copula::Kind::Independence:
            for (auto& u : out) u = Prob::from_p(rng.uniform());
            break;
        case Copula::Kind::Comonotone: {
            const Prob u = Prob::from_p(rng.uniform());
            for (auto& v : out) v = u;
            break;
        }
        case Copula::Kind::Clayton: {
            const double delta = copula.parameter();
            if (delta <= 0.0) throw CapabilityError("sampling a Clayton copula needs delta > 0");
            const double v = rng.gamma(1.0 / delta);
            for (auto& u : out) {
                // psi(t) = (1 + t)^(-1/delta)
                const double e = -std::log1p(rng.exponential() / v) / delta;
                u = {std::exp(e), -std::expm1(e)};
            }
            break;
        }
        case Copula::Kind::Gumbel: {
            const double gamma = copula.parameter();
            if (gamma == 1.0) {
                for (auto& u : out) u = Prob::from_p(rng.uniform());
                break;
            }
            const double v = rng.positive_stable(1.0 / gamma);
            for (auto& u : out) {
                // psi(t) = exp(-t^(1/gamma))
                const double r = std::pow(rng.exponential() / v, 1.0 / gamma);
                u = {std::exp(-r), -std::expm1(-r)};
            }
            break;
        }
        case Copula::Kind::Frank: {
            if (out.size() != 2) throw CapabilityError("sampling a Frank copula is only supported for d = 2");
            const double theta = copula.parameter();
            const double u1 = rng.uniform();
            const double w = rng.uniform();
            // Conditional inversion of dC/du1.
            const double u2 = -std::log1p(w * std::expm1(-theta) / (w + (1.0 - w) * std::exp(-theta * u1))) / theta;
            out[0] = Prob::from_p(u1);
            out[1] = Prob::from_p(std::clamp(u2, 0.0, 1.0));
            break;
        }
    }
}

std::vector<double> sample_joint(const JointModel& model, Rng& rng) {
    check_samplable(model);
    const int d = model.dimension();
    std::array<Prob, kMaxDimension> u{};
    sample_copula(model.copula(), std::span(u.data(), d), rng);
    std::vector<double> x(d);
    for (int k = 0; k < d; ++k) x[k] = model.marginal_quantile(k, u[k]);
    return x;
}

namespace {

// Calls sink(chunk, sum) for every sample; sums are grouped by chunk.
template <class Sink>
void for_each_sum(const JointModel& model, std::uint64_t samples, std::uint64_t seed, int workers, Sink&& sink) {
    check_samplable(model);
    const int d = model.dimension();
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    parallel_chunks(chunks, workers, [&](std::uint64_t c) {
        Rng rng(seed, c);
        std::array<Prob, kMaxDimension> u{};
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(samples, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) {
            sample_copula(model.copula(), std::span(u.data(), d), rng);
            double sum = 0.0;
            for (int k = 0; k < d; ++k) sum += model.marginal_quantile(k, u[k]);
            sink(c, i, sum);
        }
    });
}

}  // namespace

std::vector<McEstimate> mc_estimate_many(const JointModel& model, std::span<const double> thresholds,
                                         std::uint64_t samples, std::uint64_t seed, int workers) {
    if (samples < kMinSamples) throw DomainError("Monte Carlo needs at least 1000 samples");
    for (double s : thresholds)
        if (std::isnan(s)) throw DomainError("Monte Carlo threshold must not be NaN");
    const std::size_t m = thresholds.size();
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> counts(chunks * m, 0);
    for_each_sum(model, samples, seed, workers, [&](std::uint64_t c, std::uint64_t, double sum) {
        for (std::size_t j = 0; j < m; ++j)
            if (sum <= thresholds[j]) ++counts[c * m + j];
    });
    std::vector<McEstimate> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::uint64_t hits = 0;
        for (std::uint64_t c = 0; c < chunks; ++c) hits += counts[c * m + j];
        const double p = static_cast<double>(hits) / static_cast<double>(samples);
        out[j] = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, seed};
    }
    return out;
}

McEstimate mc_estimate(const JointModel& model, double s, std::uint64_t samples, std::uint64_t seed, int workers) {
    const double t[] = {s};
    return mc_estimate_many(model, t, samples, seed, workers).front();
}

double mc_quantile(const JointModel& model, double level, std::uint64_t samples, std::uint64_t seed, int workers) {
    if (samples < kMinSamples) throw DomainError("Monte Carlo needs at least 1000 samples");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("quantile level must lie inside (0,1)");
    std::vector<double> sums(samples);
    for_each_sum(model, samples, seed, workers, [&](std::uint64_t, std::uint64_t i, double sum) { sums[i] = sum; });
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(samples))) - 1;
    std::nth_element(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(k), sums.end());
    return sums[k];
}

// ---------------------------------------------------------------------------
// Oracles

double independent_convolution_oracle(std::span<const MarginalDistribution> marginals, double s) {
    if (std::isnan(s)) throw DomainError("oracle threshold must not be NaN");
    if (marginals.size() == 2) return convolve2(marginals[0], marginals[1], s);
    if (marginals.size() != 3)
        throw CapabilityError("the convolution oracle supports d = 2 and d = 3 only");
    if (s <= 0.0) return 0.0;
    const auto& a = marginals[0];
    const auto& b = marginals[1];
    const auto& c = marginals[2];
    const double upper = std::min(s, a.upper_bound());
    auto f = [&](double x) {
        const double fx = a.density(x);
        return fx == 0.0 ? 0.0 : fx * convolve2(b, c, s - x);
    };
    return integrate_pieces(f, upper,
                            {a.upper_bound(), s - b.upper_bound(), s - c.upper_bound(),
                             s - b.upper_bound() - c.upper_bound()});
}

double comonotone_oracle(std::span<const MarginalDistribution> marginals, double s) {
    if (std::isnan(s)) throw DomainError("oracle threshold must not be NaN");
    if (marginals.empty()) throw DomainError("comonotone oracle needs at least one marginal");
    if (s <= 0.0) return 0.0;
    double total_upper = 0.0;
    for (const auto& m : marginals) total_upper += m.upper_bound();
    if (s >= total_upper) return 1.0;

    // Bisect on the survival level w = 1 - u; the quantile sum decreases in w.
    auto sum_at = [&](double w) {
        double t = 0.0;
        for (const auto& m : marginals) t += m.quantile(Prob{1.0 - w, w});
        return t;
    };
    double lo = 0.0;  // sum = +inf (or the upper bound)
    double hi = 1.0;  // sum = 0
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (sum_at(mid) > s)
            lo = mid;
        else
            hi = mid;
    }
    return 1.0 - 0.5 * (lo + hi);
}

}  // namespace aep
