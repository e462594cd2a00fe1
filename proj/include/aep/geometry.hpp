#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace aep {

using Rational = boost::multiprecision::cpp_rational;

// Decomposition parameter alpha = numerator / denominator, kept exact so
// that comparing #i_j against 1/alpha never depends on rounding.
class RationalAlpha {
public:
    RationalAlpha(std::int64_t numerator, std::int64_t denominator);

    // 2 / (d + 1), the minimiser of the volume factor.
    static RationalAlpha optimal(int d);
    // Parses "p/q" (or a bare integer, which is always rejected by validate()).
    static RationalAlpha parse(std::string_view text);

    std::int64_t numerator() const noexcept { return num_; }
    std::int64_t denominator() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    Rational exact() const { return Rational(num_, den_); }
    std::string str() const;

    // 1/d <= alpha < 1.
    bool admissible(int d) const noexcept;
    // Throws ConfigError unless admissible(d).
    void validate(int d) const;

    friend bool operator==(const RationalAlpha&, const RationalAlpha&) = default;

private:
    std::int64_t num_;
    std::int64_t den_;
};

// Bit k set <=> the corner vector i_j has a 1 in coordinate k.
using CornerMask = std::uint32_t;

int coefficient_m(CornerMask mask, const RationalAlpha& alpha, int d);

struct Simplex {
    std::vector<double> b;
    double h = 0.0;
};

struct SignedTask {
    Simplex simplex;
    int sign = 1;
    int depth = 1;
};

struct Hypercube {
    std::vector<double> b;
    double h = 0.0;
};

// One nonvanishing child of the decomposition: mask i_j, its coefficient
// m^j and the child height factor (1 - #i_j alpha) = height_numerator / den.
struct ChildRule {
    CornerMask mask;
    int count;
    int coefficient;
    std::int64_t height_numerator;
};

// The children of one decomposition step, shared by every simplex at a given
// (d, alpha). Children with m^j = 0 are omitted; order is increasing mask.
class DecompositionRule {
public:
    DecompositionRule(int d, const RationalAlpha& alpha);

    int dimension() const noexcept { return d_; }
    const RationalAlpha& alpha() const noexcept { return alpha_; }
    const std::vector<ChildRule>& children() const noexcept { return children_; }

    // alpha * h, rounded once.
    double cube_side(double h) const noexcept {
        return h * static_cast<double>(alpha_.numerator()) / static_cast<double>(alpha_.denominator());
    }
    // (1 - #i alpha) * h, rounded once.
    double child_height(const ChildRule& c, double h) const noexcept {
        return h * static_cast<double>(c.height_numerator) / static_cast<double>(alpha_.denominator());
    }

private:
    int d_;
    RationalAlpha alpha_;
    std::vector<ChildRule> children_;
};

struct Decomposition {
    Hypercube cube;
    std::vector<SignedTask> children;
};

Decomposition decompose(const SignedTask& task, const RationalAlpha& alpha);
Decomposition decompose(const SignedTask& task, const DecompositionRule& rule);

// Number of children per simplex at alpha = 2/(d+1).
std::int64_t child_count(int d);

struct ExactFactor {
    Rational exact;
    double value;
};

// sum_j C(d,j) |1 - j alpha|^d
ExactFactor volume_factor(int d, const RationalAlpha& alpha);
// sum_j C(d,j) |1 - j alpha*|^(d+2)
ExactFactor extrap_factor(int d);
// max{1 - alpha, |1 - d alpha|}
ExactFactor gamma_factor(int d, const RationalAlpha& alpha);
// (d+1)^d / (2^d d!)
ExactFactor extrapolation_ratio(int d);

double simplex_lebesgue(double h, int d);

std::string to_string(const Rational& r);

}  // namespace aep
