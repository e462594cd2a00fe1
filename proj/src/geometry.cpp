#include "aep/geometry.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aep/errors.hpp"
#include "aep/model.hpp"

namespace aep {

namespace {

Rational binomial(int n, int k) {
    Rational r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Rational pow_abs(Rational x, int e) {
    if (x < 0) x = -x;
    Rational r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

ExactFactor make_factor(Rational r) {
    return {r, static_cast<double>(r)};
}

// sum_{j=1}^d C(d,j) |1 - j alpha|^e
Rational power_sum(int d, const Rational& alpha, int e) {
    Rational s = 0;
    for (int j = 1; j <= d; ++j) s += binomial(d, j) * pow_abs(1 - j * alpha, e);
    return s;
}

void require_dimension(int d) {
    if (d < 2) throw DomainError("dimension must be >= 2");
}

}  // namespace

// ---------------------------------------------------------------------------
// RationalAlpha

RationalAlpha::RationalAlpha(std::int64_t numerator, std::int64_t denominator) {
    if (numerator <= 0 || denominator <= 0) throw ConfigError("alpha needs a positive numerator and denominator");
    const std::int64_t g = std::gcd(numerator, denominator);
    num_ = numerator / g;
    den_ = denominator / g;
}

RationalAlpha RationalAlpha::optimal(int d) {
    require_dimension(d);
    return {2, d + 1};
}

RationalAlpha RationalAlpha::parse(std::string_view text) {
    const auto slash = text.find('/');
    auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty())
            throw ConfigError("alpha must be written as p/q with positive integers, got '" + std::string(text) + "'");
        return v;
    };
    if (slash == std::string_view::npos) return {parse_int(text), 1};
    return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
}

std::string RationalAlpha::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

bool RationalAlpha::admissible(int d) const noexcept {
    return den_ <= static_cast<std::int64_t>(d) * num_ && num_ < den_;
}

void RationalAlpha::validate(int d) const {
    if (!admissible(d)) {
        std::ostringstream os;
        os << "alpha = " << str() << " is outside [1/" << d << ", 1)";
        throw ConfigError(os.str());
    }
}

// ---------------------------------------------------------------------------

int coefficient_m(CornerMask mask, const RationalAlpha& alpha, int d) {
    const int count = std::popcount(mask);
    // #i vs 1/alpha  <=>  #i * num vs den
    const std::int64_t lhs = static_cast<std::int64_t>(count) * alpha.numerator();
    if (lhs < alpha.denominator()) return ((1 + count) % 2 == 0) ? 1 : -1;
    if (lhs == alpha.denominator()) return 0;
    return ((d + 1 - count) % 2 == 0) ? 1 : -1;
}

DecompositionRule::DecompositionRule(int d, const RationalAlpha& alpha) : d_(d), alpha_(alpha) {
    require_dimension(d);
    if (d > kMaxDimension) throw ConfigError("dimension exceeds the supported maximum");
    alpha.validate(d);
    const CornerMask n = (CornerMask{1} << d) - 1;
    for (CornerMask mask = 1; mask <= n; ++mask) {
        const int m = coefficient_m(mask, alpha, d);
        const int count = std::popcount(mask);
        const std::int64_t hnum = alpha.denominator() - count * alpha.numerator();
        if (m == 0 || hnum == 0) continue;
        children_.push_back({mask, count, m, hnum});
    }
}

Decomposition decompose(const SignedTask& task, const RationalAlpha& alpha) {
    return decompose(task, DecompositionRule(static_cast<int>(task.simplex.b.size()), alpha));
}

Decomposition decompose(const SignedTask& task, const DecompositionRule& rule) {
    const auto& b = task.simplex.b;
    const double h = task.simplex.h;
    const int d = rule.dimension();
    if (static_cast<int>(b.size()) != d) throw DomainError("decompose: base point has the wrong dimension");
    if (h == 0.0) throw DomainError("decompose: empty simplex (h = 0)");

    Decomposition out;
    const double side = rule.cube_side(h);
    out.cube = {b, side};
    out.children.reserve(rule.children().size());
    for (const auto& c : rule.children()) {
        SignedTask child;
        child.simplex.b = b;
        for (int k = 0; k < d; ++k)
            if ((c.mask >> k) & 1u) child.simplex.b[k] += side;
        child.simplex.h = rule.child_height(c, h);
        if (child.simplex.h == 0.0) continue;
        child.sign = task.sign * c.coefficient;
        child.depth = task.depth + 1;
        out.children.push_back(std::move(child));
    }
    return out;
}

std::int64_t child_count(int d) {
    require_dimension(d);
    if (d > 62) throw DomainError("child_count: dimension too large");
    const std::int64_t all = (std::int64_t{1} << d) - 1;
    if (d % 2 == 0) return all;
    return all - static_cast<std::int64_t>(binomial(d, (d + 1) / 2));
}

ExactFactor volume_factor(int d, const RationalAlpha& alpha) {
    require_dimension(d);
    alpha.validate(d);
    return make_factor(power_sum(d, alpha.exact(), d));
}

ExactFactor extrap_factor(int d) {
    require_dimension(d);
    return make_factor(power_sum(d, RationalAlpha::optimal(d).exact(), d + 2));
}

ExactFactor gamma_factor(int d, const RationalAlpha& alpha) {
    require_dimension(d);
    if (alpha.numerator() >= alpha.denominator()) throw DomainError("gamma_factor: alpha must lie in (0,1)");
    const Rational a = alpha.exact();
    Rational spread = 1 - d * a;
    if (spread < 0) spread = -spread;
    return make_factor(std::max<Rational>(1 - a, spread));
}

ExactFactor extrapolation_ratio(int d) {
    require_dimension(d);
    Rational num = 1;
    Rational den = 1;
    for (int i = 1; i <= d; ++i) {
        num *= d + 1;
        den *= 2 * i;
    }
    return make_factor(num / den);
}

double simplex_lebesgue(double h, int d) {
    double v = 1.0;
    const double a = std::fabs(h);
    for (int i = 1; i <= d; ++i) v *= a / i;
    return v;
}

std::string to_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace aep
