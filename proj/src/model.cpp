#include "aep/model.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "aep/errors.hpp"

namespace aep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Below this the Clayton term u^{-delta} is treated as +inf (C = 0).
constexpr double kClaytonUnderflow = DBL_MIN;

// Hypercube sums in (-kClampTolerance, 0) are rounding noise.
constexpr double kClampTolerance = 1e-12;

// log(u) from a (u, 1-u) pair without cancellation near u = 1.
double log_of(const Prob& u) {
    if (u.p <= 0.0) return -kInf;
    return u.q < 0.5 ? std::log1p(-u.q) : std::log(u.p);
}

void require_finite_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream os;
        os << what << " must be finite and > 0 (got " << v << ")";
        throw ConfigError(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// MarginalDistribution

MarginalDistribution MarginalDistribution::pareto(double theta) {
    require_finite_positive(theta, "pareto theta");
    return {Kind::Pareto, theta, 0.0};
}

MarginalDistribution MarginalDistribution::exponential(double rate) {
    require_finite_positive(rate, "exponential rate");
    return {Kind::Exponential, rate, 0.0};
}

MarginalDistribution MarginalDistribution::lognormal(double mu, double sigma2) {
    if (!std::isfinite(mu)) throw ConfigError("lognormal mu must be finite");
    require_finite_positive(sigma2, "lognormal sigma2");
    return {Kind::Lognormal, mu, std::sqrt(sigma2)};
}

MarginalDistribution MarginalDistribution::uniform(double upper) {
    require_finite_positive(upper, "uniform upper bound");
    return {Kind::Uniform, upper, 0.0};
}

std::string MarginalDistribution::name() const {
    switch (kind_) {
        case Kind::Pareto: return "pareto";
        case Kind::Exponential: return "exponential";
        case Kind::Lognormal: return "lognormal";
        case Kind::Uniform: return "uniform";
    }
    return "unknown";
}

std::vector<double> MarginalDistribution::parameters() const {
    if (kind_ == Kind::Lognormal) return {a_, b_ * b_};
    return {a_};
}

double MarginalDistribution::upper_bound() const noexcept {
    return kind_ == Kind::Uniform ? a_ : kInf;
}

Prob MarginalDistribution::cdf_pair(double x) const {
    if (!std::isfinite(x)) throw DomainError("marginal cdf: x must be finite");
    if (x <= 0.0) return Prob::zero();
    switch (kind_) {
        case Kind::Pareto: {
            const double t = -a_ * std::log1p(x);
            return {-std::expm1(t), std::exp(t)};
        }
        case Kind::Exponential: {
            const double t = -a_ * x;
            return {-std::expm1(t), std::exp(t)};
        }
        case Kind::Lognormal: {
            const double z = (std::log(x) - a_) / b_;
            return {0.5 * std::erfc(-z / kSqrt2), 0.5 * std::erfc(z / kSqrt2)};
        }
        case Kind::Uniform:
            if (x >= a_) return Prob::one();
            return {x / a_, (a_ - x) / a_};
    }
    return Prob::zero();
}

double MarginalDistribution::density(double x) const {
    if (!std::isfinite(x)) throw DomainError("marginal density: x must be finite");
    if (x < 0.0) return 0.0;
    switch (kind_) {
        case Kind::Pareto: return a_ * std::exp(-(a_ + 1.0) * std::log1p(x));
        case Kind::Exponential: return a_ * std::exp(-a_ * x);
        case Kind::Lognormal: {
            if (x == 0.0) return 0.0;
            const double z = (std::log(x) - a_) / b_;
            return kInvSqrt2Pi / (x * b_) * std::exp(-0.5 * z * z);
        }
        case Kind::Uniform: return x <= a_ ? 1.0 / a_ : 0.0;
    }
    return 0.0;
}

double MarginalDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("marginal quantile: p must lie in [0,1)");
    return quantile(Prob::from_p(p));
}

double MarginalDistribution::quantile(Prob u) const {
    if (u.p <= 0.0) return 0.0;
    if (u.q <= 0.0) return upper_bound();
    switch (kind_) {
        case Kind::Pareto: return std::expm1(-log_of({u.q, u.p}) / a_);
        case Kind::Exponential: return -log_of({u.q, u.p}) / a_;
        case Kind::Lognormal: {
            const double z = u.p < 0.5 ? -kSqrt2 * boost::math::erfc_inv(2.0 * u.p)
                                       : kSqrt2 * boost::math::erfc_inv(2.0 * u.q);
            return std::exp(a_ + b_ * z);
        }
        case Kind::Uniform: return u.p < 0.5 ? u.p * a_ : a_ - u.q * a_;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Copula

Copula::Copula(Kind kind, double param) : kind_(kind), param_(param), aux_(0.0) {
    if (kind == Kind::Frank) aux_ = std::expm1(-param);
}

Copula Copula::independence() { return {Kind::Independence, 0.0}; }
Copula Copula::comonotone() { return {Kind::Comonotone, 0.0}; }

Copula Copula::clayton(double delta) {
    if (!std::isfinite(delta) || delta == 0.0 || delta < -1.0)
        throw ConfigError("clayton delta must be finite, nonzero and >= -1");
    return {Kind::Clayton, delta};
}

Copula Copula::gumbel(double gamma) {
    if (!std::isfinite(gamma) || gamma < 1.0) throw ConfigError("gumbel gamma must be finite and >= 1");
    return {Kind::Gumbel, gamma};
}

Copula Copula::frank(double theta) {
    if (!std::isfinite(theta) || theta == 0.0) throw ConfigError("frank theta must be finite and nonzero");
    return {Kind::Frank, theta};
}

std::string Copula::name() const {
    switch (kind_) {
        case Kind::Independence: return "independence";
        case Kind::Comonotone: return "comonotone";
        case Kind::Clayton: return "clayton";
        case Kind::Gumbel: return "gumbel";
        case Kind::Frank: return "frank";
    }
    return "unknown";
}

void Copula::validate(int d) const {
    if (d < 2) throw ConfigError("copula dimension must be >= 2");
    if (kind_ == Kind::Clayton && param_ < 0.0 && d > 2)
        throw ConfigError("clayton with negative delta is only supported for d = 2");
    if (kind_ == Kind::Frank && param_ < 0.0 && d > 2)
        throw ConfigError("frank with negative theta is only supported for d = 2");
}

CopulaCoord Copula::prepare(Prob u) const {
    CopulaCoord c{u.p, u.q, 0.0};
    switch (kind_) {
        case Kind::Independence: c.g = log_of(u); break;
        case Kind::Comonotone: break;
        case Kind::Clayton:
            if (param_ > 0.0 && u.p <= kClaytonUnderflow)
                c.g = kInf;
            else
                c.g = std::expm1(-param_ * log_of(u));
            break;
        case Kind::Gumbel: c.g = param_ * std::log(-log_of(u)); break;
        case Kind::Frank: c.g = std::expm1(-param_ * u.p); break;
    }
    return c;
}

Prob Copula::combine(std::span<const CopulaCoord> coords) const {
    bool all_one = true;
    for (const auto& c : coords) {
        if (c.u <= 0.0) return Prob::zero();
        if (c.ubar > 0.0) all_one = false;
    }
    if (all_one) return Prob::one();

    switch (kind_) {
        case Kind::Independence: {
            double t = 0.0;
            for (const auto& c : coords) t += c.g;
            return {std::exp(t), -std::expm1(t)};
        }
        case Kind::Comonotone: {
            Prob r = Prob::one();
            for (const auto& c : coords) {
                r.p = std::min(r.p, c.u);
                r.q = std::max(r.q, c.ubar);
            }
            return r;
        }
        case Kind::Clayton: {
            double t = 0.0;
            for (const auto& c : coords) t += c.g;
            if (std::isinf(t) || t <= -1.0) return Prob::zero();
            const double e = -std::log1p(t) / param_;
            return {std::exp(e), -std::expm1(e)};
        }
        case Kind::Gumbel: {
            double m = -kInf;
            for (const auto& c : coords) m = std::max(m, c.g);
            if (m == kInf) return Prob::zero();
            double s = 0.0;
            for (const auto& c : coords) s += std::exp(c.g - m);
            const double r = std::exp((m + std::log(s)) / param_);
            return {std::exp(-r), -std::expm1(-r)};
        }
        case Kind::Frank: {
            double ratio = 1.0;
            for (const auto& c : coords) ratio *= c.g / aux_;
            ratio *= aux_;
            const double p = -std::log1p(ratio) / param_;
            return {p, 1.0 - p};
        }
    }
    return Prob::zero();
}

double Copula::cdf(std::span<const double> u) const {
    std::vector<Prob> probs;
    probs.reserve(u.size());
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("copula cdf: arguments must lie in [0,1]");
        probs.push_back(Prob::from_p(v));
    }
    return cdf(probs).p;
}

Prob Copula::cdf(std::span<const Prob> u) const {
    validate(static_cast<int>(u.size()));
    std::vector<CopulaCoord> coords;
    coords.reserve(u.size());
    for (const auto& v : u) coords.push_back(prepare(v));
    return combine(coords);
}

// ---------------------------------------------------------------------------
// JointModel

JointModel::JointModel(std::vector<MarginalDistribution> marginals, Copula copula,
                       std::vector<double> lower_bound)
    : marginals_(std::move(marginals)), copula_(copula), lower_bound_(std::move(lower_bound)) {
    const int d = dimension();
    if (d < 2) throw ConfigError("model needs at least two marginals");
    if (d > kMaxDimension) {
        std::ostringstream os;
        os << "model dimension " << d << " exceeds the supported maximum " << kMaxDimension;
        throw ConfigError(os.str());
    }
    copula_.validate(d);
    if (lower_bound_.empty()) lower_bound_.assign(d, 0.0);
    if (static_cast<int>(lower_bound_.size()) != d)
        throw ConfigError("lower_bound must have one entry per marginal");
    for (double v : lower_bound_)
        if (!std::isfinite(v)) throw ConfigError("lower_bound entries must be finite");
}

double JointModel::lower_bound_sum() const noexcept {
    double s = 0.0;
    for (double v : lower_bound_) s += v;
    return s;
}

Prob JointModel::joint_cdf_pair(std::span<const double> x) const {
    const int d = dimension();
    if (static_cast<int>(x.size()) != d) throw DomainError("joint cdf: wrong number of coordinates");
    std::array<CopulaCoord, kMaxDimension> coords{};
    for (int k = 0; k < d; ++k) {
        const Prob f = marginals_[k].cdf_pair(x[k] - lower_bound_[k]);
        if (f.p <= 0.0) return Prob::zero();
        coords[k] = copula_.prepare(f);
    }
    return copula_.combine(std::span(coords.data(), d));
}

double JointModel::joint_cdf(std::span<const double> x) const { return joint_cdf_pair(x).p; }

double JointModel::hypercube_measure(std::span<const double> b, double h) const {
    if (static_cast<int>(b.size()) != dimension()) throw DomainError("hypercube: wrong number of coordinates");
    if (!std::isfinite(h)) throw DomainError("hypercube: side must be finite");
    for (double v : b)
        if (!std::isfinite(v)) throw DomainError("hypercube: base point must be finite");
    CubeEvaluator eval(*this);
    const double m = eval.measure(b, h);
    return (m < 0.0 && m > -kClampTolerance) ? 0.0 : m;
}

double JointModel::marginal_quantile(int k, Prob u) const {
    return lower_bound_.at(k) + marginals_.at(k).quantile(u);
}

// ---------------------------------------------------------------------------
// CubeEvaluator

CubeEvaluator::CubeEvaluator(const JointModel& model)
    : model_(&model), d_(model.dimension()), corners_(std::size_t{1} << model.dimension()) {}

double CubeEvaluator::measure(std::span<const double> b, double h) {
    if (h == 0.0) return 0.0;
    const auto& marginals = model_->marginals();
    const auto& lb = model_->lower_bound();
    const Copula& copula = model_->copula();

    for (int k = 0; k < d_; ++k) {
        const double lo = h > 0.0 ? b[k] : b[k] + h;
        const double hi = h > 0.0 ? b[k] + h : b[k];
        const Prob f_hi = marginals[k].cdf_pair(hi - lb[k]);
        // The whole box lies below the support on this axis.
        if (f_hi.p <= 0.0) return 0.0;
        axis_[k][0] = copula.prepare(marginals[k].cdf_pair(lo - lb[k]));
        axis_[k][1] = copula.prepare(f_hi);
    }

    const unsigned n_corners = 1u << d_;
    for (unsigned mask = 0; mask < n_corners; ++mask) {
        for (int k = 0; k < d_; ++k) pick_[k] = axis_[k][(mask >> k) & 1u];
        corners_[mask] = copula.combine(std::span(pick_.data(), d_));
    }

    // The alternating signs sum to zero, so H may be replaced by H - 1 = -(1 - H)
    // at every corner. When even the lowest corner is above 1/2 the complements
    // are the small, accurately known quantities.
    const bool use_complement = corners_[0].p > 0.5;
    double sum = 0.0;
    for (unsigned mask = 0; mask < n_corners; ++mask) {
        const bool positive = ((d_ - std::popcount(mask)) & 1) == 0;
        const double v = use_complement ? -corners_[mask].q : corners_[mask].p;
        sum += positive ? v : -v;
    }
    return sum;
}

}  // namespace aep
