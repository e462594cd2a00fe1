#include "aep/quantile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "aep/errors.hpp"

namespace aep {

namespace {

constexpr int kMaxIterations = 200;

AepConfig engine_config(const VarRequest& req) {
    AepConfig cfg = req.engine;
    cfg.depth = req.depth;
    cfg.extrapolate = req.extrapolate;
    return cfg;
}

void validate(const VarRequest& req) {
    if (!(req.level > 0.0 && req.level < 1.0)) throw DomainError("VaR level must lie strictly inside (0,1)");
    if (!(req.tolerance > 0.0) || !std::isfinite(req.tolerance)) throw DomainError("VaR tolerance must be > 0");
    if (req.bracket_hint && !(*req.bracket_hint > 0.0 && std::isfinite(*req.bracket_hint)))
        throw DomainError("bracket hint must be finite and > 0");
}

struct Solved {
    double low, high;
    double cdf_low, cdf_high;
    int runs;
};

// Smallest s (to tolerance) with cdf(s) >= target, searched above the
// lower-bound sum `origin`.
template <class Cdf>
Solved invert(Cdf&& cdf, double target, double origin, double hint, double tolerance) {
    int runs = 0;
    auto eval = [&](double t) {
        ++runs;
        return cdf(origin + t);
    };

    double low = 0.0, cdf_low = 0.0;
    double high = hint;
    double cdf_high = eval(high);
    if (cdf_high < target) {
        int i = 0;
        while (cdf_high < target) {
            if (++i > kMaxIterations || !std::isfinite(high * 2.0)) {
                std::ostringstream os;
                os << "could not bracket level " << target << ": CDF stays at " << cdf_high << " up to s = "
                   << origin + high;
                throw ConvergenceError(os.str(), origin + low, origin + high);
            }
            low = high;
            cdf_low = cdf_high;
            high *= 2.0;
            cdf_high = eval(high);
        }
    } else {
        for (int i = 0; i < kMaxIterations; ++i) {
            const double half = high / 2.0;
            const double c = eval(half);
            if (c < target) {
                low = half;
                cdf_low = c;
                break;
            }
            high = half;
            cdf_high = c;
        }
    }

    for (int i = 0; i < kMaxIterations && (high - low) > tolerance * high; ++i) {
        const double mid = 0.5 * (low + high);
        const double c = eval(mid);
        if (c < target) {
            low = mid;
            cdf_low = c;
        } else {
            high = mid;
            cdf_high = c;
        }
    }
    if ((high - low) > tolerance * high)
        throw ConvergenceError("bisection did not reach the requested tolerance", origin + low, origin + high);
    return {origin + low, origin + high, cdf_low, cdf_high, runs};
}

}  // namespace

double aep_cdf(const VarRequest& req, double s) { return aep_run(req.model, s, engine_config(req)).estimate; }

VarResult value_at_risk(const VarRequest& req) {
    validate(req);
    const AepConfig cfg = engine_config(req);
    const double origin = req.model.lower_bound_sum();
    const auto solved = invert([&](double s) { return aep_run(req.model, s, cfg).estimate; }, req.level, origin,
                               req.bracket_hint.value_or(1.0), req.tolerance);

    VarResult out;
    out.value = 0.5 * (solved.low + solved.high);
    const AepResult at = aep_run(req.model, out.value, cfg);
    out.cdf = at.estimate;
    out.bracket_low = solved.low;
    out.bracket_high = solved.high;
    out.cdf_tolerance = std::fabs(solved.cdf_high - solved.cdf_low);
    out.leaf_magnitude = at.leaf_magnitude();
    out.engine_runs = solved.runs + 1;
    out.warnings = at.warnings;
    if (1.0 - req.level < 10.0 * out.leaf_magnitude) {
        std::ostringstream os;
        os << "level " << req.level << " is within 10x of the estimator's leaf-level error proxy ("
           << out.leaf_magnitude << "); increase n";
        out.warnings.push_back(os.str());
    }
    return out;
}

VarRange var_range(const VarRequest& req) {
    const VarResult center = value_at_risk(req);
    return var_range(req, center.leaf_magnitude);
}

VarRange var_range(const VarRequest& req, double epsilon) {
    validate(req);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("VaR range epsilon must be finite and >= 0");
    VarRange out;
    out.center = value_at_risk(req);
    out.epsilon = epsilon;
    if (epsilon == 0.0) {
        out.low = out.high = out.center.value;
        return out;
    }
    const AepConfig cfg = engine_config(req);
    const double origin = req.model.lower_bound_sum();
    auto cdf = [&](double s) { return aep_run(req.model, s, cfg).estimate; };
    const double hint = out.center.value - origin;

    const double lower_target = req.level - epsilon;
    if (lower_target <= 0.0) {
        out.low = origin;
    } else {
        const auto lo = invert(cdf, lower_target, origin, hint, req.tolerance);
        out.low = std::min(0.5 * (lo.low + lo.high), out.center.value);
    }
    const double upper_target = req.level + epsilon;
    if (upper_target >= 1.0) {
        out.high = std::numeric_limits<double>::infinity();
    } else {
        const auto hi = invert(cdf, upper_target, origin, hint, req.tolerance);
        out.high = std::max(0.5 * (hi.low + hi.high), out.center.value);
    }
    return out;
}

}  // namespace aep
