#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aep/engine.hpp"
#include "aep/model.hpp"

namespace aep {

struct VarRequest {
    JointModel model;
    double level = 0.99;
    int depth = 10;
    // Bisection stops once (high - low) <= tolerance * high.
    double tolerance = 1e-6;
    std::optional<double> bracket_hint;
    // depth/extrapolate here are overridden by the fields above and below.
    AepConfig engine{};
    bool extrapolate = true;
};

struct VarResult {
    double value = 0.0;
    // CDF estimate at `value`, and at the final bracket ends.
    double cdf = 0.0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    // |cdf(high) - cdf(low)|: secant slope times the bracket width.
    double cdf_tolerance = 0.0;
    // Extrapolated leaf-level magnitude at `value` (error proxy).
    double leaf_magnitude = 0.0;
    int engine_runs = 0;
    std::vector<std::string> warnings;
};

struct VarRange {
    double low = 0.0;
    double high = 0.0;
    double epsilon = 0.0;
    VarResult center;
};

// The AEP-estimated CDF of the sum at s, as configured by the request.
double aep_cdf(const VarRequest& req, double s);

// Value-at-risk: bracket by doubling from the hint, then bisect.
VarResult value_at_risk(const VarRequest& req);

// Inverts CDF = level -/+ epsilon, with epsilon the leaf magnitude at the VaR.
VarRange var_range(const VarRequest& req);
VarRange var_range(const VarRequest& req, double epsilon);

}  // namespace aep
