// Acceptance suite: one PASS/FAIL line per numbered requirement. Exit code is
// nonzero when any line fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "aep/baseline.hpp"
#include "aep/engine.hpp"
#include "aep/errors.hpp"
#include "aep/geometry.hpp"
#include "aep/model.hpp"
#include "aep/quantile.hpp"

using namespace aep;
using M = MarginalDistribution;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, title.c_str());
    std::istringstream lines(detail);
    for (std::string l; std::getline(lines, l);) std::printf("       %s\n", l.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<M> paretos(std::vector<double> thetas) {
    std::vector<M> out;
    for (double t : thetas) out.push_back(M::pareto(t));
    return out;
}

AepResult run(const JointModel& m, double s, int n) {
    AepConfig c;
    c.depth = n;
    return aep_run(m, s, c);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---------------------------------------------------------------------------

void deep_two_dimensional() {
    const JointModel m(paretos({0.9, 1.8}), Copula::clayton(1.2));
    const double s[] = {1.0, 1e2, 1e4, 1e6};
    const double ref16[] = {0.315835041363441, 0.983690398913354, 0.999748719229367, 0.999996018908404};
    const double diff13[] = {-3.97e-14, -6.64e-13, -1.24e-12, -7.80e-13};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        const auto t = std::chrono::steady_clock::now();
        const auto r = run(m, s[i], 16);
        const double p16 = r.plain(16);
        const double d13 = r.plain(13) - p16;
        const bool value_ok = i != 0 || std::fabs(p16 - ref16[0]) <= 1e-12;
        const bool diff_ok = std::fabs(d13 - diff13[i]) <= 1e-12;
        ok = ok && value_ok && diff_ok;
        detail += fmt("s=%-7g P16=%.15f (ref %.15f, %+.2e)  P13-P16=%+.3e (ref %+.2e, |gap| %.2e %s)  %.1fs\n",
                      s[i], p16, ref16[i], p16 - ref16[i], d13, diff13[i], std::fabs(d13 - diff13[i]),
                      diff_ok ? "ok" : "> 1e-12", seconds_since(t));
    }
    report(1, "d=2 Clayton(1.2) Pareto(0.9,1.8): P16(1) to 1e-12, P13-P16 differences to 1e-12", ok, detail);
}

void deep_three_dimensional() {
    const JointModel m(paretos({0.9, 1.8, 2.6}), Copula::clayton(0.4));
    const double s[] = {1.0, 1e2, 1e4, 1e6};
    const double ref13[] = {0.190859309689430, 0.983659549676444, 0.999748708770280, 0.999996018515584};
    // Extrapolated differences P*_n - P_13 at n = 7, 9, 11.
    const double diffs[4][3] = {{+8.80e-07, +3.31e-08, +1.32e-09},
                                {+1.13e-06, +3.01e-07, +1.11e-08},
                                {-1.12e-06, -2.39e-07, -2.95e-08},
                                {-1.83e-08, -4.26e-09, -7.66e-10}};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        const auto t = std::chrono::steady_clock::now();
        const auto r = run(m, s[i], 13);
        const double p13 = r.plain(13);
        if (i == 0) ok = ok && std::fabs(p13 - ref13[0]) <= 1e-9;
        detail += fmt("s=%-7g P13=%.15f (ref %.15f, %+.2e)", s[i], p13, ref13[i], p13 - ref13[i]);
        const int levels[] = {7, 9, 11};
        for (int j = 0; j < 3; ++j) {
            const double d = r.extrapolated_at(levels[j]) - p13;
            const double ratio = d / diffs[i][j];
            const bool good = ratio >= 1.0 / 3.0 && ratio <= 3.0;
            ok = ok && good;
            detail += fmt("  %d*:%+.2e/%+.2e%s", levels[j], d, diffs[i][j], good ? "" : "(x)");
        }
        detail += fmt("  %.1fs\n", seconds_since(t));
    }
    report(2, "d=3 Clayton(0.4): P13(1) to 1e-9, extrapolated differences within a factor 3 with matching sign", ok,
           detail);
}

void higher_dimensions() {
    auto t = std::chrono::steady_clock::now();
    const JointModel m4(paretos({0.9, 1.8, 2.6, 3.3}), Copula::clayton(0.2));
    const auto r4 = run(m4, 10.0, 7);
    const double t4 = seconds_since(t);
    t = std::chrono::steady_clock::now();
    const JointModel m5(paretos({0.9, 1.8, 2.6, 3.3, 4.0}), Copula::clayton(0.3));
    const auto r5 = run(m5, 10.0, 6);
    const double t5 = seconds_since(t);
    const double p4 = r4.plain(7);
    const double p5 = r5.extrapolated_at(6);
    const bool ok = std::fabs(p4 - 0.833447516734442) <= 1e-6 && std::fabs(p5 - 0.824132635126808) <= 1e-6 &&
                    t4 < 600 && t5 < 600;
    report(3, "d=4 P7(10) and d=5 P6(10) to 1e-6 within 10 minutes each", ok,
           fmt("d=4 P7(10)  = %.15f (ref 0.833447516734442, %+.2e) %.1fs\n", p4, p4 - 0.833447516734442, t4) +
               fmt("d=5 P*6(10) = %.15f (ref 0.824132635126808, %+.2e) %.1fs; plain P6 = %.15f\n", p5,
                   p5 - 0.824132635126808, t5, r5.plain(6)) +
               "the d=5 reference value is the extrapolated estimate; the plain P6 is 4e-3 lower");
}

void exact_endpoints() {
    bool ok = true;
    std::string detail;
    auto row = [&](const char* name, const JointModel& m, double s, int n, double expected, double oracle) {
        const double p = run(m, s, n).estimate;
        const bool good = std::fabs(p - expected) <= 1e-6;
        ok = ok && good;
        detail += fmt("%-28s s=%-4g n=%-2d AEP*=%.9f expected %.7f (oracle %.9f) %s\n", name, s, n, p, expected,
                      oracle, good ? "ok" : "MISS");
    };
    const auto two = paretos({1, 2});
    const auto three = paretos({1, 2, 3});
    row("d=2 independence", JointModel(two, Copula::independence()), 1.0, 12, 0.2862004,
        independent_convolution_oracle(two, 1.0));
    row("d=2 comonotone", JointModel(two, Copula::comonotone()), 1.0, 12, 0.4108027, comonotone_oracle(two, 1.0));
    row("d=3 independence", JointModel(three, Copula::independence()), 1.0, 11, 0.1709337,
        independent_convolution_oracle(three, 1.0));
    // 0.1709337 is the s = 1 value; at s = 10 compare against the oracle.
    const double o10 = independent_convolution_oracle(three, 10.0);
    row("d=3 independence (s=10)", JointModel(three, Copula::independence()), 10.0, 11, o10, o10);
    report(4, "independence and comonotone endpoints to 1e-6", ok, detail);
}

void factor_tables() {
    bool ok = true;
    std::string detail;
    const char* f[] = {"1/3", "1/2", "83/125", "23/27"};
    for (int d = 2; d <= 5; ++d) {
        const auto v = to_string(volume_factor(d, RationalAlpha::optimal(d)).exact);
        ok = ok && v == f[d - 2];
        detail += "f(a*) d=" + std::to_string(d) + ": " + v + "  ";
    }
    detail += "\n";
    const std::int64_t fs[] = {3, 4, 15, 21, 63, 92, 255, 385};
    const char* fstar[] = {"0.0370", "0.1250", "0.2339", "0.3580", "0.4982", "0.6556", "0.8314"};
    for (int d = 2; d <= 9; ++d) {
        ok = ok && child_count(d) == fs[d - 2];
        const auto e = extrap_factor(d);
        const std::string shown = fmt("%.4f", e.value);
        if (d <= 8) ok = ok && shown == fstar[d - 2];
        else ok = ok && e.value > 1.0;
        detail += fmt("d=%d f_S=%lld f_*=%s (%s)\n", d, static_cast<long long>(child_count(d)), shown.c_str(),
                      to_string(e.exact).c_str());
    }
    ok = ok && to_string(extrap_factor(2).exact) == "1/27";
    report(5, "exact volume factors, new-simplex counts and extrapolation error ratios", ok, detail);
}

void extrapolation_exactness() {
    bool ok = true;
    std::string detail;
    for (int d = 2; d <= 5; ++d) {
        double fact = 1.0;
        for (int i = 2; i <= d; ++i) fact *= i;
        double worst = 0.0;
        const double upper = 3.0;
        const JointModel m(std::vector<M>(d, M::uniform(upper)), Copula::independence());
        for (double s : {0.1, 0.5, 1.0, 2.0, 3.0}) {
            const double exact = std::pow(s / upper, d) / fact;
            worst = std::max(worst, std::fabs(run(m, s, 1).estimate - exact));
        }
        ok = ok && worst <= 1e-14;
        detail += fmt("d=%d max |P*1 - s^d/(d! L^d)| = %.2e\n", d, worst);
    }
    report(6, "extrapolated n=1 estimate exact for uniform independence, s <= L, d=2..5", ok, detail);
}

// Integer point-membership identity: 1_I(b,h) = 1_Q(b,ah) + sum_j m_j 1_I(child_j).
void geometry_properties() {
    const auto t = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    bool identity_ok = true;
    long long checked = 0;
    for (int trial = 0; trial < 1000 && identity_ok; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 4);
        std::vector<RationalAlpha> alphas;
        for (std::int64_t den = 2; den <= 12; ++den)
            for (std::int64_t num = 1; num < den; ++num)
                if (std::gcd(num, den) == 1 && RationalAlpha(num, den).admissible(d)) alphas.emplace_back(num, den);
        const RationalAlpha alpha = alphas[rng() % alphas.size()];
        const std::int64_t den = alpha.denominator();
        const std::int64_t h = den * (1 + static_cast<std::int64_t>(rng() % 9)) * (rng() % 2 ? 1 : -1);
        std::vector<double> b(d);
        for (auto& v : b) v = static_cast<double>(static_cast<std::int64_t>(rng() % 41) - 20);
        const auto dec = decompose(SignedTask{{b, static_cast<double>(h)}, 1, 1}, alpha);

        struct IntSimplex {
            std::vector<std::int64_t> b;
            std::int64_t h;
            int sign;
        };
        auto to_int = [](const std::vector<double>& v) {
            std::vector<std::int64_t> out;
            for (double x : v) out.push_back(static_cast<std::int64_t>(x));
            return out;
        };
        const auto ib = to_int(b);
        const auto cb = to_int(dec.cube.b);
        const auto ch = static_cast<std::int64_t>(dec.cube.h);
        std::vector<IntSimplex> kids;
        for (const auto& c : dec.children) {
            // Children of integer data must stay integral.
            for (double x : c.simplex.b) identity_ok = identity_ok && x == std::floor(x);
            identity_ok = identity_ok && c.simplex.h == std::floor(c.simplex.h);
            kids.push_back({to_int(c.simplex.b), static_cast<std::int64_t>(c.simplex.h), c.sign});
        }
        auto in_simplex = [d](const std::int64_t* x, const std::vector<std::int64_t>& sb, std::int64_t sh) {
            std::int64_t sum = 0;
            for (int k = 0; k < d; ++k) {
                const std::int64_t e = x[k] - sb[k];
                if (sh > 0 ? e <= 0 : e > 0) return false;
                sum += e;
            }
            return sh > 0 ? sum <= sh : sum > sh;
        };
        auto in_cube = [d](const std::int64_t* x, const std::vector<std::int64_t>& qb, std::int64_t qh) {
            for (int k = 0; k < d; ++k) {
                const std::int64_t lo = qh > 0 ? qb[k] : qb[k] + qh;
                if (!(x[k] > lo && x[k] <= lo + std::abs(qh))) return false;
            }
            return qh != 0;
        };
        const std::int64_t reach = std::abs(h) + 2;
        std::int64_t x[8];
        for (int p = 0; p < 100000; ++p) {
            for (int k = 0; k < d; ++k) x[k] = ib[k] + static_cast<std::int64_t>(rng() % (2 * reach + 1)) - reach;
            int rhs = in_cube(x, cb, ch) ? 1 : 0;
            for (const auto& c : kids)
                if (in_simplex(x, c.b, c.h)) rhs += c.sign;
            if ((in_simplex(x, ib, h) ? 1 : 0) != rhs) {
                identity_ok = false;
                break;
            }
            ++checked;
        }
    }

    // Every simplex of a full tree keeps its diagonal face on sum x = s.
    double worst = 0.0;
    long long nodes = 0;
    const std::pair<int, int> trees[] = {{2, 8}, {3, 8}, {4, 8}, {5, 7}};
    for (const auto& [d, depth] : trees) {
        const DecompositionRule rule(d, RationalAlpha::optimal(d));
        for (double s : {1.0, 1e3, 1e6}) {
            struct Node {
                std::array<double, 8> b;
                double h;
                int level;
            };
            std::vector<Node> stack;
            Node root{};
            for (int k = 0; k < d; ++k) root.b[k] = -0.25 * k;
            double root_sum = 0.0;
            for (int k = 0; k < d; ++k) root_sum += root.b[k];
            root.h = s - root_sum;
            root.level = 1;
            stack.push_back(root);
            while (!stack.empty()) {
                const Node n = stack.back();
                stack.pop_back();
                ++nodes;
                double sum = n.h;
                for (int k = 0; k < d; ++k) sum += n.b[k];
                worst = std::max(worst, std::fabs(sum - s) / s);
                if (n.level == depth) continue;
                const double side = rule.cube_side(n.h);
                for (const auto& c : rule.children()) {
                    Node child = n;
                    for (int k = 0; k < d; ++k)
                        if ((c.mask >> k) & 1u) child.b[k] += side;
                    child.h = rule.child_height(c, n.h);
                    child.level = n.level + 1;
                    stack.push_back(child);
                }
            }
        }
    }
    const bool ok = identity_ok && checked == 100000LL * 1000 && worst <= 1e-10;
    report(7, "pointwise signed decomposition identity and diagonal-face invariant", ok,
           fmt("%lld integer points over 1000 random decompositions (d <= 5): %s\n", checked,
               identity_ok ? "identity exact" : "MISMATCH") +
               fmt("%lld tree nodes (d=2,3,4 depth 8; d=5 depth 7): max |sum b + h - s|/s = %.2e\n", nodes, worst) +
               fmt("%.1fs", seconds_since(t)));
}

double irwin_hall(int d, double s) {
    // P[U_1 + ... + U_d <= s] for iid Uniform(0,1).
    double total = 0.0, binom = 1.0, fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    for (int k = 0; k <= d && k < s; ++k) {
        total += (k % 2 ? -1.0 : 1.0) * binom * std::pow(s - k, d);
        binom = binom * (d - k) / (k + 1);
    }
    return total / fact;
}

// Least-squares slope of log|error| against n, exponentiated.
double fitted_ratio(const std::vector<double>& errors, int first) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(errors.size());
    for (int i = 0; i < n; ++i) {
        const double x = first + i;
        const double y = std::log(std::fabs(errors[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

void convergence_rates() {
    bool ok = true;
    std::string detail;
    for (int d : {2, 3}) {
        const JointModel m(std::vector<M>(d, M::uniform(1.0)), Copula::independence());
        const double target_plain = volume_factor(d, RationalAlpha::optimal(d)).value;
        const double target_extrap = extrap_factor(d).value;
        for (double s : {0.7, 1.3}) {
            const double truth = irwin_hall(d, s);
            const auto r = run(m, s, 9);
            std::vector<double> plain, extrap;
            bool degenerate = false;
            for (int n = 4; n <= 9; ++n) {
                plain.push_back(r.plain(n) - truth);
                extrap.push_back(r.extrapolated_at(n) - truth);
                degenerate = degenerate || std::fabs(extrap.back()) < 1e-15;
            }
            const double rp = fitted_ratio(plain, 4);
            const bool pok = std::fabs(rp / target_plain - 1.0) <= 0.2;
            std::string ex;
            bool eok = false;
            if (degenerate) {
                ex = fmt("extrapolated error below 1e-15 (max %.1e): no ratio", std::fabs(extrap.back()));
            } else {
                const double re = fitted_ratio(extrap, 4);
                eok = std::fabs(re / target_extrap - 1.0) <= 0.3;
                ex = fmt("extrapolated ratio %.4f vs %.4f", re, target_extrap);
            }
            ok = ok && pok && eok;
            detail += fmt("d=%d s=%.1f: plain ratio %.4f vs f(a*)=%.4f %s; %s %s\n", d, s, rp, target_plain,
                          pok ? "ok" : "MISS", ex.c_str(), eok ? "ok" : "MISS");
        }
    }
    report(8, "geometric error ratios n=4..9 on uniform independence: plain within 20% of f(a*), extrapolated "
              "within 30% of f_*(d)",
           ok, detail);
}

void value_at_risk_levels() {
    const auto t = std::chrono::steady_clock::now();
    const JointModel b(paretos({0.8, 1.0, 2.0}), Copula::clayton(0.4));
    const JointModel a({M::exponential(0.2), M::lognormal(-0.5, 4.5), M::pareto(1.2)}, Copula::gumbel(1.3));
    bool ok = true;
    std::string detail;
    auto row = [&](const char* name, const JointModel& m, double level, double expected) {
        const VarRequest req{.model = m,
                             .level = level,
                             .depth = 10,
                             .tolerance = 1e-6,
                             .bracket_hint = std::nullopt,
                             .engine = {},
                             .extrapolate = true};
        const double v = value_at_risk(req).value;
        const double rel = v / expected - 1.0;
        const bool good = std::fabs(rel) <= 0.005;
        ok = ok && good;
        detail += fmt("%s level %-5g VaR = %.4f (expected %.2f, %+.3f%%) %s\n", name, level, v, expected,
                      100.0 * rel, good ? "ok" : "MISS");
    };
    row("Pareto(0.8,1,2) Clayton(0.4)", b, 0.9, 32.87);
    row("Pareto(0.8,1,2) Clayton(0.4)", b, 0.99, 445.36);
    row("Pareto(0.8,1,2) Clayton(0.4)", b, 0.999, 6864.58);
    row("Exp/Logn/Pareto Gumbel(1.3)  ", a, 0.9, 24.76);
    detail += fmt("%.1fs", seconds_since(t));
    report(9, "value-at-risk by bisection at n=10 within 0.5%", ok, detail);
}

void monte_carlo_coverage() {
    const auto t = std::chrono::steady_clock::now();
    struct Case {
        std::string name;
        JointModel model;
        std::vector<double> s;
        int n;
    };
    const std::vector<double> wide{1.0, 1e2, 1e4, 1e6};
    const std::vector<double> from10{10.0, 1e2, 1e3, 1e4};
    const std::vector<double> gumbel_s{1.0, 1e2, 1e3, 1e4};
    std::vector<Case> cases{
        {"d=2 Clayton(1.2)", JointModel(paretos({0.9, 1.8}), Copula::clayton(1.2)), wide, 13},
        {"d=3 Clayton(0.4)", JointModel(paretos({0.9, 1.8, 2.6}), Copula::clayton(0.4)), wide, 11},
        {"d=4 Clayton(0.2)", JointModel(paretos({0.9, 1.8, 2.6, 3.3}), Copula::clayton(0.2)), from10, 6},
        {"d=5 Clayton(0.3)", JointModel(paretos({0.9, 1.8, 2.6, 3.3, 4.0}), Copula::clayton(0.3)), from10, 5},
    };
    const std::pair<int, int> gumbel_dims[] = {{2, 12}, {3, 11}, {4, 6}};
    for (const auto& [d, n] : gumbel_dims) {
        std::vector<double> th;
        for (int i = 1; i <= d; ++i) th.push_back(i);
        for (double g : {1.0, 1.25, 1.5, 1.75})
            cases.push_back({fmt("d=%d Gumbel(%g)", d, g), JointModel(paretos(th), Copula::gumbel(g)), gumbel_s, n});
        cases.push_back({fmt("d=%d comonotone", d), JointModel(paretos(th), Copula::comonotone()), gumbel_s, n});
    }

    bool ok = true;
    int checked = 0;
    std::string detail;
    std::uint64_t seed = 1000;
    for (const auto& c : cases) {
        const auto mc = mc_estimate_many(c.model, c.s, 10000000, ++seed);
        for (std::size_t i = 0; i < c.s.size(); ++i) {
            const double p = run(c.model, c.s[i], c.n).estimate;
            if (p < 0.01 || p > 0.99) continue;
            ++checked;
            const double z = (p - mc[i].estimate) / mc[i].standard_error;
            const bool good = std::fabs(z) <= 3.0;
            ok = ok && good;
            detail += fmt("%-20s s=%-6g n=%-2d AEP*=%.7f MC=%.7f se=%.1e z=%+.2f %s\n", c.name.c_str(), c.s[i], c.n,
                          p, mc[i].estimate, mc[i].standard_error, z, good ? "" : "MISS");
        }
    }
    detail += fmt("%d thresholds with 0.01 <= p <= 0.99 across %zu models, 1e7 samples each; %.1fs", checked,
                  cases.size(), seconds_since(t));
    report(10, "extrapolated estimates within 3 standard errors of seeded Monte Carlo", ok && checked > 0, detail);
}

void atom_failure_mode() {
    // Both coordinates sit at 1/2 with probability one.
    auto cdf = [](std::span<const double> x) { return (x[0] >= 0.5 && x[1] >= 0.5) ? 1.0 : 0.0; };
    const double lb[] = {0.0, 0.0};
    AepConfig c;
    c.depth = 6;
    c.extrapolate = false;
    const auto r = aep_run(cube_measure_from_cdf(cdf, 2), lb, 1.0, c);
    bool ok = true;
    std::string seq;
    for (int n = 1; n <= 6; ++n) {
        const double p = r.plain(n);
        ok = ok && (p == 0.0 || p == 1.0);
        if (n > 1) ok = ok && p != r.plain(n - 1);
        seq += fmt("P%d=%g ", n, p);
    }
    report(11, "point mass on the boundary: P_n(1) alternates between 0 and 1 for n=1..6", ok, seq);
}

void timing_trend() {
    // Wall time per extra level should grow like the number of new simplices.
    bool ok = true;
    std::string detail;
    const std::tuple<int, int, JointModel> cases[] = {
        {2, 13, JointModel(paretos({0.9, 1.8}), Copula::clayton(1.2))},
        {3, 10, JointModel(paretos({0.9, 1.8, 2.6}), Copula::clayton(0.4))},
    };
    for (const auto& [d, n0, m] : cases) {
        double prev = 0.0;
        for (int n = n0; n <= n0 + 2; ++n) {
            const auto t = std::chrono::steady_clock::now();
            run(m, 1.0, n);
            const double secs = seconds_since(t);
            if (prev > 0.0) {
                const double ratio = secs / prev;
                const double fs = static_cast<double>(child_count(d));
                const bool good = ratio >= fs / 2.0 && ratio <= fs * 2.0;
                ok = ok && good;
                detail += fmt("d=%d n=%d->%d time ratio %.2f (new simplices per level %g) %s\n", d, n - 1, n, ratio,
                              fs, good ? "" : "MISS");
            }
            prev = secs;
        }
    }
    report(12, "run time grows by about f_S(d) per level (within a factor 2)", ok, detail);
}

}  // namespace

int main() {
    const auto t = std::chrono::steady_clock::now();
    deep_two_dimensional();
    deep_three_dimensional();
    higher_dimensions();
    exact_endpoints();
    factor_tables();
    extrapolation_exactness();
    geometry_properties();
    convergence_rates();
    value_at_risk_levels();
    monte_carlo_coverage();
    atom_failure_mode();
    timing_trend();
    std::printf("%d failing, %.0fs total\n", failures, seconds_since(t));
    return failures == 0 ? 0 : 1;
}
