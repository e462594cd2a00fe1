#include "aep/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aep/errors.hpp"

namespace aep {

namespace {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw ConfigError(source_ + ": " + path + ": " + msg);
    }

    void require_object(const json& j, const std::string& path) const {
        if (!j.is_object()) fail(path, "expected an object");
    }

    void allow_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, value] : j.items()) {
            bool known = false;
            for (auto k : keys) known = known || key == k;
            if (!known) fail(join(path, key), "unknown key");
        }
    }

    double number(const json& j, const std::string& path, std::string_view key) const {
        const std::string p = join(path, std::string(key));
        if (!j.contains(key)) fail(p, "missing required number");
        const json& v = j.at(key);
        if (!v.is_number()) fail(p, "expected a number");
        return v.get<double>();
    }

    std::string string(const json& j, const std::string& path, std::string_view key) const {
        const std::string p = join(path, std::string(key));
        if (!j.contains(key)) fail(p, "missing required string");
        const json& v = j.at(key);
        if (!v.is_string()) fail(p, "expected a string");
        return v.get<std::string>();
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    // Runs a factory, rewrapping its message with the field path.
    template <class Fn>
    auto guarded(const std::string& path, Fn&& fn) const {
        try {
            return fn();
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }

private:
    std::string source_;
};

MarginalDistribution parse_marginal(const Reader& r, const json& j, const std::string& path) {
    r.require_object(j, path);
    const std::string type = r.string(j, path, "type");
    if (type == "pareto") {
        r.allow_keys(j, path, {"type", "theta"});
        const double theta = r.number(j, path, "theta");
        return r.guarded(path, [&] { return MarginalDistribution::pareto(theta); });
    }
    if (type == "exponential") {
        r.allow_keys(j, path, {"type", "lambda"});
        const double rate = r.number(j, path, "lambda");
        return r.guarded(path, [&] { return MarginalDistribution::exponential(rate); });
    }
    if (type == "lognormal") {
        r.allow_keys(j, path, {"type", "mu", "sigma2"});
        const double mu = r.number(j, path, "mu");
        const double sigma2 = r.number(j, path, "sigma2");
        return r.guarded(path, [&] { return MarginalDistribution::lognormal(mu, sigma2); });
    }
    if (type == "uniform") {
        r.allow_keys(j, path, {"type", "upper"});
        const double upper = r.number(j, path, "upper");
        return r.guarded(path, [&] { return MarginalDistribution::uniform(upper); });
    }
    r.fail(path + ".type", "unknown marginal type '" + type + "' (pareto, exponential, lognormal, uniform)");
}

Copula parse_copula(const Reader& r, const json& j, const std::string& path) {
    r.require_object(j, path);
    const std::string type = r.string(j, path, "type");
    if (type == "independence") {
        r.allow_keys(j, path, {"type"});
        return Copula::independence();
    }
    if (type == "comonotone") {
        r.allow_keys(j, path, {"type"});
        return Copula::comonotone();
    }
    if (type == "clayton") {
        r.allow_keys(j, path, {"type", "delta"});
        const double delta = r.number(j, path, "delta");
        return r.guarded(path, [&] { return Copula::clayton(delta); });
    }
    if (type == "gumbel") {
        r.allow_keys(j, path, {"type", "gamma"});
        const double gamma = r.number(j, path, "gamma");
        return r.guarded(path, [&] { return Copula::gumbel(gamma); });
    }
    if (type == "frank") {
        r.allow_keys(j, path, {"type", "theta"});
        const double theta = r.number(j, path, "theta");
        return r.guarded(path, [&] { return Copula::frank(theta); });
    }
    r.fail(path + ".type", "unknown copula type '" + type + "' (independence, comonotone, clayton, gumbel, frank)");
}

AepSettings parse_aep(const Reader& r, const json& j, int d) {
    const std::string path = "aep";
    r.require_object(j, path);
    r.allow_keys(j, path, {"n", "alpha", "strategy", "extrapolate"});
    AepSettings out;
    if (j.contains("n")) {
        const json& n = j.at("n");
        if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 64)
            r.fail("aep.n", "expected an integer in 1..64");
        out.depth = n.get<int>();
    }
    if (j.contains("alpha")) {
        const std::string text = r.string(j, path, "alpha");
        out.alpha = r.guarded("aep.alpha", [&] {
            auto a = RationalAlpha::parse(text);
            a.validate(d);
            return a;
        });
    }
    if (j.contains("strategy")) {
        const std::string text = r.string(j, path, "strategy");
        out.strategy = r.guarded("aep.strategy", [&] { return parse_strategy(text); });
    }
    if (j.contains("extrapolate")) {
        if (!j.at("extrapolate").is_boolean()) r.fail("aep.extrapolate", "expected true or false");
        out.extrapolate = j.at("extrapolate").get<bool>();
    }
    return out;
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
    if (name == "dfs") return Strategy::DepthFirst;
    if (name == "bfs") return Strategy::BreadthFirst;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (dfs, bfs)");
}

ModelConfig parse_config(std::string_view text, std::string_view source) {
    const Reader r{std::string(source)};
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.what() already names line and column.
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    r.require_object(doc, "<root>");
    r.allow_keys(doc, "", {"marginals", "copula", "lower_bound", "aep"});

    if (!doc.contains("marginals")) r.fail("marginals", "missing required array");
    const json& jm = doc.at("marginals");
    if (!jm.is_array()) r.fail("marginals", "expected an array");
    std::vector<MarginalDistribution> marginals;
    for (std::size_t i = 0; i < jm.size(); ++i)
        marginals.push_back(parse_marginal(r, jm[i], "marginals[" + std::to_string(i) + "]"));

    if (!doc.contains("copula")) r.fail("copula", "missing required object");
    const Copula copula = parse_copula(r, doc.at("copula"), "copula");

    std::vector<double> lower;
    if (doc.contains("lower_bound")) {
        const json& jl = doc.at("lower_bound");
        if (!jl.is_array()) r.fail("lower_bound", "expected an array of numbers");
        for (std::size_t i = 0; i < jl.size(); ++i) {
            if (!jl[i].is_number()) r.fail("lower_bound[" + std::to_string(i) + "]", "expected a number");
            lower.push_back(jl[i].get<double>());
        }
    }

    JointModel model = r.guarded("<model>", [&] { return JointModel(marginals, copula, lower); });
    AepSettings aep;
    if (doc.contains("aep")) aep = parse_aep(r, doc.at("aep"), model.dimension());
    return {std::move(model), aep};
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

}  // namespace aep
