#include "dstop/io.hpp"

#include "dstop/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dstop {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end())
        fail(path + "/" + key, "missing");
    if (!it->is_number())
        fail(path + "/" + key, "expected a number");
    return it->get<double>();
}

std::string type_at(const json& obj, const std::string& path) {
    if (!obj.is_object())
        fail(path, "expected an object");
    const auto it = obj.find("type");
    if (it == obj.end() || !it->is_string())
        fail(path + "/type", "expected a string");
    return it->get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            known = known || it.key() == k;
        if (!known)
            fail(path + "/" + it.key(), "unknown field");
    }
}

PayoffSpec payoff_from(const json& j) {
    const std::string path = "/payoff";
    const std::string type = type_at(j, path);
    PayoffSpec out;
    if (type == "power") {
        reject_unknown(j, {"type", "gamma"}, path);
        out = PowerUtility{number_at(j, "gamma", path)};
    } else if (type == "call") {
        reject_unknown(j, {"type", "K"}, path);
        out = CallPayoff{number_at(j, "K", path)};
    } else if (type == "identity") {
        reject_unknown(j, {"type"}, path);
        out = IdentityPayoff{};
    } else {
        fail(path + "/type", "unknown payoff type '" + type + "'");
    }
    try {
        validate(out);
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
    return out;
}

DistortionSpec distortion_from(const json& j) {
    const std::string path = "/distortion";
    const std::string type = type_at(j, path);
    DistortionSpec out;
    if (type == "prelec") {
        reject_unknown(j, {"type", "alpha", "gamma"}, path);
        out = Prelec{number_at(j, "alpha", path), number_at(j, "gamma", path)};
    } else if (type == "tk") {
        reject_unknown(j, {"type", "gamma"}, path);
        out = TKOne{number_at(j, "gamma", path)};
    } else if (type == "two_param") {
        reject_unknown(j, {"type", "alpha", "gamma"}, path);
        out = TwoParam{number_at(j, "alpha", path), number_at(j, "gamma", path)};
    } else if (type == "convex_power") {
        reject_unknown(j, {"type", "eta"}, path);
        out = ConvexPower{number_at(j, "eta", path)};
    } else if (type == "quadratic") {
        reject_unknown(j, {"type", "eta"}, path);
        out = ConvexQuadratic{number_at(j, "eta", path)};
    } else if (type == "identity") {
        reject_unknown(j, {"type"}, path);
        out = IdentityDistortion{};
    } else {
        fail(path + "/type", "unknown distortion type '" + type + "'");
    }
    try {
        validate(out);
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
    return out;
}

} // namespace

StoppingProblem problem_from_json(const json& doc) {
    if (!doc.is_object())
        fail("", "problem document must be an object");
    reject_unknown(doc, {"beta", "mu", "sigma", "scale", "payoff", "distortion"}, "");
    if (!doc.contains("payoff"))
        fail("/payoff", "missing");
    if (!doc.contains("distortion"))
        fail("/distortion", "missing");
    PayoffSpec payoff = payoff_from(doc["payoff"]);
    DistortionSpec distortion = distortion_from(doc["distortion"]);

    std::optional<double> scale;
    if (doc.contains("scale")) {
        scale = number_at(doc, "scale", "");
        if (!(*scale > 0.0))
            fail("/scale", "must be positive");
    }

    const bool has_beta = doc.contains("beta");
    const bool has_mu = doc.contains("mu");
    if (has_beta && has_mu)
        fail("/beta", "give either beta or mu/sigma, not both");
    if (has_beta) {
        if (doc.contains("sigma"))
            fail("/sigma", "sigma only applies together with mu");
        const double beta = number_at(doc, "beta", "");
        if (!std::isfinite(beta))
            fail("/beta", "must be finite");
        return StoppingProblem::from_beta(beta, payoff, distortion, scale);
    }
    if (!has_mu)
        fail("/beta", "missing (or give mu and sigma)");
    const double mu = number_at(doc, "mu", "");
    const double sigma = number_at(doc, "sigma", "");
    MarketParams m;
    try {
        m = MarketParams::make(mu, sigma);
    } catch (const ConfigError& e) {
        fail("/sigma", e.what());
    }
    return StoppingProblem::from_market(m, payoff, distortion, scale);
}

StoppingProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open problem file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    return problem_from_json(doc);
}

json problem_to_json(const StoppingProblem& p) {
    json doc;
    if (p.market()) {
        doc["mu"] = p.market()->mu;
        doc["sigma"] = p.market()->sigma;
    } else {
        doc["beta"] = p.beta();
    }
    doc["scale"] = p.scale();
    std::visit(
        [&](const auto& u) {
            using T = std::decay_t<decltype(u)>;
            if constexpr (std::is_same_v<T, PowerUtility>)
                doc["payoff"] = {{"type", "power"}, {"gamma", u.gamma}};
            else if constexpr (std::is_same_v<T, CallPayoff>)
                doc["payoff"] = {{"type", "call"}, {"K", u.strike}};
            else
                doc["payoff"] = {{"type", "identity"}};
        },
        p.payoff());
    std::visit(
        [&](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, Prelec>)
                doc["distortion"] = {{"type", "prelec"}, {"alpha", w.alpha}, {"gamma", w.gamma}};
            else if constexpr (std::is_same_v<T, TKOne>)
                doc["distortion"] = {{"type", "tk"}, {"gamma", w.gamma}};
            else if constexpr (std::is_same_v<T, TwoParam>)
                doc["distortion"] = {{"type", "two_param"}, {"alpha", w.alpha}, {"gamma", w.gamma}};
            else if constexpr (std::is_same_v<T, ConvexPower>)
                doc["distortion"] = {{"type", "convex_power"}, {"eta", w.eta}};
            else if constexpr (std::is_same_v<T, ConvexQuadratic>)
                doc["distortion"] = {{"type", "quadratic"}, {"eta", w.eta}};
            else
                doc["distortion"] = {{"type", "identity"}};
        },
        p.distortion());
    return doc;
}

json kernel_to_json(const IntervalKernel& k) {
    json arr = json::array();
    auto end = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
    for (const Piece& piece : k.pieces())
        arr.push_back(json::array({end(piece.lo), end(piece.hi)}));
    return arr;
}

IntervalKernel kernel_from_json(const json& doc) {
    if (!doc.is_array())
        throw ConfigError("kernel: expected an array of [lo, hi] pairs");
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& pr = doc[i];
        const std::string path = "/" + std::to_string(i);
        if (!pr.is_array() || pr.size() != 2)
            fail(path, "expected a [lo, hi] pair");
        double ends[2];
        for (int e = 0; e < 2; ++e) {
            if (pr[e].is_string() && pr[e].get<std::string>() == "inf")
                ends[e] = kInf;
            else if (pr[e].is_number())
                ends[e] = pr[e].get<double>();
            else
                fail(path + "/" + std::to_string(e), "expected a number or \"inf\"");
        }
        pieces.push_back({ends[0], ends[1]});
    }
    try {
        return IntervalKernel(std::move(pieces));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("kernel: ") + e.what());
    }
}

} // namespace dstop
