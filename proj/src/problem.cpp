#include "dstop/problem.hpp"

#include "dstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dstop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

MarketParams MarketParams::make(double mu, double sigma) {
    if (!std::isfinite(mu))
        throw ConfigError("market: mu must be finite");
    if (!positive_finite(sigma))
        throw ConfigError("market: sigma must be a positive finite number");
    return MarketParams{mu, sigma};
}

void validate(const PayoffSpec& payoff) {
    std::visit(overloaded{
                   [](const PowerUtility& f) {
                       if (!(f.gamma > 0.0 && f.gamma < 1.0))
                           throw ConfigError("power payoff: gamma must lie in (0,1)");
                   },
                   [](const CallPayoff& f) {
                       if (!positive_finite(f.strike))
                           throw ConfigError("call payoff: K must be positive");
                   },
                   [](const IdentityPayoff&) {},
               },
               payoff);
}

void validate(const DistortionSpec& distortion) {
    std::visit(
        overloaded{
            [](const Prelec& f) {
                if (!positive_finite(f.alpha) || !positive_finite(f.gamma))
                    throw ConfigError("prelec distortion: alpha and gamma must be positive");
            },
            [](const TKOne& f) {
                if (!(f.gamma >= kTKOneMinGamma && f.gamma < 1.0))
                    throw ConfigError("tk distortion: gamma must lie in [0.279,1)");
            },
            [](const TwoParam& f) {
                if (!positive_finite(f.alpha))
                    throw ConfigError("two-param distortion: alpha must be positive");
                if (!(f.gamma > 0.0 && f.gamma < 1.0))
                    throw ConfigError("two-param distortion: gamma must lie in (0,1)");
            },
            [](const ConvexPower& f) {
                if (!(std::isfinite(f.eta) && f.eta > 1.0))
                    throw ConfigError("convex-power distortion: eta must exceed 1");
            },
            [](const ConvexQuadratic& f) {
                if (!(f.eta > 0.0 && f.eta < 1.0))
                    throw ConfigError("quadratic distortion: eta must lie in (0,1)");
            },
            [](const IdentityDistortion&) {},
        },
        distortion);
}

double payoff_value(const PayoffSpec& payoff, double s) {
    return std::visit(overloaded{
                          [s](const PowerUtility& f) { return std::pow(s, f.gamma); },
                          [s](const CallPayoff& f) { return std::max(s - f.strike, 0.0); },
                          [s](const IdentityPayoff&) { return s; },
                      },
                      payoff);
}

double distortion_value(const DistortionSpec& distortion, double q) {
    if (q <= 0.0)
        return 0.0;
    if (q >= 1.0)
        return 1.0;
    return std::visit(
        overloaded{
            [q](const Prelec& f) {
                return std::exp(-f.gamma * std::pow(-std::log(q), f.alpha));
            },
            [q](const TKOne& f) {
                const double a = std::pow(q, f.gamma);
                const double b = std::pow(1.0 - q, f.gamma);
                return a / std::pow(a + b, 1.0 / f.gamma);
            },
            [q](const TwoParam& f) {
                const double a = f.alpha * std::pow(q, f.gamma);
                return a / (a + std::pow(1.0 - q, f.gamma));
            },
            [q](const ConvexPower& f) { return std::pow(q, f.eta); },
            [q](const ConvexQuadratic& f) { return f.eta * q * q + (1.0 - f.eta) * q; },
            [q](const IdentityDistortion&) { return q; },
        },
        distortion);
}

std::string family_name(const PayoffSpec& payoff) {
    return std::visit(overloaded{
                          [](const PowerUtility&) { return std::string("power"); },
                          [](const CallPayoff&) { return std::string("call"); },
                          [](const IdentityPayoff&) { return std::string("identity"); },
                      },
                      payoff);
}

std::string family_name(const DistortionSpec& distortion) {
    return std::visit(overloaded{
                          [](const Prelec&) { return std::string("prelec"); },
                          [](const TKOne&) { return std::string("tk"); },
                          [](const TwoParam&) { return std::string("two_param"); },
                          [](const ConvexPower&) { return std::string("convex_power"); },
                          [](const ConvexQuadratic&) { return std::string("quadratic"); },
                          [](const IdentityDistortion&) { return std::string("identity"); },
                      },
                      distortion);
}

// ---- StoppingProblem --------------------------------------------------------

StoppingProblem::StoppingProblem(double beta, std::optional<MarketParams> market,
                                 PayoffSpec payoff, DistortionSpec distortion,
                                 std::optional<double> scale)
    : beta_(beta), market_(market), payoff_(payoff), distortion_(distortion) {
    if (!std::isfinite(beta))
        throw ConfigError("beta must be finite");
    validate(payoff_);
    validate(distortion_);
    if (scale) {
        if (!positive_finite(*scale))
            throw ConfigError("scale must be positive");
        scale_ = *scale;
    } else if (const auto* call = std::get_if<CallPayoff>(&payoff_); call && beta_ > 0.0) {
        scale_ = std::pow(call->strike, beta_);
    } else {
        scale_ = 1.0;
    }
}

StoppingProblem StoppingProblem::from_beta(double beta, PayoffSpec payoff,
                                           DistortionSpec distortion,
                                           std::optional<double> scale) {
    return StoppingProblem(beta, std::nullopt, payoff, distortion, scale);
}

StoppingProblem StoppingProblem::from_market(MarketParams market, PayoffSpec payoff,
                                             DistortionSpec distortion,
                                             std::optional<double> scale) {
    market = MarketParams::make(market.mu, market.sigma);
    return StoppingProblem(market.beta(), market, payoff, distortion, scale);
}

double StoppingProblem::volatility() const {
    const double sigma = market_ ? market_->sigma : 1.0;
    return std::abs(beta_) * sigma;
}

double StoppingProblem::u(double x) const {
    if (beta_ == 0.0)
        throw UnsupportedError("u(x) is undefined for beta = 0; use classify_beta");
    if (!(x > 0.0)) {
        if (x == 0.0 && beta_ > 0.0)
            return 0.0;
        throw DomainError("u(x) requires x > 0");
    }
    if (std::isinf(x))
        return std::numeric_limits<double>::infinity();
    return std::visit(
        overloaded{
            [&](const PowerUtility& f) { return std::pow(x, f.gamma / beta_); },
            [&](const CallPayoff& f) {
                return std::max(std::pow(x, 1.0 / beta_) - f.strike, 0.0);
            },
            [&](const IdentityPayoff&) { return std::pow(x, 1.0 / beta_); },
        },
        payoff_);
}

double StoppingProblem::w(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("w(q) requires q in [0,1]");
    return distortion_value(distortion_, q);
}

double StoppingProblem::u_upper_level(double c) const {
    if (!(beta_ > 0.0))
        throw UnsupportedError("u_upper_level requires beta > 0");
    return std::visit(
        overloaded{
            [&](const PowerUtility& f) {
                return c <= 0.0 ? 0.0 : std::pow(c, beta_ / f.gamma);
            },
            [&](const CallPayoff& f) {
                return c < 0.0 ? 0.0 : std::pow(f.strike + c, beta_);
            },
            [&](const IdentityPayoff&) { return c <= 0.0 ? 0.0 : std::pow(c, beta_); },
        },
        payoff_);
}

double StoppingProblem::u_reference() const {
    // u(scale) vanishes for a call at the strike, so look one scale further.
    return std::max(u(scale_), u(2.0 * scale_));
}

double u_eval(const StoppingProblem& p, double x) { return p.u(x); }
double w_eval(const StoppingProblem& p, double q) { return p.w(q); }

// ---- shapes -----------------------------------------------------------------

std::string to_string(UShape s) {
    switch (s) {
    case UShape::Convex: return "convex";
    case UShape::Linear: return "linear";
    case UShape::Concave: return "concave";
    case UShape::SShaped: return "S-shaped";
    case UShape::ConstantThenConcave: return "constant-then-concave";
    }
    return "?";
}

std::string to_string(WShape s) {
    switch (s) {
    case WShape::Convex: return "convex";
    case WShape::Concave: return "concave";
    case WShape::InverseS: return "inverse-S";
    case WShape::SShaped: return "S-shaped";
    case WShape::Identity: return "identity";
    }
    return "?";
}

std::string to_string(Slope s) { return s == Slope::Finite ? "finite" : "infinite"; }

Curvature sample_curvature(const std::function<double(double)>& f, double lo, double hi,
                           bool log_grid, int n, double tol) {
    if (!(hi > lo) || n < 4 || (log_grid && !(lo > 0.0)))
        throw DomainError("sample_curvature: bad grid");
    std::vector<double> xs(n), fs(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        xs[i] = log_grid ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
        fs[i] = f(xs[i]);
    }
    // Sign sequence of changes in divided-difference slope.
    std::vector<int> signs;
    double prev_slope = (fs[1] - fs[0]) / (xs[1] - xs[0]);
    for (int i = 2; i < n; ++i) {
        const double slope = (fs[i] - fs[i - 1]) / (xs[i] - xs[i - 1]);
        const double d = slope - prev_slope;
        const double mag = std::max({1.0, std::abs(slope), std::abs(prev_slope)});
        if (std::abs(d) > tol * mag) {
            const int s = d > 0 ? 1 : -1;
            if (signs.empty() || signs.back() != s)
                signs.push_back(s);
        }
        prev_slope = slope;
    }
    if (signs.empty())
        return Curvature::Linear;
    if (signs.size() == 1)
        return signs[0] > 0 ? Curvature::Convex : Curvature::Concave;
    if (signs.size() == 2)
        return signs[0] > 0 ? Curvature::ConvexThenConcave : Curvature::ConcaveThenConvex;
    return Curvature::Mixed;
}

namespace {

UShape power_shape(double exponent) {
    if (exponent > 1.0)
        return UShape::Convex;
    if (exponent < 1.0)
        return UShape::Concave;
    return UShape::Linear;
}

WShape shape_from_curvature(Curvature c) {
    switch (c) {
    case Curvature::Linear: return WShape::Identity;
    case Curvature::Convex: return WShape::Convex;
    case Curvature::Concave: return WShape::Concave;
    case Curvature::ConcaveThenConvex: return WShape::InverseS;
    case Curvature::ConvexThenConcave: return WShape::SShaped;
    case Curvature::Mixed: break;
    }
    throw UnsupportedError("distortion has no recognised shape; use the generic solver");
}

} // namespace

ShapeInfo shape_classify(const StoppingProblem& p) {
    const double beta = p.beta();
    if (!(beta > 0.0))
        throw UnsupportedError("shape classification requires beta > 0");

    ShapeInfo info{};
    info.u_shape = std::visit(
        overloaded{
            [&](const PowerUtility& f) { return power_shape(f.gamma / beta); },
            [&](const IdentityPayoff&) { return power_shape(1.0 / beta); },
            [&](const CallPayoff&) {
                // (x^(1/beta) - K)^+ : convex for beta <= 1, flat then concave after.
                return beta <= 1.0 ? UShape::Convex : UShape::ConstantThenConcave;
            },
        },
        p.payoff());

    auto sampled = [&](const DistortionSpec& d) {
        return shape_from_curvature(sample_curvature(
            [&](double q) { return distortion_value(d, q); }, 1e-3, 1.0 - 1e-3, false));
    };

    std::visit(overloaded{
                   [&](const Prelec& f) {
                       if (f.alpha < 1.0) {
                           info.w_shape = WShape::InverseS;
                           info.w_prime_zero = Slope::Infinite;
                       } else if (f.alpha > 1.0) {
                           info.w_shape = WShape::SShaped;
                           info.w_prime_zero = Slope::Finite;
                       } else {
                           // alpha = 1 is the power q^gamma.
                           info.w_shape = f.gamma > 1.0   ? WShape::Convex
                                          : f.gamma < 1.0 ? WShape::Concave
                                                          : WShape::Identity;
                           info.w_prime_zero = f.gamma < 1.0 ? Slope::Infinite : Slope::Finite;
                       }
                   },
                   [&](const TKOne&) {
                       info.w_shape = WShape::InverseS;
                       info.w_prime_zero = Slope::Infinite;
                   },
                   [&](const TwoParam& f) {
                       info.w_shape = sampled(f);
                       info.w_prime_zero = Slope::Infinite;
                   },
                   [&](const ConvexPower&) {
                       info.w_shape = WShape::Convex;
                       info.w_prime_zero = Slope::Finite;
                   },
                   [&](const ConvexQuadratic&) {
                       info.w_shape = WShape::Convex;
                       info.w_prime_zero = Slope::Finite;
                   },
                   [&](const IdentityDistortion&) {
                       info.w_shape = WShape::Identity;
                       info.w_prime_zero = Slope::Finite;
                   },
               },
               p.distortion());
    return info;
}

} // namespace dstop
