#ifndef DSTOP_PROBLEM_HPP
#define DSTOP_PROBLEM_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace dstop {

// Black-Scholes market for the underlying S: dS = mu S dt + sigma S dB.
struct MarketParams {
    double mu = 0.0;
    double sigma = 1.0;

    static MarketParams make(double mu, double sigma);

    // 1 - 2 mu / sigma^2. X = S^beta is then a driftless GBM.
    double beta() const { return 1.0 - 2.0 * mu / (sigma * sigma); }
};

// ---- payoff families U ------------------------------------------------------

struct PowerUtility {
    double gamma; // U(s) = s^gamma, 0 < gamma < 1
};
struct CallPayoff {
    double strike; // U(s) = (s - K)^+
};
struct IdentityPayoff {}; // U(s) = s

using PayoffSpec = std::variant<PowerUtility, CallPayoff, IdentityPayoff>;

// ---- distortion families w --------------------------------------------------

struct Prelec {
    double alpha; // w(q) = exp(-gamma (-log q)^alpha)
    double gamma;
};
struct TKOne {
    double gamma; // q^g / (q^g + (1-q)^g)^(1/g), 0.279 <= g < 1
};
struct TwoParam {
    double alpha; // alpha q^g / (alpha q^g + (1-q)^g)
    double gamma;
};
struct ConvexPower {
    double eta; // q^eta, eta > 1
};
struct ConvexQuadratic {
    double eta; // eta q^2 + (1 - eta) q, 0 < eta < 1
};
struct IdentityDistortion {};

using DistortionSpec =
    std::variant<Prelec, TKOne, TwoParam, ConvexPower, ConvexQuadratic,
                 IdentityDistortion>;

// Smallest TKOne exponent for which w stays nondecreasing.
inline constexpr double kTKOneMinGamma = 0.279;

// Throw ConfigError when parameters leave the family's validity range.
void validate(const PayoffSpec& payoff);
void validate(const DistortionSpec& distortion);

double payoff_value(const PayoffSpec& payoff, double s);
double distortion_value(const DistortionSpec& distortion, double q);

std::string family_name(const PayoffSpec& payoff);
std::string family_name(const DistortionSpec& distortion);

// A one-dimensional distorted-expectation stopping problem.
//
// The state used throughout the library is the transformed process
// x = s^beta, which is a driftless geometric Brownian motion with
// volatility beta * sigma. The transformed payoff is u(x) = U(x^(1/beta)).
// Values are immutable after construction.
class StoppingProblem {
public:
    static StoppingProblem from_beta(double beta, PayoffSpec payoff,
                                     DistortionSpec distortion,
                                     std::optional<double> scale = std::nullopt);
    static StoppingProblem from_market(MarketParams market, PayoffSpec payoff,
                                       DistortionSpec distortion,
                                       std::optional<double> scale = std::nullopt);

    double beta() const { return beta_; }
    const std::optional<MarketParams>& market() const { return market_; }
    const PayoffSpec& payoff() const { return payoff_; }
    const DistortionSpec& distortion() const { return distortion_; }

    // Natural state scale: K^beta for a call payoff, 1 otherwise.
    double scale() const { return scale_; }

    // Volatility of the transformed process: beta * sigma, or beta itself
    // when the problem was specified by beta alone (sigma taken as 1).
    double volatility() const;

    double u(double x) const;
    double w(double q) const;

    // sup{x > 0 : u(x) <= c}, or 0 when u(x) > c for every x > 0.
    // Requires beta > 0 (u nondecreasing).
    double u_upper_level(double c) const;

    // Magnitude used to scale indifference tolerances.
    double u_reference() const;

private:
    StoppingProblem(double beta, std::optional<MarketParams> market,
                    PayoffSpec payoff, DistortionSpec distortion,
                    std::optional<double> scale);

    double beta_;
    std::optional<MarketParams> market_;
    PayoffSpec payoff_;
    DistortionSpec distortion_;
    double scale_;
};

// u(x) = U(x^(1/beta)). Throws UnsupportedError for beta = 0 and DomainError
// for x <= 0.
double u_eval(const StoppingProblem& p, double x);

// w(q); DomainError for q outside [0,1].
double w_eval(const StoppingProblem& p, double q);

// ---- shape classification --------------------------------------------------

enum class UShape { Convex, Linear, Concave, SShaped, ConstantThenConcave };
enum class WShape { Convex, Concave, InverseS, SShaped, Identity };
enum class Slope { Finite, Infinite };

struct ShapeInfo {
    UShape u_shape;
    WShape w_shape;
    Slope w_prime_zero;
};

std::string to_string(UShape s);
std::string to_string(WShape s);
std::string to_string(Slope s);

// Table-driven for the parametric families, second-difference sampling where
// the table has no rule. Requires beta > 0.
ShapeInfo shape_classify(const StoppingProblem& p);

enum class Curvature { Linear, Convex, Concave, ConvexThenConcave, ConcaveThenConvex, Mixed };

// Sign pattern of second differences of f on an n-point grid over [lo, hi].
// Differences with magnitude below tol * (|f| scale) count as zero.
Curvature sample_curvature(const std::function<double(double)>& f, double lo,
                           double hi, bool log_grid, int n = 1000,
                           double tol = 1e-9);

} // namespace dstop

#endif // DSTOP_PROBLEM_HPP
