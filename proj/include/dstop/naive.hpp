#ifndef DSTOP_NAIVE_HPP
#define DSTOP_NAIVE_HPP

#include "dstop/kernel.hpp"
#include "dstop/problem.hpp"

#include <optional>
#include <string>

namespace dstop {

enum class PrecommitKind { StopNow, Threshold, NoOptimum };

std::string to_string(PrecommitKind k);

// Pre-committed optimum at a single state x.
struct PrecommitResult {
    PrecommitKind kind = PrecommitKind::NoOptimum;
    double b_star = 0.0;    // stopping level, Threshold only (b_star >= x)
    double value = 0.0;     // supremum of J(x; .), possibly +inf
    bool value_exact = true; // false when value is only a lower bound / limit estimate
    std::string rule;       // which closed form or solver produced the result
};

enum class Regime { NegativeBetaNeverStop, ZeroBetaFixedThreshold, PositiveBeta };

std::string to_string(Regime r);

struct BetaRegime {
    Regime regime;
    double x_star = kInf; // ZeroBetaFixedThreshold only: inf{s : U(s) = sup U}
};

BetaRegime classify_beta(const StoppingProblem& p);

// w(lambda) u(x / lambda), the objective of the reduced problem for convex u.
double reduced_objective(const StoppingProblem& p, double x, double lambda);

PrecommitResult solve_precommitted(const StoppingProblem& p, double x);

struct NaiveOptions {
    double x_lo = 1e-6; // grid range, multiples of p.scale()
    double x_hi = 1e4;
    int grid_points = 200;
    double threshold_tol = 1e-10; // multiples of p.scale()
    bool use_closed_form = true;  // skip the grid scan where the threshold is known
};

// Naive threshold where it is known in closed form: call payoff with
// quadratic w at beta = 1, or with eta = 1/2 and beta > 1.
std::optional<double> closed_form_naive_threshold(const StoppingProblem& p);

// Naive law: stop exactly where the pre-committed optimum is to stop now.
// The result is always the empty set, the whole space or a ray [theta, inf).
StoppingLaw naive_law(const StoppingProblem& p, const NaiveOptions& opts = {});

// Case w = (q^2 + q)/2, U = (s - K)^+, beta >= 1: the naive agent stops iff
// x >= (3K / (3 - 2/beta))^beta.
double bar_x_threshold(double beta, double K);

// Optimal exit level b*(x) for the same case: the unique zero of
//   h(b) = (1/beta - 1) b^(1/beta+1) + (1/beta - 2) x b^(1/beta) + K b + 2 x K.
// Returns +inf when h has no zero (beta = 1 and x <= K).
double b_star_of_x(double beta, double K, double x);

} // namespace dstop

#endif // DSTOP_NAIVE_HPP
