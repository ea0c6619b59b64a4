#ifndef DSTOP_EVALUATOR_HPP
#define DSTOP_EVALUATOR_HPP

#include "dstop/kernel.hpp"
#include "dstop/problem.hpp"

namespace dstop {

// Exit time of (a, b) started from x: tau_ab = inf{t >= 0 : X_t not in (a,b)}.
// a = 0 means the lower barrier is never reached; b = inf means no upper one.
struct ExitSpec {
    double a;
    double b;
    double x;
};

// Distorted payoff J(x; tau_ab) in closed form (beta > 0):
//   a = 0, b = inf  -> 0          (X_t -> 0 a.s.)
//   a > 0, b = inf  -> u(a)
//   b < inf         -> u(a) + w((x-a)/(b-a)) (u(b) - u(a))
double eval_interval_exit(const StoppingProblem& p, const ExitSpec& e);

// J(x; L*tau(x)), the value of continuing now and stopping at the first
// later entry into ker(tau). States in the closed kernel stop immediately.
double eval_continuation(const StoppingProblem& p, const StoppingLaw& law, double x);

// P[T^x_b < inf] = x / b for the driftless transformed process.
double hit_prob(double x, double b);

} // namespace dstop

#endif // DSTOP_EVALUATOR_HPP
