#ifndef DSTOP_EQUILIBRIUM_HPP
#define DSTOP_EQUILIBRIUM_HPP

#include "dstop/kernel.hpp"
#include "dstop/problem.hpp"

#include <optional>
#include <vector>

namespace dstop {

// Truncated computational domain [lo, hi], absolute state values.
struct Domain {
    double lo;
    double hi;
};

// [1e-6, 1e4] times the problem scale.
Domain default_domain(const StoppingProblem& p);

struct EngineOptions {
    int samples_per_gap = 1024;     // log-spaced points per bounded kernel gap
    int endpoint_refinement = 40;   // extra points at gap-width offsets 2^-k from each end
    double root_rel_tol = 1e-10;    // bisection tolerance for region boundaries
    std::optional<double> indifference_tol; // |g| below this is indifference; default 1e-9 u_ref
    double merge_tol = 1e-12;       // kernel merge tolerance, multiples of scale
};

// Stopping, continuation and indifference regions of a law, where
// g(x) = J(x; L*tau(x)) - u(x) is < 0, > 0 and = 0 respectively. Each set is
// stored as its closure, so neighbouring regions share boundary points;
// interiors are pairwise disjoint. ker(tau) is contained in I.
struct RegionDecomposition {
    IntervalKernel stop;
    IntervalKernel cont;
    IntervalKernel indiff;
};

RegionDecomposition classify_regions(const StoppingProblem& p, const StoppingLaw& law,
                                     const Domain& domain, const EngineOptions& opts = {});

// One level of strategic reasoning: ker(Theta tau) = closure(S_tau) ∪ ker(tau).
StoppingLaw theta(const StoppingProblem& p, const StoppingLaw& law, const Domain& domain,
                  const EngineOptions& opts = {});

struct IterationTrace {
    std::vector<IntervalKernel> iterates; // init first; nested increasing
    bool converged = false;
    int steps = 0; // Theta applications that changed the kernel
};

struct IterationResult {
    StoppingLaw law;
    IterationTrace trace;
};

// Apply Theta until two consecutive kernels are approx_equal within tol or
// max_iter applications have been made. Non-convergence is reported through
// trace.converged, never as a silent success.
IterationResult iterate_to_equilibrium(const StoppingProblem& p, const StoppingLaw& init,
                                       const Domain& domain, int max_iter, double tol,
                                       const EngineOptions& opts = {});

bool is_equilibrium(const StoppingProblem& p, const StoppingLaw& law, const Domain& domain,
                    double tol, const EngineOptions& opts = {});

} // namespace dstop

#endif // DSTOP_EQUILIBRIUM_HPP
