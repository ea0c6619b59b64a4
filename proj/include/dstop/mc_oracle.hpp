#ifndef DSTOP_MC_ORACLE_HPP
#define DSTOP_MC_ORACLE_HPP

#include "dstop/kernel.hpp"
#include "dstop/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dstop {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 50.0;
    std::optional<double> lower_cutoff; // absolute; default 1e-4 * scale
    std::size_t n_paths = 100000;
    std::uint64_t seed = 0;
    // Brownian-bridge crossing check inside each step, for every barrier.
    bool bridge = false;
    // Lengthen steps far from all barriers so a single step has a ~4 sd
    // margin; the log scheme is exact so only crossing detection matters.
    bool adaptive = true;
    int threads = 0; // 0: DSTOP_THREADS, else hardware concurrency
};

// Raw stopped states X_tau, in path order. Absorbed paths record 0.
struct StoppedStates {
    std::vector<double> states;
    std::size_t n_censored = 0;
    std::size_t n_absorbed = 0;
};

// Payoffs u(X_tau) sorted ascending.
struct EmpiricalSample {
    std::vector<double> values;
    std::size_t n_censored = 0;
    std::size_t n_absorbed = 0;
    std::vector<std::string> warnings;

    double censored_fraction() const;
};

struct Estimate {
    double value;
    double std_error;
};

// Paths of dX = v X dB from x0, stopped on first entry into the kernel.
// Crossing a kernel boundary records the boundary value itself.
StoppedStates simulate_stopped_states(double volatility, double x0, const IntervalKernel& kernel,
                                      const SimConfig& cfg);

EmpiricalSample simulate_stopped_values(const StoppingProblem& p, double x0,
                                        const StoppingLaw& law, const SimConfig& cfg);

// Sorts values and attaches censoring diagnostics.
EmpiricalSample make_sample(std::vector<double> values, std::size_t n_censored = 0,
                            std::size_t n_absorbed = 0);

// Rank-dependent sum over order statistics with a bootstrap standard error.
Estimate distorted_expectation(const std::function<double(double)>& w,
                               const EmpiricalSample& sample, int resamples = 200,
                               std::uint64_t boot_seed = 0x5eed);
Estimate distorted_expectation(const StoppingProblem& p, const EmpiricalSample& sample,
                               int resamples = 200, std::uint64_t boot_seed = 0x5eed);

// P[hit b before the cutoff / horizon] for a unit-volatility driftless GBM;
// the exact value x0 / b does not depend on volatility.
Estimate estimate_hit_prob(double x0, double b, const SimConfig& cfg);

// Default cutoff and worker count resolution, exposed for the CLI.
double effective_cutoff(const StoppingProblem& p, const SimConfig& cfg);
int effective_threads(const SimConfig& cfg);

} // namespace dstop

#endif // DSTOP_MC_ORACLE_HPP
