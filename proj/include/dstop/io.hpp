#ifndef DSTOP_IO_HPP
#define DSTOP_IO_HPP

#include "dstop/kernel.hpp"
#include "dstop/problem.hpp"

#include <json.hpp>

#include <string>

namespace dstop {

// Problem document:
//   {"beta": 1}  or  {"mu": 0.1, "sigma": 0.5}   (optional "scale")
//   "payoff":     {"type": "power", "gamma": g} | {"type": "call", "K": k} | {"type": "identity"}
//   "distortion": {"type": "prelec", "alpha": a, "gamma": g} | {"type": "tk", "gamma": g}
//               | {"type": "two_param", "alpha": a, "gamma": g} | {"type": "convex_power", "eta": e}
//               | {"type": "quadratic", "eta": e} | {"type": "identity"}
// Errors are ConfigError with the JSON pointer of the offending field.
StoppingProblem problem_from_json(const nlohmann::json& doc);
StoppingProblem load_problem(const std::string& path);
nlohmann::json problem_to_json(const StoppingProblem& p);

// Kernel as an array of [lo, hi] pairs, "inf" for an unbounded end.
nlohmann::json kernel_to_json(const IntervalKernel& k);
IntervalKernel kernel_from_json(const nlohmann::json& doc);

} // namespace dstop

#endif // DSTOP_IO_HPP
