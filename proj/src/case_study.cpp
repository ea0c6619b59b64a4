#include "dstop/case_study.hpp"

#include "dstop/errors.hpp"
#include "dstop/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dstop {

CaseStudyParams CaseStudyParams::make(double K, double eta) {
    if (!(K > 0.0) || !std::isfinite(K))
        throw ConfigError("case study: K must be positive");
    if (!(eta > 0.0 && eta < 1.0))
        throw ConfigError("case study: eta must lie in (0,1)");
    return {K, eta};
}

StoppingProblem CaseStudyParams::problem() const {
    return StoppingProblem::from_beta(1.0, CallPayoff{K}, ConvexQuadratic{eta});
}

namespace {

double w(const CaseStudyParams& c, double q) { return c.eta * q * q + (1.0 - c.eta) * q; }

void check_x(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("state x must be positive and finite");
}

} // namespace

double theta_threshold_map(const CaseStudyParams& c, double b) {
    if (!(b > c.b_star()))
        throw DomainError("theta_threshold_map needs b > b_star = " + std::to_string(c.b_star()));
    if (std::isinf(b))
        return c.K / c.eta;
    return c.K * b / (c.eta * (b - c.K));
}

bool in_family(const CaseStudyParams& c, double b) { return b >= 0.0 && b <= c.b_star(); }

double value_of_threshold(const CaseStudyParams& c, double x, double b) {
    check_x(x);
    if (!(b >= 0.0))
        throw DomainError("threshold b must be nonnegative");
    const StoppingProblem p = c.problem();
    if (x >= b)
        return p.u(x);
    return eval_interval_exit(p, ExitSpec{0.0, b, x});
}

double optimal_equilibrium(const CaseStudyParams& c, double x) {
    check_x(x);
    return c.b_star();
}

double cost_of_equilibrium(const CaseStudyParams& c, double x, double b) {
    check_x(x);
    const double bs = c.b_star();
    if (!(b >= 0.0 && b < bs))
        throw DomainError("cost_of_equilibrium needs 0 <= b < b_star");
    if (x >= bs)
        return 0.0;
    const double q = b <= x ? 1.0 : x / b;
    return c.K - std::max(b, x) + (c.K / c.eta) * w(c, x / bs) / w(c, q);
}

bool pareto_dominates(const CaseStudyParams& c, double b1, double b2) {
    if (!in_family(c, b1) || !in_family(c, b2))
        throw DomainError("pareto_dominates: thresholds must lie in [0, b_star]");
    return b1 >= b2;
}

} // namespace dstop
