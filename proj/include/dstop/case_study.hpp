#ifndef DSTOP_CASE_STUDY_HPP
#define DSTOP_CASE_STUDY_HPP

#include "dstop/problem.hpp"

namespace dstop {

// beta = 1, u(x) = (x - K)^+, w(q) = eta q^2 + (1 - eta) q. The threshold laws
// 1_{(0,b)} (continue below b, stop on [b, inf)) with 0 <= b <= b_star are
// exactly the equilibria; b = 0 is the all-stop law.
struct CaseStudyParams {
    double K;
    double eta;

    static CaseStudyParams make(double K, double eta);

    double b_star() const { return (eta + 1.0) * K / eta; }
    StoppingProblem problem() const;
};

// Kernel threshold of Theta applied to 1_{(0,b)}, b > b_star.
double theta_threshold_map(const CaseStudyParams& c, double b);

// J(x; first entry of [b, inf)). Values of b above b_star are outside the
// equilibrium family but still evaluated; see in_family().
double value_of_threshold(const CaseStudyParams& c, double x, double b);

bool in_family(const CaseStudyParams& c, double b);

// b_star, also where every family member has the same value (x >= b_star).
double optimal_equilibrium(const CaseStudyParams& c, double x);

// Cash that lifts the value of 1_{(0,b)} at x to that of the optimal equilibrium.
double cost_of_equilibrium(const CaseStudyParams& c, double x, double b);

// 1_{(0,b1)} dominates 1_{(0,b2)} at every state.
bool pareto_dominates(const CaseStudyParams& c, double b1, double b2);

} // namespace dstop

#endif // DSTOP_CASE_STUDY_HPP
