#include "dstop/case_study.hpp"
#include "dstop/equilibrium.hpp"
#include "dstop/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace dstop;
using doctest::Approx;

namespace {
const CaseStudyParams cs = CaseStudyParams::make(1.0, 0.5);
}

TEST_CASE("parameters") {
    CHECK(cs.b_star() == 3.0);
    CHECK_THROWS_AS(CaseStudyParams::make(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(CaseStudyParams::make(0.0, 0.5), ConfigError);
    for (double eta : {0.1, 0.5, 0.9})
        CHECK(CaseStudyParams::make(2.0, eta).b_star() > 2.0);
}

TEST_CASE("theta threshold map") {
    CHECK(theta_threshold_map(cs, 10.0) == Approx(20.0 / 9.0).epsilon(1e-15));
    CHECK(theta_threshold_map(cs, 3.0 + 1e-9) == Approx(3.0).epsilon(1e-8));
    CHECK(theta_threshold_map(cs, 1e12) == Approx(2.0).epsilon(1e-11));
    CHECK(theta_threshold_map(cs, kInf) == 2.0);
    CHECK_THROWS_AS(theta_threshold_map(cs, 3.0), DomainError);
    for (int i = 1; i <= 1000; ++i) {
        const double b = 3.0 * std::pow(1000.0 / 3.0, i / 1000.0);
        const double bp = theta_threshold_map(cs, b);
        CHECK(bp > 2.0);
        CHECK(bp < 3.0);
    }
}

TEST_CASE("threshold map matches the generic engine") {
    const auto p = cs.problem();
    for (double b : {3.2, 4.0, 7.0, 20.0, 300.0})
        CHECK(approx_equal(theta(p, StoppingLaw::continue_below(b), default_domain(p)).kernel(),
                           IntervalKernel::ray(theta_threshold_map(cs, b)), 1e-6));
}

TEST_CASE("value of threshold") {
    CHECK(value_of_threshold(cs, 1.0, 3.0) == Approx(4.0 / 9.0).epsilon(1e-15));
    CHECK(value_of_threshold(cs, 1.0, 0.0) == 0.0);
    for (double b : {0.0, 1.0, 2.0, 3.0})
        CHECK(value_of_threshold(cs, 5.0, b) == 4.0);
    CHECK(value_of_threshold(cs, 1.0, 5.0) > 0.0); // out of family, still computed
    CHECK_FALSE(in_family(cs, 5.0));
}

TEST_CASE("optimal equilibrium") {
    CHECK(optimal_equilibrium(cs, 1.0) == 3.0);
    CHECK(optimal_equilibrium(cs, 5.0) == 3.0);
    CHECK(value_of_threshold(cs, 5.0, optimal_equilibrium(cs, 5.0)) == 4.0);
    // brute-force argmax over 10^4 grid points of [0, 3]
    for (double x : {0.5, 1.0, 2.0, 2.9}) {
        const int n = 10000;
        double best = -1.0, arg = -1.0;
        bool monotone = true;
        double prev = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double b = 3.0 * i / n;
            const double v = value_of_threshold(cs, x, b);
            monotone = monotone && v >= prev;
            prev = v;
            if (v > best) {
                best = v;
                arg = b;
            }
        }
        CHECK(monotone);
        CHECK(arg == Approx(3.0).epsilon(3.0 / n));
    }
}

TEST_CASE("cost of equilibrium") {
    CHECK(std::abs(cost_of_equilibrium(cs, 1.0, 0.0) - 4.0 / 9.0) <= 1e-12);
    CHECK(cost_of_equilibrium(cs, 4.0, 0.0) == 0.0);
    CHECK(cost_of_equilibrium(cs, 4.0, 2.5) == 0.0);
    CHECK(cost_of_equilibrium(cs, 1.0, 3.0 - 1e-9) == Approx(0.0).epsilon(1e-7).scale(1.0));
    CHECK_THROWS_AS(cost_of_equilibrium(cs, 1.0, 3.0), DomainError);
    // cash makes the two values meet: u(b + c) w(x/b) for x < b, u(x + c) for x >= b
    for (double x : {0.3, 1.0, 2.0, 2.9})
        for (double b : {0.0, 0.5, 1.5, 2.5}) {
            const double c = cost_of_equilibrium(cs, x, b);
            const double q = b <= x ? 1.0 : x / b;
            const double level = std::max(b, x);
            const double w = 0.5 * q * q + 0.5 * q;
            CHECK(w * std::max(level + c - 1.0, 0.0) ==
                  Approx(value_of_threshold(cs, x, 3.0)).epsilon(1e-12));
        }
    for (int i = 1; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const double x = 3.0 * i / 50.0;
            const double b = 3.0 * j / 50.0;
            CHECK(cost_of_equilibrium(cs, x, b) > 0.0);
        }
}

TEST_CASE("pareto ranking") {
    CHECK(pareto_dominates(cs, 3.0, 1.0));
    CHECK_FALSE(pareto_dominates(cs, 1.0, 3.0));
    CHECK(pareto_dominates(cs, 2.0, 2.0));
    CHECK_THROWS_AS(pareto_dominates(cs, 4.0, 1.0), DomainError);
    for (double b1 : {1.0, 1.5, 2.0, 3.0})
        for (double b2 : {1.0, 1.5, 2.0, 3.0}) {
            bool values_dominate = true;
            for (int i = 1; i <= 100; ++i) {
                const double x = 0.05 * i;
                values_dominate = values_dominate &&
                                  value_of_threshold(cs, x, b1) >= value_of_threshold(cs, x, b2);
            }
            CHECK(pareto_dominates(cs, b1, b2) == values_dominate);
        }
}
