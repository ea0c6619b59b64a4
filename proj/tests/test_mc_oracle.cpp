#include "dstop/errors.hpp"
#include "dstop/evaluator.hpp"
#include "dstop/mc_oracle.hpp"
#include "gen.hpp"

#include <doctest.h>

#include <numeric>

using namespace dstop;
using doctest::Approx;

namespace {

StoppingProblem quad_call() {
    return StoppingProblem::from_beta(1.0, CallPayoff{1.0}, ConvexQuadratic{0.5});
}

SimConfig cfg(std::size_t n, std::uint64_t seed, bool bridge = true) {
    SimConfig c;
    c.n_paths = n;
    c.seed = seed;
    c.bridge = bridge;
    return c;
}

} // namespace

TEST_CASE("all-stop law returns u(x0) on every path") {
    const auto p = quad_call();
    const auto s = simulate_stopped_values(p, 2.5, StoppingLaw::all_stop(), cfg(1000, 1));
    REQUIRE(s.values.size() == 1000);
    for (double v : s.values)
        CHECK(v == p.u(2.5));
    const auto e = distorted_expectation(p, s);
    CHECK(e.value == p.u(2.5));
    CHECK(e.std_error == 0.0);
}

TEST_CASE("hitting probability x/b") {
    for (auto [x, b] : {std::pair{1.0, 2.0}, std::pair{0.1, 10.0}, std::pair{1.9, 2.0}}) {
        const auto e = estimate_hit_prob(x, b, cfg(20000, 3));
        CHECK(std::abs(e.value - x / b) <= 4 * e.std_error + 1e-12);
    }
    CHECK_THROWS_AS(estimate_hit_prob(2.0, 1.0, cfg(1000, 1)), DomainError);
}

TEST_CASE("never stopping drifts to zero") {
    const auto p = quad_call();
    auto c = cfg(2000, 4);
    c.horizon = 100.0;
    const auto s = simulate_stopped_values(p, 2.0, StoppingLaw::never_stop(), c);
    CHECK(s.censored_fraction() < 0.005);
    CHECK(s.warnings.empty());
    CHECK(distorted_expectation(p, s).value < 1e-3);
}

TEST_CASE("rank-dependent sum") {
    gen::Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(gen::integer(rng, 1, 5000));
        for (double& x : v)
            x = gen::log_uniform(rng, 1e-3, 1e3);
        const auto s = make_sample(v);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        const auto e = distorted_expectation([](double q) { return q; }, s);
        CHECK(std::abs(e.value - mean) <= 1e-12 * mean);
        const double c = v[0];
        const auto flat = make_sample(std::vector<double>(v.size(), c));
        CHECK(distorted_expectation([](double q) { return q * q; }, flat).value == c);
    }
    CHECK_THROWS_AS(distorted_expectation([](double q) { return q; }, EmpiricalSample{}),
                    DomainError);
}

TEST_CASE("interval exit value by simulation") {
    const auto p = quad_call();
    const StoppingLaw law(parse_kernel("(0,1]∪[3,inf)"));
    const auto s = simulate_stopped_values(p, 2.0, law, cfg(20000, 5));
    const auto e = distorted_expectation(p, s);
    CHECK(std::abs(e.value - 0.75) <= 4 * e.std_error);
    CHECK(e.std_error > 0.0);
    CHECK(e.std_error < 0.02);
}

TEST_CASE("bootstrap error matches the spread of independent replicates") {
    const auto p = quad_call();
    const StoppingLaw law(parse_kernel("[3,inf)"));
    std::vector<double> ests;
    double se = 0.0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto e = distorted_expectation(p, simulate_stopped_values(p, 2.0, law, cfg(4000, seed)));
        ests.push_back(e.value);
        se += e.std_error / 30;
    }
    const double mean = std::accumulate(ests.begin(), ests.end(), 0.0) / ests.size();
    double var = 0.0;
    for (double e : ests)
        var += (e - mean) * (e - mean) / (ests.size() - 1);
    CHECK(std::sqrt(var) == Approx(se).epsilon(0.35));
    CHECK(std::abs(mean - 10.0 / 9.0) <= 4 * std::sqrt(var / ests.size()));
}

TEST_CASE("deterministic replay and thread independence") {
    const auto p = quad_call();
    const StoppingLaw law(parse_kernel("{0.5}∪[3,inf)"));
    auto c1 = cfg(5000, 77);
    c1.threads = 1;
    auto c4 = c1;
    c4.threads = 4;
    const auto a = simulate_stopped_values(p, 2.0, law, c1);
    const auto b = simulate_stopped_values(p, 2.0, law, c1);
    const auto c = simulate_stopped_values(p, 2.0, law, c4);
    CHECK(a.values == b.values);
    CHECK(a.values == c.values);
    CHECK(distorted_expectation(p, a).std_error == distorted_expectation(p, b).std_error);
    auto c2 = c1;
    c2.seed = 78;
    CHECK(simulate_stopped_values(p, 2.0, law, c2).values != a.values);
}

TEST_CASE("configuration errors") {
    const auto p = quad_call();
    auto c = cfg(1000, 1);
    c.lower_cutoff = 0.6;
    CHECK_THROWS_AS(simulate_stopped_values(p, 2.0, StoppingLaw(parse_kernel("[0.5,1]∪[3,inf)")), c),
                    ConfigError);
    c.lower_cutoff = 3.0;
    CHECK_THROWS_AS(simulate_stopped_values(p, 2.0, StoppingLaw::never_stop(), c), ConfigError);
    c = cfg(1000, 1);
    c.dt = 100.0;
    CHECK_THROWS_AS(simulate_stopped_values(p, 2.0, StoppingLaw::never_stop(), c), ConfigError);
    const auto neg = StoppingProblem::from_beta(-1.0, CallPayoff{1.0}, IdentityDistortion{});
    CHECK_THROWS_AS(simulate_stopped_values(neg, 2.0, StoppingLaw::never_stop(), cfg(1000, 1)),
                    UnsupportedError);
}

TEST_CASE("short horizon raises the censoring warning") {
    const auto p = quad_call();
    auto c = cfg(2000, 6);
    c.horizon = 0.05;
    const auto s = simulate_stopped_values(p, 2.0, StoppingLaw(parse_kernel("[3,inf)")), c);
    CHECK(s.n_censored > 0);
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("doubling horizon and halving cutoff moves the estimate by under 2 SE") {
    const auto p = quad_call();
    for (const char* k : {"(0,1]∪[3,inf)", "[3,inf)", "(0,2]∪[5,inf)"}) {
        const StoppingLaw law(parse_kernel(k));
        const double x0 = std::string(k).find('5') != std::string::npos ? 3.0 : 2.0;
        SimConfig base = cfg(20000, 11);
        SimConfig wide = base;
        wide.horizon = 2.0 * base.horizon;
        wide.lower_cutoff = 0.5 * effective_cutoff(p, base);
        const auto e1 = distorted_expectation(p, simulate_stopped_values(p, x0, law, base));
        const auto e2 = distorted_expectation(p, simulate_stopped_values(p, x0, law, wide));
        CAPTURE(k);
        CHECK(std::abs(e1.value - e2.value) < 2.0 * e1.std_error);
    }
}
