#include "dstop/errors.hpp"
#include "dstop/kernel.hpp"
#include "gen.hpp"

#include <doctest.h>

using namespace dstop;

namespace {

IntervalKernel K(std::string_view s) { return parse_kernel(s); }

bool same_membership(const IntervalKernel& k, const std::function<bool(double)>& f,
                     const std::vector<double>& probes) {
    for (double x : probes)
        if (k.contains(x) != f(x))
            return false;
    return true;
}

// probes: endpoints, their neighbourhoods, and a log grid
std::vector<double> probes_for(std::initializer_list<IntervalKernel> ks) {
    std::vector<double> xs;
    for (int i = 0; i <= 400; ++i)
        xs.push_back(1e-3 * std::pow(1e6, i / 400.0));
    for (const auto& k : ks)
        for (const Piece& p : k.pieces())
            for (double e : {p.lo, p.hi})
                if (std::isfinite(e) && e > 0.0)
                    for (double f : {1.0 - 1e-9, 1.0, 1.0 + 1e-9})
                        xs.push_back(e * f);
    return xs;
}

} // namespace

TEST_CASE("neighbors") {
    auto n = neighbors(K("[3,inf)"), 2.0);
    CHECK(n.a == 0.0);
    CHECK(n.b == 3.0);
    CHECK_FALSE(n.in_closure);
    CHECK(neighbors(K("[3,inf)"), 3.0).in_closure);
    n = neighbors(K("{2.5}∪[4,5]"), 3.0);
    CHECK(n.a == 2.5);
    CHECK(n.b == 4.0);
    CHECK_FALSE(n.in_closure);
    n = neighbors(K("{2.5}∪[4,5]"), 6.0);
    CHECK(n.a == 5.0);
    CHECK(n.b == kInf);
    CHECK(neighbors(K("{2.5}∪[4,5]"), 2.5).in_closure);
    n = neighbors(IntervalKernel::empty_set(), 1.0);
    CHECK(n.a == 0.0);
    CHECK(n.b == kInf);
}

TEST_CASE("union examples") {
    CHECK(kernel_union(K("[1,2]"), K("[2,3]")) == K("[1,3]"));
    CHECK(kernel_union(K("[1,2]"), K("[4,inf)")).size() == 2);
    const auto k = K("{0.5}∪[1,2]∪[7,inf)");
    CHECK(kernel_union(IntervalKernel::empty_set(), k) == k);
    CHECK(kernel_union(K("[1,2]"), IntervalKernel({{2 + 1e-13, 3}}), 1e-12).size() == 1);
    CHECK(kernel_union(K("[1,2]"), K("[2.1,3]"), 1e-12).size() == 2);
}

TEST_CASE("approx_equal examples") {
    CHECK(approx_equal(K("[3,inf)"), IntervalKernel::ray(3 + 1e-12), 1e-9));
    CHECK_FALSE(approx_equal(K("[3,inf)"), K("[2.9,inf)"), 1e-9));
    CHECK(approx_equal(IntervalKernel::empty_set(), IntervalKernel::empty_set(), 1e-9));
    CHECK_FALSE(approx_equal(K("[3,inf)"), K("[3,1e9]"), 1e-9));
    CHECK_FALSE(approx_equal(K("[3,4]"), K("[3,4]∪[5,6]"), 1e-9));
    CHECK_THROWS_AS(approx_equal(K("[3,4]"), K("[3,4]"), 0.0), DomainError);
}

TEST_CASE("membership is exact on endpoints") {
    const auto k = K("{2}∪[3,4]∪[10,inf)");
    CHECK(k.contains(2.0));
    CHECK_FALSE(k.contains(std::nextafter(2.0, 3.0)));
    CHECK(k.contains(3.0));
    CHECK(k.contains(4.0));
    CHECK_FALSE(k.contains(std::nextafter(4.0, 5.0)));
    CHECK(k.contains(1e300));
    CHECK_FALSE(k.contains(0.0));
    CHECK_FALSE(IntervalKernel::whole().contains(0.0));
    CHECK(IntervalKernel::whole().contains(1e-300));
}

TEST_CASE("text round trip") {
    CHECK(to_string(IntervalKernel::empty_set()) == "∅");
    CHECK(to_string(IntervalKernel::whole()) == "(0,inf)");
    CHECK(to_string(K("[3,inf)")) == "[3,inf)");
    CHECK(to_string(K("{2.5} U [4,5]")) == "{2.5}∪[4,5]");
    CHECK(to_string(K("(0,1]")) == "(0,1]");
    CHECK(K("never").empty());
    CHECK(K("all").is_whole());
    CHECK(K("[1,∞)") == K("[1,inf)"));
    CHECK_THROWS_AS(K("[1,2"), ConfigError);
    CHECK_THROWS_AS(K("(1,2]"), ConfigError);
    CHECK_THROWS_AS(K("[2,1]"), ConfigError);
    CHECK_THROWS_AS(K("[a,1]"), ConfigError);
    gen::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const auto k = gen::kernel(rng);
        CHECK(parse_kernel(to_string(k)) == k);
    }
}

TEST_CASE("stopping law") {
    const auto law = StoppingLaw::continue_below(3.0);
    CHECK(law(2.0) == 1);
    CHECK(law(3.0) == 0);
    CHECK(StoppingLaw::continue_below(0.0).kernel().is_whole());
    CHECK(StoppingLaw::never_stop()(5.0) == 1);
    CHECK(StoppingLaw::all_stop()(5.0) == 0);
}

TEST_CASE("property: union is commutative, associative, idempotent and matches membership") {
    gen::Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = gen::kernel(rng), b = gen::kernel(rng), c = gen::kernel(rng);
        const auto ab = kernel_union(a, b);
        CHECK(ab == kernel_union(b, a));
        CHECK(kernel_union(ab, c) == kernel_union(a, kernel_union(b, c)));
        CHECK(kernel_union(a, a) == a);
        CHECK(ab.includes(a));
        CHECK(ab.includes(b));
        CHECK(same_membership(
            ab, [&](double x) { return a.contains(x) || b.contains(x); }, probes_for({a, b})));
    }
}

TEST_CASE("property: normalisation is idempotent and pieces are strictly separated") {
    gen::Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = gen::kernel(rng, 8);
        const auto n1 = k.normalized(1e-3);
        CHECK(n1.normalized(1e-3) == n1);
        CHECK(k.normalized(0.0) == k);
        const auto& ps = n1.pieces();
        for (std::size_t i = 0; i + 1 < ps.size(); ++i)
            CHECK(ps[i].hi + 1e-3 < ps[i + 1].lo);
    }
}

TEST_CASE("property: neighbours bracket states outside the closure") {
    gen::Rng rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = gen::kernel(rng);
        const double x = gen::log_uniform(rng, 1e-3, 1e3);
        const auto n = neighbors(k, x);
        CHECK(n.in_closure == k.contains(x));
        if (!n.in_closure) {
            CHECK(n.a < x);
            CHECK(x < n.b);
            CHECK((n.a == 0.0 || k.contains(n.a)));
            CHECK((n.b == kInf || k.contains(n.b)));
            // no kernel point strictly between
            for (int i = 1; i < 50; ++i) {
                const double y = n.a + (std::min(n.b, 1e6) - n.a) * i / 50.0;
                CHECK_FALSE(k.contains(y));
            }
        }
    }
}
