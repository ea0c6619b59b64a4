#include "dstop/equilibrium.hpp"

#include "dstop/errors.hpp"
#include "dstop/evaluator.hpp"
#include "dstop/roots.hpp"

#include <algorithm>
#include <cmath>

namespace dstop {

Domain default_domain(const StoppingProblem& p) {
    return {1e-6 * p.scale(), 1e4 * p.scale()};
}

namespace {

enum Region : int { kStop = -1, kIndiff = 0, kCont = 1 };

struct Collector {
    std::vector<Piece> stop, cont, indiff;

    void add(Region r, double lo, double hi) {
        auto& dst = r == kStop ? stop : r == kCont ? cont : indiff;
        dst.push_back({lo, hi});
    }
};

void check_domain(const Domain& d) {
    if (!(d.lo > 0.0) || !(d.hi > d.lo) || !std::isfinite(d.hi))
        throw DomainError("domain must satisfy 0 < lo < hi < inf");
}

// Gap (a, inf): continuation value is the constant u(a) (0 when a = 0), and
// u is nondecreasing, so S = {u(x) > u(a)} = (L, inf) and C is empty.
void classify_unbounded_gap(const StoppingProblem& p, double a, Collector& out) {
    const double c = a == 0.0 ? 0.0 : p.u(a);
    const double level = std::max(a, p.u_upper_level(c));
    if (level > a)
        out.add(kIndiff, a, level);
    out.add(kStop, level, kInf);
}

void classify_bounded_gap(const StoppingProblem& p, double a, double b, const Domain& domain,
                          double tol, const EngineOptions& opts, Collector& out) {
    auto g = [&](double x) { return eval_interval_exit(p, ExitSpec{a, b, x}) - p.u(x); };
    auto region_of = [&](double x) -> Region {
        const double v = g(x);
        return v < -tol ? kStop : v > tol ? kCont : kIndiff;
    };

    const double left = a > 0.0 ? a : std::min(domain.lo, 1e-3 * b);
    std::vector<double> xs;
    xs.reserve(opts.samples_per_gap + 2 * opts.endpoint_refinement);
    const int n = opts.samples_per_gap;
    for (int i = 1; i <= n; ++i)
        xs.push_back(left * std::pow(b / left, static_cast<double>(i) / (n + 1)));
    for (int k = 1; k <= opts.endpoint_refinement; ++k) {
        const double off = (b - a) * std::ldexp(1.0, -k);
        xs.push_back(b - off);
        if (a > 0.0)
            xs.push_back(a + off);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::erase_if(xs, [&](double x) { return !(x > a && x < b); });
    if (xs.empty()) {
        out.add(kIndiff, a, b);
        return;
    }

    // Runs of constant class between bisected boundaries. Below the first
    // sample of an origin gap the first class is extended to 0.
    struct Run {
        double lo, hi;
        Region r;
    };
    std::vector<Run> runs;
    std::vector<double> isolated;
    double run_start = a;
    Region run = region_of(xs.front());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const Region next = region_of(xs[i + 1]);
        if (next == run)
            continue;
        auto [lo, hi] = bisect_transition([&](double x) { return region_of(x) == run; },
                                          xs[i], xs[i + 1], opts.root_rel_tol);
        const double t = 0.5 * (lo + hi);
        runs.push_back({run_start, t, run});
        if (run != kIndiff && next != kIndiff)
            isolated.push_back(t); // sign change of g
        run_start = t;
        run = next;
    }
    runs.push_back({run_start, b, run});

    // g vanishes at kernel endpoints, so the tolerance band always produces a
    // thin I run there. Hand it to the neighbouring run when it is negligibly
    // thin or g keeps the neighbour's strict sign throughout.
    auto absorb = [&](const Run& band, Region into) {
        if (band.hi - band.lo <= 1e-6 * (b - a))
            return true;
        bool any = false;
        for (double x : xs) {
            if (x <= band.lo || x >= band.hi)
                continue;
            any = true;
            const double v = g(x);
            if (into == kStop ? !(v < 0.0) : !(v > 0.0))
                return false;
        }
        return any;
    };
    if (runs.size() >= 2 && runs.back().r == kIndiff && runs[runs.size() - 2].r != kIndiff &&
        absorb(runs.back(), runs[runs.size() - 2].r)) {
        runs[runs.size() - 2].hi = b;
        runs.pop_back();
    }
    if (a > 0.0 && runs.size() >= 2 && runs.front().r == kIndiff && runs[1].r != kIndiff &&
        absorb(runs.front(), runs[1].r)) {
        runs[1].lo = a;
        runs.erase(runs.begin());
    }
    for (const Run& r : runs)
        out.add(r.r, r.lo, r.hi);
    for (double t : isolated)
        out.add(kIndiff, t, t);
}

} // namespace

RegionDecomposition classify_regions(const StoppingProblem& p, const StoppingLaw& law,
                                     const Domain& domain, const EngineOptions& opts) {
    if (!(p.beta() > 0.0))
        throw UnsupportedError("region classification requires beta > 0");
    check_domain(domain);
    if (opts.samples_per_gap < 2)
        throw ConfigError("samples_per_gap must be at least 2");

    const double tol = opts.indifference_tol.value_or(1e-9 * p.u_reference());
    const double merge = opts.merge_tol * p.scale();
    const auto& pieces = law.kernel().pieces();

    Collector out;
    out.indiff = pieces; // ker(tau) ⊆ I
    double a = 0.0;
    for (const Piece& piece : pieces) {
        if (piece.lo > a)
            classify_bounded_gap(p, a, piece.lo, domain, tol, opts, out);
        a = piece.hi;
    }
    if (std::isfinite(a))
        classify_unbounded_gap(p, a, out);

    return {IntervalKernel(std::move(out.stop), merge), IntervalKernel(std::move(out.cont), merge),
            IntervalKernel(std::move(out.indiff), merge)};
}

StoppingLaw theta(const StoppingProblem& p, const StoppingLaw& law, const Domain& domain,
                  const EngineOptions& opts) {
    const RegionDecomposition r = classify_regions(p, law, domain, opts);
    return StoppingLaw(kernel_union(law.kernel(), r.stop, opts.merge_tol * p.scale()));
}

IterationResult iterate_to_equilibrium(const StoppingProblem& p, const StoppingLaw& init,
                                       const Domain& domain, int max_iter, double tol,
                                       const EngineOptions& opts) {
    if (max_iter < 1)
        throw ConfigError("max_iter must be at least 1");
    if (!(tol > 0.0))
        throw ConfigError("tol must be positive");
    IterationResult result{init, {}};
    result.trace.iterates.push_back(init.kernel());
    for (int n = 0; n < max_iter; ++n) {
        StoppingLaw next = theta(p, result.law, domain, opts);
        result.trace.iterates.push_back(next.kernel());
        const bool fixed = approx_equal(next.kernel(), result.law.kernel(), tol);
        result.law = std::move(next);
        if (fixed) {
            result.trace.converged = true;
            break;
        }
        ++result.trace.steps;
    }
    return result;
}

bool is_equilibrium(const StoppingProblem& p, const StoppingLaw& law, const Domain& domain,
                    double tol, const EngineOptions& opts) {
    return approx_equal(theta(p, law, domain, opts).kernel(), law.kernel(), tol);
}

} // namespace dstop
