#ifndef DSTOP_ROOTS_HPP
#define DSTOP_ROOTS_HPP

#include <cmath>
#include <utility>

namespace dstop {

// Bracket [lo, hi] with pred(lo) != pred(hi). Shrinks the bracket until
// hi - lo <= abs_tol + rel_tol * |hi| and returns it; the two ends keep
// their original predicate values.
template <class Pred>
std::pair<double, double> bisect_transition(Pred&& pred, double lo, double hi,
                                            double rel_tol, double abs_tol = 0.0,
                                            int max_iter = 400) {
    const bool at_lo = pred(lo);
    for (int i = 0; i < max_iter; ++i) {
        if (hi - lo <= abs_tol + rel_tol * std::abs(hi))
            break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (pred(mid) == at_lo)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

// Root of f in [lo, hi] where f(lo) and f(hi) have opposite signs (or one
// vanishes). Returns the midpoint of the final bracket.
template <class F>
double bisect_root(F&& f, double lo, double hi, double rel_tol, double abs_tol = 0.0) {
    const double flo = f(lo);
    if (flo == 0.0)
        return lo;
    if (f(hi) == 0.0)
        return hi;
    const bool neg_lo = flo < 0.0;
    auto [l, h] = bisect_transition([&](double x) { return (f(x) < 0.0) == neg_lo; },
                                    lo, hi, rel_tol, abs_tol);
    return 0.5 * (l + h);
}

// Golden-section search for a maximum of a unimodal f on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol,
                                     int max_iter = 300) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - r * (hi - lo);
    double d = lo + r * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace dstop

#endif // DSTOP_ROOTS_HPP
