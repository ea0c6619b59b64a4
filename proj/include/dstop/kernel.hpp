#ifndef DSTOP_KERNEL_HPP
#define DSTOP_KERNEL_HPP

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace dstop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval [lo, hi] of the state space (0, inf). lo == 0 stands for a
// piece reaching down to the (excluded) origin, hi == inf for a ray.
struct Piece {
    double lo;
    double hi;

    bool operator==(const Piece&) const = default;
};

// Finite union of closed intervals, points and rays in (0, inf): the set of
// states at which a stopping law stops.
//
// Pieces are kept sorted with strictly positive gaps; touching pieces and
// pieces closer than the merge tolerance are coalesced on construction.
class IntervalKernel {
public:
    IntervalKernel() = default;
    explicit IntervalKernel(std::vector<Piece> pieces, double merge_tol = 0.0);

    static IntervalKernel empty_set() { return {}; }
    static IntervalKernel whole() { return IntervalKernel({{0.0, kInf}}); }
    static IntervalKernel ray(double lo) { return IntervalKernel({{lo, kInf}}); }
    static IntervalKernel point(double p) { return IntervalKernel({{p, p}}); }
    static IntervalKernel interval(double lo, double hi) { return IntervalKernel({{lo, hi}}); }

    const std::vector<Piece>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }
    bool empty() const { return pieces_.empty(); }
    bool is_whole() const;

    // Exact on endpoints; 0 and negative numbers are never contained.
    bool contains(double x) const;

    // True when every point of `other` lies in this set.
    bool includes(const IntervalKernel& other) const;

    // Re-run normalisation with a (possibly larger) merge tolerance.
    IntervalKernel normalized(double merge_tol) const;

    bool operator==(const IntervalKernel&) const = default;

private:
    std::vector<Piece> pieces_;
};

struct Neighbors {
    double a;          // sup(kernel ∩ (0,x)), 0 if empty
    double b;          // inf(kernel ∩ (x,inf)), inf if empty
    bool in_closure;   // x in the (closed) kernel: immediate stop
};

Neighbors neighbors(const IntervalKernel& kernel, double x);

IntervalKernel kernel_union(const IntervalKernel& k1, const IntervalKernel& k2,
                            double merge_tol = 0.0);

// Same piece count and every endpoint within tol (inf matches only inf).
bool approx_equal(const IntervalKernel& k1, const IntervalKernel& k2, double tol);

// "[l1,r1]∪[l2,inf)". Empty set prints as "∅", a piece from the origin as
// "(0,r]". Endpoints use the shortest round-trip decimal form.
std::string to_string(const IntervalKernel& kernel);

// Inverse of to_string; also accepts "U" as the union sign, "{p}" for points,
// and the words "empty"/"never" and "all". Throws ConfigError.
IntervalKernel parse_kernel(std::string_view text);

// Markovian stopping law tau: (0,inf) -> {0,1}, tau(x) = 0 iff x is in the
// kernel.
class StoppingLaw {
public:
    StoppingLaw() = default;
    explicit StoppingLaw(IntervalKernel kernel) : kernel_(std::move(kernel)) {}

    static StoppingLaw never_stop() { return StoppingLaw(); }
    static StoppingLaw all_stop() { return StoppingLaw(IntervalKernel::whole()); }
    // 1_{(0,b)}: continue below b, stop from b on. b = 0 is the all-stop law.
    static StoppingLaw continue_below(double b);

    const IntervalKernel& kernel() const { return kernel_; }
    int operator()(double x) const { return kernel_.contains(x) ? 0 : 1; }

    bool operator==(const StoppingLaw&) const = default;

private:
    IntervalKernel kernel_;
};

} // namespace dstop

#endif // DSTOP_KERNEL_HPP
