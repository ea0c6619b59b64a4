#include "dstop/evaluator.hpp"

#include "dstop/errors.hpp"

#include <cmath>

namespace dstop {

double eval_interval_exit(const StoppingProblem& p, const ExitSpec& e) {
    if (!(p.beta() > 0.0))
        throw UnsupportedError("interval-exit payoff requires beta > 0");
    if (!(e.a >= 0.0) || std::isnan(e.b) || !(e.a < e.b))
        throw DomainError("interval exit: need 0 <= a < b");
    if (!(e.x >= e.a && e.x <= e.b))
        throw DomainError("interval exit: x must lie in [a,b]");

    if (std::isinf(e.b))
        return e.a == 0.0 ? 0.0 : p.u(e.a);
    if (e.x == e.b)
        return p.u(e.b);
    const double ua = p.u(e.a);
    if (e.x == e.a)
        return ua;
    const double ub = p.u(e.b);
    return ua + p.w((e.x - e.a) / (e.b - e.a)) * (ub - ua);
}

double eval_continuation(const StoppingProblem& p, const StoppingLaw& law, double x) {
    const Neighbors n = neighbors(law.kernel(), x);
    if (n.in_closure)
        return p.u(x);
    return eval_interval_exit(p, ExitSpec{n.a, n.b, x});
}

double hit_prob(double x, double b) {
    if (!(x > 0.0) || !(b > 0.0))
        throw DomainError("hit_prob: x and b must be positive");
    if (x > b)
        throw DomainError("hit_prob: requires x <= b");
    if (std::isinf(b))
        return 0.0;
    return x / b;
}

} // namespace dstop
