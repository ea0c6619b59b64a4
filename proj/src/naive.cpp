#include "dstop/naive.hpp"

#include "dstop/errors.hpp"
#include "dstop/roots.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace dstop {

std::string to_string(PrecommitKind k) {
    switch (k) {
    case PrecommitKind::StopNow: return "stop-now";
    case PrecommitKind::Threshold: return "threshold";
    case PrecommitKind::NoOptimum: return "no-optimum";
    }
    return "?";
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::NegativeBetaNeverStop: return "never-stop";
    case Regime::ZeroBetaFixedThreshold: return "fixed-threshold";
    case Regime::PositiveBeta: return "positive-beta";
    }
    return "?";
}

BetaRegime classify_beta(const StoppingProblem& p) {
    if (p.beta() < 0.0)
        return {Regime::NegativeBetaNeverStop, kInf};
    if (p.beta() > 0.0)
        return {Regime::PositiveBeta, kInf};

    // beta = 0: the optimal level is the first state where U attains its sup.
    auto U = [&](double s) { return payoff_value(p.payoff(), s); };
    double s = 1.0;
    double prev = U(s);
    for (int k = 1; k < 1000; ++k) {
        const double next_s = std::ldexp(1.0, k);
        const double next = U(next_s);
        if (!std::isfinite(next_s))
            break;
        if (next <= prev) {
            // Flat from here on within probing resolution: locate the first
            // state reaching the plateau.
            const double top = prev;
            auto [lo, hi] = bisect_transition([&](double v) { return U(v) >= top; },
                                              0.0, s, 1e-14);
            (void)lo;
            return {Regime::ZeroBetaFixedThreshold, hi};
        }
        s = next_s;
        prev = next;
    }
    return {Regime::ZeroBetaFixedThreshold, kInf};
}

namespace {

bool u_is_convex(UShape s) { return s == UShape::Convex || s == UShape::Linear; }

// Exponent p when u(x) = x^p.
std::optional<double> power_exponent(const StoppingProblem& p) {
    if (const auto* f = std::get_if<PowerUtility>(&p.payoff()))
        return f->gamma / p.beta();
    if (std::holds_alternative<IdentityPayoff>(p.payoff()))
        return 1.0 / p.beta();
    return std::nullopt;
}

// Unchecked w(lambda) u(x/lambda); callers have already dispatched on shape.
double objective(const StoppingProblem& p, double x, double lambda) {
    return p.w(lambda) * p.u(x / lambda);
}

PrecommitResult stop_now(const StoppingProblem& p, double x, std::string rule) {
    return {PrecommitKind::StopNow, x, p.u(x), true, std::move(rule)};
}

PrecommitResult threshold(double b, double value, std::string rule) {
    return {PrecommitKind::Threshold, b, value, true, std::move(rule)};
}

PrecommitResult no_optimum(double value, bool exact, std::string rule) {
    return {PrecommitKind::NoOptimum, 0.0, value, exact, std::move(rule)};
}

// u = (x - K)^+, w = eta q^2 + (1 - eta) q (beta = 1).
PrecommitResult quadratic_call(const StoppingProblem& p, double x, double K, double eta) {
    const double upper = (eta + 1.0) / eta * K;
    // The maximizer (eta(x+K) - K) / (2 eta K) of the reduced objective is
    // positive iff x > (1-eta)K/eta, for every eta in (0,1).
    const double lower = (1.0 - eta) / eta * K;
    if (x >= upper)
        return stop_now(p, x, "quadratic-call closed form");
    if (x > lower) {
        const double lambda = (eta * (x + K) - K) / (2.0 * eta * K);
        const double b = 2.0 * eta * K * x / (eta * (x + K) - K);
        return threshold(b, objective(p, x, lambda), "quadratic-call closed form");
    }
    // Supremum (1 - eta) x approached as lambda -> 0, never attained.
    return no_optimum((1.0 - eta) * x, true, "quadratic-call closed form");
}

// w = (q^2 + q)/2, u = (x^(1/beta) - K)^+, beta > 1.
PrecommitResult half_quadratic_call(const StoppingProblem& p, double x, double K) {
    const double beta = p.beta();
    if (x >= bar_x_threshold(beta, K))
        return stop_now(p, x, "bar-x closed form");
    const double b = b_star_of_x(beta, K, x);
    return threshold(b, p.w(x / b) * p.u(b), "bar-x closed form");
}

PrecommitResult convex_generic(const StoppingProblem& p, double x) {
    constexpr int kLevels = 60;
    std::vector<double> f(kLevels + 1);
    for (int k = 0; k <= kLevels; ++k)
        f[k] = objective(p, x, std::ldexp(1.0, -k));

    if (f[kLevels] > f[kLevels - 1]) {
        // Still climbing at lambda = 2^-60: supremum sits at lambda -> 0.
        const bool diverging = f[kLevels] > 2.0 * f[kLevels - 10];
        return no_optimum(diverging ? kInf : f[kLevels], false, "reduced problem, grid");
    }
    const int best = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
    const double hi = best == 0 ? 0.0 : -(best - 1) * std::log(2.0);
    const double lo = -(best + 1) * std::log(2.0);
    auto [log_lambda, fmax] = golden_max(
        [&](double t) { return objective(p, x, std::exp(std::min(t, 0.0))); }, lo, hi,
        1e-12);
    if (f[0] >= fmax * (1.0 - 1e-12) || log_lambda >= -1e-12)
        return stop_now(p, x, "reduced problem, golden section");
    fmax = std::max(fmax, f[best]);
    return threshold(x / std::exp(log_lambda), fmax, "reduced problem, golden section");
}

PrecommitResult convex_dispatch(const StoppingProblem& p, double x) {
    if (const auto expo = power_exponent(p)) {
        const double e = *expo;
        if (const auto* w = std::get_if<Prelec>(&p.distortion()); w && w->alpha > 1.0) {
            const double lambda =
                std::exp(-std::pow(e / (w->alpha * w->gamma), 1.0 / (w->alpha - 1.0)));
            return threshold(x / lambda, objective(p, x, lambda),
                             "prelec alpha>1 closed form");
        }
        if (const auto* w = std::get_if<ConvexPower>(&p.distortion())) {
            // lambda^(eta - e) x^e
            if (w->eta >= e)
                return stop_now(p, x, "convex-power closed form");
            return no_optimum(kInf, true, "convex-power closed form");
        }
        if (std::holds_alternative<IdentityDistortion>(p.distortion())) {
            if (e <= 1.0)
                return stop_now(p, x, "identity distortion");
            return no_optimum(kInf, true, "identity distortion");
        }
    }
    return convex_generic(p, x);
}

// Lower bound sup_b w(x/b) u(b) over single upper barriers.
double two_point_lower_bound(const StoppingProblem& p, double x, bool& diverging) {
    double best = p.u(x);
    double earlier = 0.0;
    double last = 0.0;
    for (int k = 0; k <= 240; ++k) {
        const double b = x * std::exp2(k / 4.0);
        last = p.w(x / b) * p.u(b);
        best = std::max(best, last);
        if (k == 200)
            earlier = last;
    }
    diverging = last > 2.0 * earlier && last > 0.0;
    return diverging ? kInf : best;
}

} // namespace

double reduced_objective(const StoppingProblem& p, double x, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw DomainError("reduced objective: lambda must lie in (0,1]");
    if (!(p.beta() > 0.0) || !u_is_convex(shape_classify(p).u_shape))
        throw UnsupportedError("reduced objective applies to convex u only");
    return p.w(lambda) * p.u(x / lambda);
}

PrecommitResult solve_precommitted(const StoppingProblem& p, double x) {
    if (!(p.beta() > 0.0))
        throw UnsupportedError("solve_precommitted requires beta > 0; see classify_beta");
    if (!(x > 0.0))
        throw DomainError("solve_precommitted: x must be positive");

    const ShapeInfo shape = shape_classify(p);
    const auto* call = std::get_if<CallPayoff>(&p.payoff());
    const auto* quad = std::get_if<ConvexQuadratic>(&p.distortion());
    if (call && quad && p.beta() == 1.0)
        return quadratic_call(p, x, call->strike, quad->eta);
    if (call && quad && quad->eta == 0.5 && p.beta() > 1.0)
        return half_quadratic_call(p, x, call->strike);

    if (u_is_convex(shape.u_shape))
        return convex_dispatch(p, x);

    const bool concave_like = shape.u_shape == UShape::Concave ||
                              shape.u_shape == UShape::SShaped ||
                              shape.u_shape == UShape::ConstantThenConcave;
    if (concave_like && shape.w_shape == WShape::InverseS &&
        shape.w_prime_zero == Slope::Infinite) {
        // Every supported payoff family is unbounded, so sup u is never
        // attained and the optimum is never to stop at once.
        bool diverging = false;
        const double bound = two_point_lower_bound(p, x, diverging);
        return no_optimum(bound, diverging, "inverse-S w, unattained sup u");
    }
    if (shape.u_shape == UShape::Concave &&
        (shape.w_shape == WShape::Convex || shape.w_shape == WShape::Identity))
        return stop_now(p, x, "concave u, convex w");

    throw UnsupportedError("no pre-committed solver for u " + to_string(shape.u_shape) +
                           " with w " + to_string(shape.w_shape) + " (w'(0+) " +
                           to_string(shape.w_prime_zero) + ")");
}

std::optional<double> closed_form_naive_threshold(const StoppingProblem& p) {
    const auto* call = std::get_if<CallPayoff>(&p.payoff());
    const auto* quad = std::get_if<ConvexQuadratic>(&p.distortion());
    if (!call || !quad)
        return std::nullopt;
    if (p.beta() == 1.0)
        return (quad->eta + 1.0) * call->strike / quad->eta;
    if (quad->eta == 0.5 && p.beta() > 1.0)
        return bar_x_threshold(p.beta(), call->strike);
    return std::nullopt;
}

StoppingLaw naive_law(const StoppingProblem& p, const NaiveOptions& opts) {
    const BetaRegime regime = classify_beta(p);
    if (regime.regime == Regime::NegativeBetaNeverStop)
        return StoppingLaw::never_stop();
    if (regime.regime == Regime::ZeroBetaFixedThreshold) {
        return std::isfinite(regime.x_star) ? StoppingLaw(IntervalKernel::ray(regime.x_star))
                                            : StoppingLaw::never_stop();
    }
    if (opts.use_closed_form) {
        if (auto t = closed_form_naive_threshold(p))
            return StoppingLaw(IntervalKernel::ray(*t));
    }
    if (opts.grid_points < 2 || !(opts.x_lo > 0.0) || !(opts.x_hi > opts.x_lo))
        throw ConfigError("naive_law: bad grid options");

    const double lo = opts.x_lo * p.scale();
    const double hi = opts.x_hi * p.scale();
    auto stops = [&](double x) {
        return solve_precommitted(p, x).kind == PrecommitKind::StopNow;
    };
    std::vector<double> xs(opts.grid_points);
    std::vector<bool> flags(opts.grid_points);
    for (int i = 0; i < opts.grid_points; ++i) {
        xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (opts.grid_points - 1));
        flags[i] = stops(xs[i]);
    }
    const auto first_stop = std::find(flags.begin(), flags.end(), true);
    if (first_stop == flags.end())
        return StoppingLaw::never_stop();
    if (std::find(first_stop, flags.end(), false) != flags.end())
        throw UnsupportedError("naive law is not of threshold type on the grid");
    const auto j = static_cast<std::size_t>(first_stop - flags.begin());
    if (j == 0)
        return StoppingLaw::all_stop();
    auto [cont, stop] =
        bisect_transition(stops, xs[j - 1], xs[j], 0.0, opts.threshold_tol * p.scale());
    (void)cont;
    return StoppingLaw(IntervalKernel::ray(stop));
}

double bar_x_threshold(double beta, double K) {
    if (!(beta >= 1.0))
        throw DomainError("bar_x_threshold requires beta >= 1");
    if (!(K > 0.0))
        throw DomainError("bar_x_threshold requires K > 0");
    return std::pow(3.0 * K / (3.0 - 2.0 / beta), beta);
}

double b_star_of_x(double beta, double K, double x) {
    if (!(beta >= 1.0))
        throw DomainError("b_star_of_x requires beta >= 1");
    if (!(K > 0.0) || !(x > 0.0))
        throw DomainError("b_star_of_x requires K > 0 and x > 0");
    const double s = 1.0 / beta;
    auto h = [&](double b) {
        return (s - 1.0) * std::pow(b, s + 1.0) + (s - 2.0) * x * std::pow(b, s) + K * b +
               2.0 * x * K;
    };
    double hi = std::max({x, std::pow(K, beta), 1.0});
    while (h(hi) >= 0.0) {
        hi *= 2.0;
        if (!std::isfinite(hi) || !std::isfinite(h(hi)))
            return kInf;
    }
    return bisect_root(h, 0.0, hi, 1e-15);
}

} // namespace dstop
