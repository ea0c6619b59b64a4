#include "dstop/mc_oracle.hpp"

#include "dstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

namespace dstop {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

enum class Outcome { Stopped, Absorbed, Censored };

struct PathResult {
    double state;
    Outcome outcome;
};

struct PathSetup {
    double vol;
    double dt;
    double horizon;
    bool bridge;
    bool adaptive;
};

// One path inside the gap (a, b) of the kernel; ya is log a, or log cutoff
// when the gap reaches down to the origin.
PathResult run_path(const PathSetup& s, double y0, double ya, double yb, double a, double b,
                    bool absorb_below, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double v2 = s.vol * s.vol;
    auto lower = [&]() {
        return absorb_below ? PathResult{0.0, Outcome::Absorbed} : PathResult{a, Outcome::Stopped};
    };
    double y = y0;
    double t = 0.0;
    while (true) {
        const double left = s.horizon - t;
        if (left <= 0.0)
            return {std::exp(y), Outcome::Censored};
        double h = s.dt;
        if (s.adaptive) {
            const double dist = std::min(y - ya, yb - y);
            const double far = dist / (4.0 * s.vol);
            h = std::max(h, far * far);
        }
        h = std::min(h, left);
        const double y1 = y - 0.5 * v2 * h + s.vol * std::sqrt(h) * normal(rng);
        if (y1 >= yb)
            return {b, Outcome::Stopped};
        if (y1 <= ya)
            return lower();
        if (s.bridge) {
            // crossing probability of the Brownian bridge between y and y1
            if (std::isfinite(yb) && unif(rng) < std::exp(-2.0 * (yb - y) * (yb - y1) / (v2 * h)))
                return {b, Outcome::Stopped};
            if (unif(rng) < std::exp(-2.0 * (y - ya) * (y1 - ya) / (v2 * h)))
                return lower();
        }
        y = y1;
        t += h;
    }
}

void check_config(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.horizon > cfg.dt))
        throw ConfigError("simulation needs 0 < dt < horizon");
    if (cfg.n_paths < 1)
        throw ConfigError("simulation needs at least one path");
    if (cfg.lower_cutoff && !(*cfg.lower_cutoff > 0.0))
        throw ConfigError("lower_cutoff must be positive");
}

} // namespace

int effective_threads(const SimConfig& cfg) {
    if (cfg.threads > 0)
        return cfg.threads;
    if (const char* env = std::getenv("DSTOP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double effective_cutoff(const StoppingProblem& p, const SimConfig& cfg) {
    return cfg.lower_cutoff.value_or(1e-4 * p.scale());
}

StoppedStates simulate_stopped_states(double volatility, double x0, const IntervalKernel& kernel,
                                      const SimConfig& cfg) {
    check_config(cfg);
    if (!(volatility > 0.0) || !std::isfinite(volatility))
        throw DomainError("volatility must be positive");
    if (!(x0 > 0.0) || !std::isfinite(x0))
        throw DomainError("x0 must be positive");

    StoppedStates out;
    out.states.assign(cfg.n_paths, x0);
    const Neighbors nb = neighbors(kernel, x0);
    if (nb.in_closure)
        return out;

    const double cutoff = cfg.lower_cutoff.value_or(1e-4);
    if (!kernel.empty() && kernel.pieces().front().lo > 0.0 && cutoff >= kernel.pieces().front().lo)
        throw ConfigError("lower_cutoff must lie below every kernel endpoint");
    const bool absorb_below = nb.a == 0.0;
    if (absorb_below && cutoff >= x0)
        throw ConfigError("lower_cutoff must lie below x0");

    const PathSetup setup{volatility, cfg.dt, cfg.horizon, cfg.bridge, cfg.adaptive};
    const double y0 = std::log(x0);
    const double ya = std::log(absorb_below ? cutoff : nb.a);
    const double yb = std::isfinite(nb.b) ? std::log(nb.b) : kInf;

    std::vector<Outcome> outcomes(cfg.n_paths);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::mt19937_64 rng(path_seed(cfg.seed, i));
            const PathResult r = run_path(setup, y0, ya, yb, nb.a, nb.b, absorb_below, rng);
            out.states[i] = r.state;
            outcomes[i] = r.outcome;
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(effective_threads(cfg)), cfg.n_paths);
    if (workers <= 1) {
        work(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (cfg.n_paths + workers - 1) / workers;
        for (std::size_t k = 0; k < workers; ++k) {
            const std::size_t begin = k * chunk;
            const std::size_t end = std::min(cfg.n_paths, begin + chunk);
            if (begin < end)
                pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }
    for (Outcome o : outcomes) {
        out.n_censored += o == Outcome::Censored;
        out.n_absorbed += o == Outcome::Absorbed;
    }
    return out;
}

double EmpiricalSample::censored_fraction() const {
    return values.empty() ? 0.0 : static_cast<double>(n_censored) / values.size();
}

EmpiricalSample make_sample(std::vector<double> values, std::size_t n_censored,
                            std::size_t n_absorbed) {
    EmpiricalSample s;
    std::sort(values.begin(), values.end());
    s.values = std::move(values);
    s.n_censored = n_censored;
    s.n_absorbed = n_absorbed;
    if (s.censored_fraction() > 0.005) {
        std::ostringstream msg;
        msg << "censored fraction " << s.censored_fraction()
            << " exceeds 0.5%; estimates are biased by the finite horizon";
        s.warnings.push_back(msg.str());
    }
    return s;
}

EmpiricalSample simulate_stopped_values(const StoppingProblem& p, double x0,
                                        const StoppingLaw& law, const SimConfig& cfg) {
    if (!(p.beta() > 0.0))
        throw UnsupportedError("simulation requires beta > 0");
    SimConfig c = cfg;
    c.lower_cutoff = effective_cutoff(p, cfg);
    StoppedStates st = simulate_stopped_states(p.volatility(), x0, law.kernel(), c);
    for (double& x : st.states)
        x = x > 0.0 ? p.u(x) : 0.0;
    return make_sample(std::move(st.states), st.n_censored, st.n_absorbed);
}

Estimate distorted_expectation(const std::function<double(double)>& w,
                               const EmpiricalSample& sample, int resamples,
                               std::uint64_t boot_seed) {
    const std::size_t n = sample.values.size();
    if (n == 0)
        throw DomainError("distorted_expectation needs a nonempty sample");
    const auto& v = sample.values;
    if (!std::is_sorted(v.begin(), v.end()))
        throw DomainError("distorted_expectation needs a sorted sample");

    std::vector<double> wt(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        wt[k] = k == 0 ? 0.0 : k == n ? 1.0 : w(static_cast<double>(k) / n);

    // Summation by parts of sum_j v_j [w((n-j)/n) - w((n-j-1)/n)]: the
    // increment v_j - v_{j-1} is paid with weight w(P[value >= v_j]).
    double est = v[0];
    double prev = v[0];
    for (std::size_t j = 1; j < n; ++j) {
        est += (v[j] - prev) * wt[n - j];
        prev = v[j];
    }

    if (resamples < 2)
        return {est, 0.0};
    std::mt19937_64 rng(splitmix64(boot_seed));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> counts(n);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < resamples; ++r) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t k = 0; k < n; ++k)
            ++counts[pick(rng)];
        // v[i] repeated counts[i] times starts at position s
        double e = 0.0;
        double last = 0.0;
        std::size_t s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] == 0)
                continue;
            e += s == 0 ? v[i] : (v[i] - last) * wt[n - s];
            last = v[i];
            s += counts[i];
        }
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / resamples;
    const double var = std::max(0.0, (sum2 - resamples * mean * mean) / (resamples - 1));
    return {est, std::sqrt(var)};
}

Estimate distorted_expectation(const StoppingProblem& p, const EmpiricalSample& sample,
                               int resamples, std::uint64_t boot_seed) {
    return distorted_expectation([&](double q) { return p.w(q); }, sample, resamples, boot_seed);
}

Estimate estimate_hit_prob(double x0, double b, const SimConfig& cfg) {
    if (!(x0 > 0.0 && x0 < b) || !std::isfinite(b))
        throw DomainError("estimate_hit_prob needs 0 < x0 < b < inf");
    const StoppedStates st = simulate_stopped_states(1.0, x0, IntervalKernel::ray(b), cfg);
    const auto hits = std::count(st.states.begin(), st.states.end(), b);
    const double n = static_cast<double>(st.states.size());
    const double phat = hits / n;
    return {phat, std::sqrt(phat * (1.0 - phat) / n)};
}

} // namespace dstop
