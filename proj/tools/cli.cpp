#include "cli.hpp"

#include "dstop/case_study.hpp"
#include "dstop/equilibrium.hpp"
#include "dstop/errors.hpp"
#include "dstop/evaluator.hpp"
#include "dstop/io.hpp"
#include "dstop/mc_oracle.hpp"
#include "dstop/naive.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace dstop::cli {

using nlohmann::json;

namespace {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Args {
    std::string problem;
    std::string law;
    std::string init = "naive";
    std::string domain;
    std::string json_out;
    std::string csv_out;
    std::string grid;
    std::vector<double> xs;
    int max_iter = 50;
    double tol = 1e-9;
    // simulation
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    double horizon = 50.0;
    double cutoff = 0.0;
    bool no_bridge = false;
    int threads = 0;
    // case study
    std::string action;
    double K = 1.0;
    double eta = 0.5;
    double b = 0.0;
    double b2 = 0.0;
};

std::string fmt(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw ConfigError(std::string(flag) + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.size() != n)
        throw ConfigError(std::string(flag) + ": expected " + std::to_string(n) +
                          " comma-separated numbers");
    return out;
}

Domain domain_of(const StoppingProblem& p, const Args& a) {
    if (a.domain.empty())
        return default_domain(p);
    const auto v = parse_list(a.domain, 2, "--domain");
    if (!(v[0] > 0.0 && v[1] > v[0]) || !std::isfinite(v[1]))
        throw ConfigError("--domain: need 0 < lo < hi < inf");
    return {v[0], v[1]};
}

// log-spaced grid "lo,hi,n", or the explicit --x list
std::vector<double> states_of(const Args& a) {
    if (!a.grid.empty()) {
        const auto v = parse_list(a.grid, 3, "--grid");
        const int n = static_cast<int>(v[2]);
        if (!(v[0] > 0.0 && v[1] > v[0]) || n < 2 || n != v[2])
            throw ConfigError("--grid: need 0 < lo < hi and an integer count >= 2");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i)
            xs.push_back(v[0] * std::pow(v[1] / v[0], static_cast<double>(i) / (n - 1)));
        return xs;
    }
    if (a.xs.empty())
        throw ConfigError("give --x or --grid");
    for (double x : a.xs)
        if (!(x > 0.0))
            throw ConfigError("--x values must be positive");
    return a.xs;
}

SimConfig sim_config(const Args& a) {
    SimConfig c;
    c.dt = a.dt;
    c.horizon = a.horizon;
    if (a.cutoff > 0.0)
        c.lower_cutoff = a.cutoff;
    c.n_paths = a.paths;
    c.seed = a.seed;
    c.bridge = !a.no_bridge;
    c.threads = a.threads;
    return c;
}

struct Manifest {
    std::string command;
    std::string problem;
    std::map<std::string, std::string> flags;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;

    json to_json() const {
        return {{"command", command}, {"problem", problem}, {"flags", flags}, {"seed", seed},
                {"outputs", outputs}, {"version", kVersion}};
    }
};

Manifest manifest_of(const CLI::App& sub, const Args& a) {
    Manifest m;
    m.command = sub.get_name();
    m.problem = a.problem;
    m.seed = a.seed;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->count() == 0 || opt->get_name() == "--help")
            continue;
        std::string joined;
        for (const std::string& r : opt->results())
            joined += (joined.empty() ? "" : ",") + r;
        m.flags[opt->get_name()] = joined;
    }
    if (!a.json_out.empty())
        m.outputs.push_back(a.json_out);
    if (!a.csv_out.empty())
        m.outputs.push_back(a.csv_out);
    return m;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw ConfigError("cannot write '" + path + "'");
    return f;
}

void write_json(const std::string& path, const Manifest& m, json result) {
    if (path.empty())
        return;
    auto f = open_out(path);
    f << json{{"manifest", m.to_json()}, {"result", std::move(result)}}.dump(2) << "\n";
}

// CSV with the manifest as a leading comment line.
class Csv {
public:
    Csv(const std::string& path, const Manifest& m, const std::string& header) {
        if (path.empty())
            return;
        f_ = open_out(path);
        f_ << "# manifest " << m.to_json().dump() << "\n" << header << "\n";
    }
    template <class... T>
    void row(const T&... cells) {
        if (!f_.is_open())
            return;
        std::string sep;
        ((f_ << sep << cell(cells), sep = ","), ...);
        f_ << "\n";
    }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ofstream f_;
};

StoppingProblem problem_of(const Args& a) {
    if (a.problem.empty())
        throw ConfigError("--problem is required");
    return load_problem(a.problem);
}

StoppingLaw law_of(const Args& a) {
    if (a.law.empty())
        throw ConfigError("--law is required");
    return StoppingLaw(parse_kernel(a.law));
}

std::string region_name(double g, double tol) { return g < -tol ? "S" : g > tol ? "C" : "I"; }

// ---- subcommands -----------------------------------------------------------

int cmd_describe(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    json r = problem_to_json(p);
    r["beta"] = p.beta();
    const BetaRegime reg = classify_beta(p);
    r["regime"] = to_string(reg.regime);
    out << "beta " << fmt(p.beta()) << "\n";
    out << "payoff " << family_name(p.payoff()) << ", distortion " << family_name(p.distortion())
        << "\n";
    out << "regime " << to_string(reg.regime) << "\n";
    if (reg.regime == Regime::ZeroBetaFixedThreshold) {
        r["x_star"] = num(reg.x_star);
        out << "x* " << fmt(reg.x_star) << "\n";
    }
    if (p.beta() > 0.0) {
        const ShapeInfo s = shape_classify(p);
        r["u_shape"] = to_string(s.u_shape);
        r["w_shape"] = to_string(s.w_shape);
        r["w_slope_at_0"] = to_string(s.w_prime_zero);
        r["volatility"] = p.volatility();
        out << "u " << to_string(s.u_shape) << ", w " << to_string(s.w_shape) << ", w'(0+) "
            << to_string(s.w_prime_zero) << "\n";
        out << "volatility " << fmt(p.volatility()) << "\n";
    }
    write_json(a.json_out, m, r);
    return kOk;
}

int cmd_naive(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const StoppingLaw law = naive_law(p);
    out << "kernel " << to_string(law.kernel()) << "\n";
    json r{{"kernel", to_string(law.kernel())}, {"kernel_pieces", kernel_to_json(law.kernel())}};
    if (!a.xs.empty() && p.beta() > 0.0) {
        json pts = json::array();
        for (double x : states_of(a)) {
            const PrecommitResult pr = solve_precommitted(p, x);
            out << "x " << fmt(x) << ": " << to_string(pr.kind);
            if (pr.kind == PrecommitKind::Threshold)
                out << " b* " << fmt(pr.b_star);
            out << " value " << fmt(pr.value) << (pr.value_exact ? "" : " (bound)") << "\n";
            pts.push_back({{"x", x}, {"kind", to_string(pr.kind)}, {"b_star", num(pr.b_star)},
                           {"value", num(pr.value)}, {"value_exact", pr.value_exact},
                           {"rule", pr.rule}});
        }
        r["precommitted"] = pts;
    }
    write_json(a.json_out, m, r);
    return kOk;
}

StoppingLaw init_law(const StoppingProblem& p, const std::string& init) {
    if (init == "naive")
        return naive_law(p);
    if (init == "never")
        return StoppingLaw::never_stop();
    if (init == "all")
        return StoppingLaw::all_stop();
    return StoppingLaw(parse_kernel(init));
}

int cmd_iterate(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const Domain d = domain_of(p, a);
    const IterationResult res = iterate_to_equilibrium(p, init_law(p, a.init), d, a.max_iter, a.tol);
    std::string chain;
    json its = json::array();
    for (const IntervalKernel& k : res.trace.iterates) {
        chain += (chain.empty() ? "" : " -> ") + to_string(k);
        its.push_back(to_string(k));
    }
    out << chain << "\n";
    out << (res.trace.converged ? "converged" : "not converged") << " after "
        << res.trace.steps << " step" << (res.trace.steps == 1 ? "" : "s") << "\n";
    out << "kernel " << to_string(res.law.kernel()) << "\n";
    write_json(a.json_out, m,
               {{"iterates", its},
                {"converged", res.trace.converged},
                {"steps", res.trace.steps},
                {"kernel", to_string(res.law.kernel())},
                {"kernel_pieces", kernel_to_json(res.law.kernel())}});
    if (!res.trace.converged)
        throw NonConvergence("no fixed point within " + std::to_string(a.max_iter) +
                             " iterations");
    return kOk;
}

int cmd_check(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const StoppingLaw law = law_of(a);
    const Domain d = domain_of(p, a);
    const RegionDecomposition r = classify_regions(p, law, d);
    const bool eq = is_equilibrium(p, law, d, a.tol);
    out << "law " << to_string(law.kernel()) << "\n";
    out << "S " << to_string(r.stop) << "\n";
    out << "C " << to_string(r.cont) << "\n";
    out << "I " << to_string(r.indiff) << "\n";
    out << "equilibrium " << (eq ? "true" : "false") << "\n";
    write_json(a.json_out, m,
               {{"law", to_string(law.kernel())},
                {"stop", to_string(r.stop)},
                {"continue", to_string(r.cont)},
                {"indifferent", to_string(r.indiff)},
                {"equilibrium", eq}});
    return kOk;
}

int cmd_evaluate(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const StoppingLaw law = law_of(a);
    const double tol = 1e-9 * p.u_reference();
    Csv csv(a.csv_out, m, "x,J,u,J-u,region");
    json rows = json::array();
    for (double x : states_of(a)) {
        const double J = eval_continuation(p, law, x);
        const double u = p.u(x);
        const std::string reg = region_name(J - u, tol);
        out << "x " << fmt(x) << " J " << fmt(J) << " u " << fmt(u) << " region " << reg << "\n";
        csv.row(x, J, u, J - u, reg);
        rows.push_back({{"x", x}, {"J", J}, {"u", u}, {"J-u", J - u}, {"region", reg}});
    }
    write_json(a.json_out, m, {{"law", to_string(law.kernel())}, {"rows", rows}});
    return kOk;
}

int cmd_case_study(const Args& a, const Manifest& m, std::ostream& out) {
    const CaseStudyParams c = CaseStudyParams::make(a.K, a.eta);
    json r{{"K", c.K}, {"eta", c.eta}, {"b_star", c.b_star()}, {"action", a.action}};
    if (a.action == "map") {
        const double bp = theta_threshold_map(c, a.b);
        out << "b' " << fmt(bp) << "\n";
        r["b_prime"] = bp;
    } else if (a.action == "value") {
        for (double x : states_of(a)) {
            const double v = value_of_threshold(c, x, a.b);
            out << "x " << fmt(x) << " value " << fmt(v) << "\n";
            r["values"].push_back({{"x", x}, {"value", v}});
        }
        if (!in_family(c, a.b))
            out << "warning: b exceeds b* = " << fmt(c.b_star())
                << "; 1_(0,b) is not an equilibrium\n";
    } else if (a.action == "optimal") {
        for (double x : states_of(a)) {
            const double bo = optimal_equilibrium(c, x);
            out << "x " << fmt(x) << " b " << fmt(bo) << " value "
                << fmt(value_of_threshold(c, x, bo)) << "\n";
            r["optimal"].push_back({{"x", x}, {"b", bo}});
        }
    } else if (a.action == "cost") {
        for (double x : states_of(a)) {
            const double cost = cost_of_equilibrium(c, x, a.b);
            out << "x " << fmt(x) << " cost " << fmt(cost) << "\n";
            r["costs"].push_back({{"x", x}, {"cost", cost}});
        }
    } else if (a.action == "pareto") {
        const bool dom = pareto_dominates(c, a.b, a.b2);
        out << "dominates " << (dom ? "true" : "false") << "\n";
        r["dominates"] = dom;
    } else if (a.action == "surface") {
        if (a.csv_out.empty())
            throw ConfigError("surface needs --csv");
        Csv csv(a.csv_out, m, "x,b,value,cost");
        const auto xs = states_of(a);
        const int nb = 50;
        for (double x : xs)
            for (int j = 0; j < nb; ++j) {
                const double b = c.b_star() * j / nb;
                csv.row(x, b, value_of_threshold(c, x, b), cost_of_equilibrium(c, x, b));
            }
        out << "wrote " << xs.size() * nb << " rows to " << a.csv_out << "\n";
    } else {
        throw ConfigError("--action must be one of map, value, optimal, cost, pareto, surface");
    }
    write_json(a.json_out, m, r);
    return kOk;
}

struct SimOutcome {
    double x;
    Estimate est;
    EmpiricalSample sample;
};

std::vector<SimOutcome> simulate_all(const StoppingProblem& p, const StoppingLaw& law,
                                     const Args& a, std::ostream& out) {
    const SimConfig cfg = sim_config(a);
    std::vector<SimOutcome> res;
    for (double x : states_of(a)) {
        EmpiricalSample s = simulate_stopped_values(p, x, law, cfg);
        for (const std::string& w : s.warnings)
            out << "warning: " << w << "\n";
        const Estimate e = distorted_expectation(p, s, 200, a.seed);
        res.push_back({x, e, std::move(s)});
    }
    return res;
}

int cmd_simulate(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const StoppingLaw law = law_of(a);
    Csv csv(a.csv_out, m, "x,estimate,std_error,censored_fraction");
    json rows = json::array();
    for (const SimOutcome& o : simulate_all(p, law, a, out)) {
        const double cf = o.sample.censored_fraction();
        out << "x " << fmt(o.x) << " estimate " << fmt(o.est.value) << " se "
            << fmt(o.est.std_error) << " censored " << fmt(cf) << "\n";
        csv.row(o.x, o.est.value, o.est.std_error, cf);
        rows.push_back({{"x", o.x}, {"estimate", o.est.value}, {"std_error", o.est.std_error},
                        {"censored_fraction", cf},
                        {"absorbed", o.sample.n_absorbed}});
    }
    write_json(a.json_out, m, {{"law", to_string(law.kernel())}, {"rows", rows}});
    return kOk;
}

int cmd_compare(const Args& a, const Manifest& m, std::ostream& out) {
    const StoppingProblem p = problem_of(a);
    const StoppingLaw law = law_of(a);
    Csv csv(a.csv_out, m, "x,estimate,std_error,closed_form,z_score");
    json rows = json::array();
    for (const SimOutcome& o : simulate_all(p, law, a, out)) {
        const double exact = eval_continuation(p, law, o.x);
        const double diff = o.est.value - exact;
        const double z = o.est.std_error > 0.0 ? diff / o.est.std_error
                         : std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(exact))
                             ? 0.0
                             : std::copysign(kInf, diff);
        out << "x " << fmt(o.x) << " estimate " << fmt(o.est.value) << " se "
            << fmt(o.est.std_error) << " closed_form " << fmt(exact) << " z " << fmt(z) << "\n";
        csv.row(o.x, o.est.value, o.est.std_error, exact, z);
        rows.push_back({{"x", o.x}, {"estimate", o.est.value}, {"std_error", o.est.std_error},
                        {"closed_form", exact}, {"z_score", num(z)}});
    }
    write_json(a.json_out, m, {{"law", to_string(law.kernel())}, {"rows", rows}});
    return kOk;
}

// ---- wiring ----------------------------------------------------------------

void add_problem(CLI::App* s, Args& a) {
    s->add_option("--problem", a.problem, "problem JSON file")->required();
}
void add_outputs(CLI::App* s, Args& a, bool csv) {
    s->add_option("--json", a.json_out, "write JSON result with run manifest");
    if (csv)
        s->add_option("--csv", a.csv_out, "write CSV result with run manifest");
}
void add_states(CLI::App* s, Args& a) {
    s->add_option("--x", a.xs, "state(s)")->delimiter(',');
    s->add_option("--grid", a.grid, "log grid lo,hi,n");
}
void add_sim(CLI::App* s, Args& a) {
    s->add_option("--paths", a.paths, "number of paths")->check(CLI::Range(1000ul, 100000000ul));
    s->add_option("--seed", a.seed, "random seed");
    s->add_option("--dt", a.dt, "time step");
    s->add_option("--horizon", a.horizon, "simulation horizon");
    s->add_option("--cutoff", a.cutoff, "absorption level (default 1e-4 * scale)");
    s->add_flag("--no-bridge", a.no_bridge, "disable the Brownian-bridge crossing check");
    s->add_option("--threads", a.threads, "worker threads (default DSTOP_THREADS or all cores)");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Args a;
    CLI::App app{"Equilibrium stopping under probability distortion", "dstop"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* describe = app.add_subcommand("describe", "problem summary, regime and shapes");
    add_problem(describe, a);
    add_outputs(describe, a, false);

    auto* naive = app.add_subcommand("naive", "naive stopping law");
    add_problem(naive, a);
    naive->add_option("--x", a.xs, "also report pre-committed optima at these states")
        ->delimiter(',');
    add_outputs(naive, a, false);

    auto* iterate = app.add_subcommand("iterate", "fixed-point iteration of Theta");
    add_problem(iterate, a);
    iterate->add_option("--init", a.init, "naive | never | all | kernel text");
    iterate->add_option("--max-iter", a.max_iter, "maximum Theta applications")
        ->check(CLI::PositiveNumber);
    iterate->add_option("--tol", a.tol, "kernel endpoint tolerance")->check(CLI::PositiveNumber);
    iterate->add_option("--domain", a.domain, "computational domain lo,hi");
    add_outputs(iterate, a, false);

    auto* check = app.add_subcommand("check-equilibrium", "regions S, C, I and fixed-point test");
    add_problem(check, a);
    check->add_option("--law", a.law, "kernel text")->required();
    check->add_option("--tol", a.tol, "kernel endpoint tolerance")->check(CLI::PositiveNumber);
    check->add_option("--domain", a.domain, "computational domain lo,hi");
    add_outputs(check, a, false);

    auto* evaluate = app.add_subcommand("evaluate", "J(x; L*tau) against u(x)");
    add_problem(evaluate, a);
    evaluate->add_option("--law", a.law, "kernel text")->required();
    add_states(evaluate, a);
    add_outputs(evaluate, a, true);

    auto* cs = app.add_subcommand("case-study", "quadratic distortion with a call payoff");
    cs->add_option("--action", a.action, "map | value | optimal | cost | pareto | surface")
        ->required();
    cs->add_option("--K", a.K, "strike");
    cs->add_option("--eta", a.eta, "distortion parameter in (0,1)");
    cs->add_option("--b", a.b, "threshold");
    cs->add_option("--b2", a.b2, "second threshold (pareto)");
    add_states(cs, a);
    add_outputs(cs, a, true);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo distorted value of a law");
    add_problem(simulate, a);
    simulate->add_option("--law", a.law, "kernel text")->required();
    add_states(simulate, a);
    add_sim(simulate, a);
    add_outputs(simulate, a, true);

    auto* compare = app.add_subcommand("compare", "Monte Carlo against the closed form");
    add_problem(compare, a);
    compare->add_option("--law", a.law, "kernel text")->required();
    add_states(compare, a);
    add_sim(compare, a);
    add_outputs(compare, a, true);

    std::vector<const char*> argv{"dstop"};
    for (const std::string& s : args)
        argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::Success&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const Manifest m = manifest_of(*sub, a);
    try {
        if (sub == describe)
            return cmd_describe(a, m, out);
        if (sub == naive)
            return cmd_naive(a, m, out);
        if (sub == iterate)
            return cmd_iterate(a, m, out);
        if (sub == check)
            return cmd_check(a, m, out);
        if (sub == evaluate)
            return cmd_evaluate(a, m, out);
        if (sub == cs)
            return cmd_case_study(a, m, out);
        if (sub == simulate)
            return cmd_simulate(a, m, out);
        return cmd_compare(a, m, out);
    } catch (const NonConvergence& e) {
        err << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    }
}

} // namespace dstop::cli
