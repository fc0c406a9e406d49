#include "rcp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rcp/analysis.hpp"
#include "rcp/engine.hpp"
#include "rcp/harris.hpp"
#include "rcp/renewal.hpp"

namespace rcp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

const std::map<std::string, std::set<std::string>>& command_keys() {
    static const std::set<std::string> common{"law", "seed", "replicas", "out"};
    static const std::map<std::string, std::set<std::string>> keys = [] {
        std::map<std::string, std::set<std::string>> m;
        auto add = [&](const std::string& cmd, std::set<std::string> extra) {
            extra.insert(common.begin(), common.end());
            m[cmd] = std::move(extra);
        };
        add("simulate", {"lambda", "L", "T", "one_sided", "initial", "condition_c",
                         "per_replica", "snapshots"});
        add("survival-curve", {"lambda", "L", "T_list", "one_sided"});
        add("lambda-scan", {"lambdas", "L", "T", "one_sided"});
        add("lambda-upper",
            {"theta", "lambda_lo", "lambda_hi", "tol", "L", "T", "one_sided"});
        add("gap-prob", {"t_list", "K"});
        add("count-tail", {"t_list", "eps3"});
        add("quiet-interval", {"i_lo", "i_hi", "eps3"});
        add("coupling", {"v0", "t_list", "n_list"});
        add("far-gap", {"s_list", "exponent"});
        add("levels", {"lambda", "t0", "gamma", "i_max", "window_sites", "use_log2"});
        add("conditions",
            {"t_grid", "r_grid", "M1", "eps1", "t0", "M2", "eps2", "r2", "eps3", "M3"});
        return m;
    }();
    return keys;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': malformed number '" + value + "'");
    }
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, delim)) parts.push_back(trim(part));
    return parts;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

InterarrivalLaw parse_law(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ConfigError("law '" + text + "': expected name(arg=value, ...)");
    const std::string name = trim(text.substr(0, open));
    std::map<std::string, std::string> args;
    const std::string body = text.substr(open + 1, close - open - 1);
    if (!trim(body).empty()) {
        for (const auto& part : split(body, ',')) {
            const auto eq = part.find('=');
            if (eq == std::string::npos)
                throw ConfigError("law '" + text + "': argument '" + part +
                                  "' is not key=value");
            args[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
    }
    auto need = [&](const std::string& k) {
        auto it = args.find(k);
        if (it == args.end())
            throw ConfigError("law '" + name + "': missing argument '" + k + "'");
        return it->second;
    };
    try {
        if (name == "exponential")
            return InterarrivalLaw::exponential(parse_double("rate", need("rate")));
        if (name == "pareto")
            return InterarrivalLaw::pareto(parse_double("alpha", need("alpha")),
                                           parse_double("scale", need("scale")));
        if (name == "oscillating") {
            std::vector<double> breaks;
            for (const auto& b : split(need("breaks"), ':'))
                breaks.push_back(parse_double("breaks", b));
            return InterarrivalLaw::oscillating(parse_double("alpha", need("alpha")),
                                                parse_double("beta", need("beta")),
                                                std::move(breaks));
        }
        if (name == "empirical") {
            std::vector<double> pts;
            for (const auto& p : split(need("points"), ':'))
                pts.push_back(parse_double("points", p));
            return InterarrivalLaw::empirical(std::move(pts));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("law '" + name + "': " + e.what());
    }
    throw ConfigError("law '" + text + "': unknown law name '" + name + "'");
}

const std::vector<std::string>& ExperimentSpec::commands() {
    static const std::vector<std::string> list = [] {
        std::vector<std::string> v;
        for (const auto& [cmd, keys] : command_keys()) v.push_back(cmd);
        return v;
    }();
    return list;
}

ExperimentSpec ExperimentSpec::parse(const std::string& command, const std::string& text,
                                     const std::vector<std::string>& overrides) {
    const auto& keys = command_keys();
    const auto cmd_it = keys.find(command);
    if (cmd_it == keys.end()) throw ConfigError("unknown command '" + command + "'");

    ExperimentSpec spec;
    spec.command_ = command;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!cmd_it->second.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                              "' for command '" + command + "'");
        spec.values_[key] = value;
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        const std::string key = trim(ov.substr(0, eq));
        if (!cmd_it->second.count(key))
            throw ConfigError("override: unknown key '" + key + "' for command '" +
                              command + "'");
        spec.values_[key] = trim(ov.substr(eq + 1));
    }
    return spec;
}

ExperimentSpec ExperimentSpec::from_output_header(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::string command;
    std::vector<std::string> pairs;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) != 0) break;
        const std::string body = trim(line.substr(2));
        const auto eq = body.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key == "command")
            command = value;
        else
            pairs.push_back(key + "=" + value);
    }
    if (command.empty()) throw ConfigError("output header: no '# command = ...' line");
    return parse(command, "", pairs);
}

bool ExperimentSpec::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ExperimentSpec::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string ExperimentSpec::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        resolve(key, fallback);
        return fallback;
    }
    return it->second;
}

double ExperimentSpec::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}
double ExperimentSpec::get_double(const std::string& key, double fallback) const {
    if (!has(key)) {
        resolve(key, format_double(fallback));
        return fallback;
    }
    return get_double(key);
}
std::int64_t ExperimentSpec::get_int(const std::string& key) const {
    const double d = get_double(key);
    const auto i = static_cast<std::int64_t>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("key '" + key + "': expected an integer");
    return i;
}
std::int64_t ExperimentSpec::get_int(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) {
        resolve(key, std::to_string(fallback));
        return fallback;
    }
    return get_int(key);
}
bool ExperimentSpec::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
        resolve(key, fallback ? "1" : "0");
        return fallback;
    }
    const std::string v = get_string(key);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("key '" + key + "': expected 0/1/true/false, got '" + v + "'");
}
std::vector<double> ExperimentSpec::get_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(get_string(key), ':'))
        out.push_back(parse_double(key, part));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}
std::vector<double> ExperimentSpec::get_list(const std::string& key,
                                             const std::vector<double>& fallback) const {
    if (!has(key)) {
        std::string s;
        for (std::size_t i = 0; i < fallback.size(); ++i)
            s += (i ? ":" : "") + format_double(fallback[i]);
        resolve(key, s);
        return fallback;
    }
    return get_list(key);
}

InterarrivalLaw ExperimentSpec::get_law() const { return parse_law(get_string("law")); }

std::uint64_t ExperimentSpec::seed() const {
    return static_cast<std::uint64_t>(get_int("seed", 0));
}
std::size_t ExperimentSpec::replicas(std::size_t fallback) const {
    const auto r = get_int("replicas", static_cast<std::int64_t>(fallback));
    if (r < 1) throw ConfigError("key 'replicas': must be >= 1");
    return static_cast<std::size_t>(r);
}
std::string ExperimentSpec::out_path() const {
    return get_string("out", command_ + ".csv");
}

void ExperimentSpec::resolve(const std::string& key, const std::string& value) const {
    defaults_used_[key] = value;
}

std::map<std::string, std::string> ExperimentSpec::resolved() const {
    std::map<std::string, std::string> all = defaults_used_;
    for (const auto& [k, v] : values_) all[k] = v;
    return all;
}

namespace {

std::string header(const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "# command = " << spec.command() << "\n";
    for (const auto& [k, v] : spec.resolved()) os << "# " << k << " = " << v << "\n";
    return os.str();
}

void grid_row(std::ostringstream& os, double param, const stats::BinomialEstimate& est,
              std::uint64_t seed) {
    os << format_double(param) << "," << format_double(est.p_hat) << ","
       << format_double(est.ci_low) << "," << format_double(est.ci_high) << ","
       << est.trials << "," << seed << "\n";
}

int write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: cannot open output file '%s'\n", path.c_str());
        return 4;
    }
    out << content;
    if (!out) {
        std::fprintf(stderr, "error: write failed for '%s'\n", path.c_str());
        return 4;
    }
    return 0;
}

int cmd_simulate(const ExperimentSpec& spec, std::ostringstream& os) {
    SimConfig config{spec.get_law()};
    config.lambda = spec.get_double("lambda", 1.0);
    config.half_width = spec.get_int("L", 100);
    config.horizon = spec.get_double("T", 100.0);
    config.one_sided = spec.get_bool("one_sided", false);
    config.replicas = spec.replicas(1000);
    config.seed = spec.seed();
    config.initial.clear();
    for (double x : spec.get_list("initial", {0.0}))
        config.initial.insert(static_cast<Site>(x));
    if (spec.has("snapshots"))
        config.snapshot_times = spec.get_list("snapshots");
    const double c = spec.get_double("condition_c", 0.0);
    const bool per_replica = spec.get_bool("per_replica", false);

    const BatchSummary batch = c > 0.0 ? conditioned_origin_batch(config, c, per_replica)
                                       : run_batch(config, per_replica);
    os << "lambda,law,L,T,replicas,seed,survival_frac,ci_low,ci_high,"
          "mean_tau_finite,n_finite,boundary_frac\n";
    os << format_double(config.lambda) << ",\"" << config.law.describe() << "\","
       << config.half_width << "," << format_double(config.horizon) << ","
       << config.replicas << "," << config.seed << ","
       << format_double(batch.survival.p_hat) << ","
       << format_double(batch.survival.ci_low) << ","
       << format_double(batch.survival.ci_high) << ","
       << format_double(batch.mean_tau_finite) << "," << batch.n_finite << ","
       << format_double(batch.boundary_frac) << "\n";
    if (per_replica) {
        os << "# section = replicas\n";
        os << "replica_id,survived,tau,extent,boundary_hit\n";
        for (std::size_t r = 0; r < batch.outcomes.size(); ++r) {
            const auto& o = batch.outcomes[r];
            os << r << "," << (o.survived ? 1 : 0) << ","
               << format_double(o.survived ? -1.0 : o.tau) << "," << o.max_extent << ","
               << (o.boundary_hit ? 1 : 0) << "\n";
        }
    }
    return 0;
}

int cmd_survival_curve(const ExperimentSpec& spec, std::ostringstream& os) {
    SimConfig config{spec.get_law()};
    config.lambda = spec.get_double("lambda", 1.0);
    config.half_width = spec.get_int("L", 100);
    config.one_sided = spec.get_bool("one_sided", false);
    config.replicas = spec.replicas(1000);
    config.seed = spec.seed();
    const auto curve = survival_curve(config, spec.get_list("T_list"));
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (const auto& row : curve.rows) grid_row(os, row.horizon, row.est, config.seed);
    os << "# pathwise_violations = " << curve.pathwise_violations << "\n";
    return 0;
}

int cmd_lambda_scan(const ExperimentSpec& spec, std::ostringstream& os) {
    SimConfig config{spec.get_law()};
    config.half_width = spec.get_int("L", 100);
    config.horizon = spec.get_double("T", 100.0);
    config.one_sided = spec.get_bool("one_sided", false);
    config.replicas = spec.replicas(1000);
    config.seed = spec.seed();
    const auto scan = lambda_scan(config, spec.get_list("lambdas"));
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (const auto& row : scan.rows) grid_row(os, row.lambda, row.est, config.seed);
    os << "# pathwise_violations = " << scan.pathwise_violations << "\n";
    return 0;
}

int cmd_lambda_upper(const ExperimentSpec& spec, std::ostringstream& os) {
    SimConfig config{spec.get_law()};
    config.half_width = spec.get_int("L", 100);
    config.horizon = spec.get_double("T", 100.0);
    config.one_sided = spec.get_bool("one_sided", false);
    config.replicas = spec.replicas(1000);
    config.seed = spec.seed();
    const auto result = estimate_lambda_c_upper(
        config, spec.get_double("theta"), spec.get_double("lambda_lo"),
        spec.get_double("lambda_hi"), spec.get_double("tol", 0.01));
    os << "lambda_hat,theta,T,L,replicas,steps\n";
    os << format_double(result.lambda_hat) << "," << format_double(result.theta) << ","
       << format_double(result.horizon) << "," << result.half_width << ","
       << result.replicas << "," << result.bisection_steps << "\n";
    return 0;
}

int cmd_gap_prob(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    const double K = spec.get_double("K", 2.0);
    const auto replicas = spec.replicas(10000);
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (double t : spec.get_list("t_list")) {
        const auto est = estimate_gap_probability(law, t, K, replicas, spec.seed());
        grid_row(os, t, est.est, spec.seed());
    }
    return 0;
}

int cmd_count_tail(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    const double eps3 = spec.get_double("eps3", 0.5);
    const auto replicas = spec.replicas(10000);
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (double t : spec.get_list("t_list")) {
        const auto est = estimate_count_tail(law, t, eps3, replicas, spec.seed());
        grid_row(os, t, est.est, spec.seed());
        os << "# cutoff(" << format_double(t) << ") = " << format_double(est.cutoff)
           << "\n";
    }
    return 0;
}

int cmd_quiet_interval(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    const auto result = find_quiet_subinterval(
        law, spec.get_double("i_lo"), spec.get_double("i_hi"),
        spec.get_double("eps3", 0.5), spec.replicas(10000), spec.seed());
    os << "# j_lo = " << format_double(result.j_lo) << "\n";
    os << "# j_hi = " << format_double(result.j_hi) << "\n";
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    grid_row(os, 0.0, result.scan, spec.seed());   // param 0: shared-scan estimate
    grid_row(os, 1.0, result.fresh, spec.seed());  // param 1: fresh validation
    return 0;
}

int cmd_coupling(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    std::vector<int> n_grid;
    for (double n : spec.get_list("n_list", {4.0, 8.0, 12.0}))
        n_grid.push_back(static_cast<int>(n));
    const auto table =
        estimate_coupling_tails(law, spec.get_double("v0", 10.0), spec.get_list("t_list"),
                                n_grid, spec.replicas(10000), spec.seed());
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (const auto& row : table.rows) grid_row(os, row.t, row.est, spec.seed());
    os << "# empirical_K = " << format_double(table.empirical_K) << "\n";
    os << "# truncated = " << table.truncated << "\n";
    os << "# section = partial_sums\n";
    os << "n,bound,prob_exceed\n";
    for (const auto& row : table.sums)
        os << row.n << "," << format_double(row.bound) << ","
           << format_double(row.prob_exceed) << "\n";
    // walks censored at max(t_list)+1 steps are the event the largest-t row
    // estimates, not an error; the count is already echoed above
    return 0;
}

int cmd_far_gap(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    const auto table =
        estimate_far_gap(law, spec.get_list("s_list"), spec.get_double("exponent", 0.1),
                         spec.replicas(10000), spec.seed());
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (const auto& row : table.rows) grid_row(os, row.s, row.est, spec.seed());
    os << "# fitted_decay = " << format_double(table.fitted_decay) << "\n";
    return 0;
}

int cmd_levels(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    const auto table = estimate_bad_event_rates(
        law, spec.get_double("lambda", 0.5), spec.get_double("t0", 1000.0),
        spec.get_double("gamma", 0.1), static_cast<std::size_t>(spec.get_int("i_max", 8)),
        spec.replicas(1000), spec.seed(),
        static_cast<Site>(spec.get_int("window_sites", 4000)),
        spec.get_bool("use_log2", false));
    os << "param,estimate,ci_low,ci_high,replicas,seed\n";
    for (const auto& row : table.rows)
        grid_row(os, static_cast<double>(row.i), row.est, spec.seed());
    os << "# sum_rates = " << format_double(table.sum_rates) << "\n";
    os << "# exhausted = " << table.exhausted << "\n";
    return 0;
}

int cmd_conditions(const ExperimentSpec& spec, std::ostringstream& os) {
    const auto law = spec.get_law();
    ConditionParams params;
    params.M1 = spec.get_double("M1", 4.0);
    params.eps1 = spec.get_double("eps1", 0.1);
    params.t0 = spec.get_double("t0", 10.0);
    params.M2 = spec.get_double("M2", 4.0);
    params.eps2 = spec.get_double("eps2", 0.1);
    params.r2 = spec.get_double("r2", 1.0);
    params.eps3 = spec.get_double("eps3", 0.5);
    params.M3 = spec.get_double("M3", 10.0);
    const auto reports = check_conditions(
        law, params, spec.get_list("t_grid", {10.0, 100.0, 1000.0, 10000.0}),
        spec.get_list("r_grid", {1.0, 2.0, 3.0, 4.0}));
    os << "condition,point,lhs,rhs,margin,pass\n";
    for (const auto& report : reports) {
        os << report.to_csv();
        os << "# verdict_" << report.condition << " = "
           << (report.verdict ? "pass" : "fail") << "\n";
    }
    return 0;
}

}  // namespace

int run_command(const ExperimentSpec& spec) {
    std::ostringstream body;
    int code = 0;
    try {
        if (spec.command() == "simulate") code = cmd_simulate(spec, body);
        else if (spec.command() == "survival-curve") code = cmd_survival_curve(spec, body);
        else if (spec.command() == "lambda-scan") code = cmd_lambda_scan(spec, body);
        else if (spec.command() == "lambda-upper") code = cmd_lambda_upper(spec, body);
        else if (spec.command() == "gap-prob") code = cmd_gap_prob(spec, body);
        else if (spec.command() == "count-tail") code = cmd_count_tail(spec, body);
        else if (spec.command() == "quiet-interval") code = cmd_quiet_interval(spec, body);
        else if (spec.command() == "coupling") code = cmd_coupling(spec, body);
        else if (spec.command() == "far-gap") code = cmd_far_gap(spec, body);
        else if (spec.command() == "levels") code = cmd_levels(spec, body);
        else if (spec.command() == "conditions") code = cmd_conditions(spec, body);
        else throw ConfigError("unknown command '" + spec.command() + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    }
    // header is assembled after the run so every resolved default is echoed
    const int io = write_file(spec.out_path(), header(spec) + body.str());
    return io != 0 ? io : code;
}

}  // namespace rcp
