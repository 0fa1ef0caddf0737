// gwmaxdeg: exact and Monte Carlo distributions of the maximal out-degree of
// Galton-Watson trees, with asymptotic-law verification reports.
//
// Exit codes: 0 ok, 2 invalid spec/arguments, 3 numeric failure,
// 4 ratio-report bound violation, 5 simulation z-score failure.

#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gwmaxdeg/asymptotics.hpp"
#include "gwmaxdeg/checks.hpp"
#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/exact.hpp"
#include "gwmaxdeg/global.hpp"
#include "gwmaxdeg/io.hpp"
#include "gwmaxdeg/montecarlo.hpp"

namespace {

using namespace gwmaxdeg;

constexpr int kExitOk = 0;
constexpr int kExitSpec = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBound = 4;
constexpr int kExitZ = 5;

struct CommonOpts {
    std::string family;
    std::string pmf_file;
    double tail_tolerance = 1e-14;
    std::string format = "csv";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--family", c.family, "family string: geometric:a | poisson:l | power:alpha | explicit:p0,p1,...");
    cmd->add_option("--pmf-file", c.pmf_file, "JSON file {\"p\": [p0, p1, ...], \"tail_tolerance\": x}");
    cmd->add_option("--tail-tolerance", c.tail_tolerance, "series truncation mass (default 1e-14)");
    cmd->add_option("--format", c.format, "csv or json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out, "output path (default stdout)");
}

OffspringSpec resolve_spec(const CommonOpts& c) {
    if (c.family.empty() == c.pmf_file.empty())
        throw SpecError("exactly one of --family / --pmf-file is required");
    if (!c.family.empty()) return OffspringSpec::parse(c.family, c.tail_tolerance);

    std::ifstream f(c.pmf_file);
    if (!f) throw SpecError("cannot open pmf file: " + c.pmf_file);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw SpecError(std::string("invalid pmf file JSON: ") + e.what());
    }
    if (!j.contains("p") || !j["p"].is_array()) throw SpecError("pmf file must contain an array \"p\"");
    std::vector<double> p;
    for (const auto& v : j["p"]) {
        if (!v.is_number()) throw SpecError("pmf entries must be numbers");
        p.push_back(v.get<double>());
    }
    double tol = c.tail_tolerance;
    if (j.contains("tail_tolerance")) tol = j["tail_tolerance"].get<double>();
    return OffspringSpec::explicit_pmf(std::move(p), tol);
}

io::RunManifest make_manifest(const std::string& command, const OffspringSpec& spec,
                              const CommonOpts& c) {
    io::RunManifest m;
    m.command = command;
    m.dist = spec.describe();
    m.tail_tolerance = spec.tail_tolerance;
    m.output_path = c.out;
    return m;
}

void emit(const CommonOpts& c, const std::string& csv, const std::string& json_text) {
    io::write_output(c.out, c.format == "json" ? json_text : csv);
}

// ---------------------------------------------------------------------------

int cmd_dist(const CommonOpts& c, const std::string& target, std::int64_t horizon, std::int64_t rmax) {
    const auto spec = resolve_spec(c);
    const auto d = OffspringDistribution::build(spec);
    exact::DistTable table;
    if (target == "generation")
        table = exact::generation_table(d, horizon, rmax);
    else if (target == "local")
        table = exact::local_table(d, horizon, rmax);
    else
        throw SpecError("dist target must be 'generation' or 'local'");

    auto m = make_manifest("dist", spec, c);
    m.parameters = io::ojson{{"target", target}, {"horizon", horizon}, {"rmax", rmax}};
    m.tolerances = io::ojson{{"pmf_nonneg", -1e-12}, {"tail_consistency", 1e-12}};
    emit(c, io::dist_table_csv(table, m), io::dist_table_json(table, m));
    return kExitOk;
}

int cmd_global(const CommonOpts& c, std::int64_t rmax) {
    const auto spec = resolve_spec(c);
    const auto d = OffspringDistribution::build(spec);
    const auto law = global::compute_law(d, rmax);
    auto m = make_manifest("global", spec, c);
    m.parameters = io::ojson{{"rmax", rmax}};
    m.tolerances = io::ojson{{"fixed_point_residual", 1e-10}};
    emit(c, io::global_law_csv(law, m), io::global_law_json(law, m));
    return kExitOk;
}

int cmd_ratios(const CommonOpts& c, const std::string& regime, std::int64_t horizon, std::int64_t rmin,
               std::int64_t rmax) {
    const auto spec = resolve_spec(c);
    const auto d = OffspringDistribution::build(spec);
    asymptotics::RatioReport rep;
    if (regime == "generation")
        rep = asymptotics::generation_ratio_table(d, horizon, rmin, rmax);
    else if (regime == "local")
        rep = asymptotics::local_ratio_table(d, horizon, rmin, rmax);
    else if (regime == "subcritical")
        rep = asymptotics::subcritical_global_ratio_table(d, rmin, rmax);
    else if (regime == "critical")
        rep = asymptotics::critical_bounds_report(d, rmin, rmax);
    else if (regime == "supercritical")
        rep = asymptotics::supercritical_limits_report(d, rmin, rmax);
    else
        throw SpecError("unknown regime '" + regime + "'");

    auto m = make_manifest("ratios", spec, c);
    m.parameters = io::ojson{{"regime", regime}, {"horizon", horizon}, {"rmin", rmin}, {"rmax", rmax}};
    m.tolerances = io::ojson{{"bound_violation", 1e-12}, {"trusted_window_ulps", 64}};
    emit(c, io::ratio_report_csv(rep, m), io::ratio_report_json(rep, m));
    return rep.any_bound_violation ? kExitBound : kExitOk;
}

int cmd_simulate(const CommonOpts& c, const std::string& target, std::int64_t horizon,
                 std::int64_t trials, std::uint64_t seed, std::int64_t max_gens, std::int64_t max_pop,
                 bool compare) {
    const auto spec = resolve_spec(c);
    const auto d = OffspringDistribution::build(spec);

    montecarlo::SimConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.limits.max_generations = max_gens;
    cfg.limits.max_population = max_pop;

    auto m = make_manifest("simulate", spec, c);
    m.has_seed = true;
    m.seed = seed;
    m.parameters = io::ojson{{"target", target},   {"horizon", horizon},
                             {"trials", trials},   {"max_generations", max_gens},
                             {"max_population", max_pop}, {"compare", compare}};
    m.tolerances = io::ojson{{"z_threshold", 4.0}, {"min_expected_count", 10}};

    if (target == "width") {
        const auto rep = montecarlo::width_bound_check(d, cfg, {1, 2, 5, 10, 20, 50});
        emit(c, io::width_report_csv(rep, m), io::width_report_json(rep, m));
        return rep.any_violation ? kExitZ : kExitOk;
    }

    montecarlo::TargetSpec ts;
    if (target == "generation")
        ts = {montecarlo::Statistic::Generation, horizon};
    else if (target == "local")
        ts = {montecarlo::Statistic::Local, horizon};
    else if (target == "global")
        ts = {montecarlo::Statistic::Global, 0};
    else
        throw SpecError("simulate target must be generation, local, global or width");
    cfg.targets = {ts};

    const auto summary = montecarlo::estimate(d, cfg, compare);
    emit(c, io::sim_summary_csv(summary, m), io::sim_summary_json(summary, m));
    return compare && summary.max_abs_z >= 4.0 ? kExitZ : kExitOk;
}

int cmd_check(std::int64_t trials, std::uint64_t seed, bool skip_mc) {
    checks::SuiteOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    opt.include_montecarlo = !skip_mc;
    const auto results = checks::run_builtin_suite(opt);
    int failed = 0;
    for (const auto& r : results) {
        const char* tag = r.status == checks::Status::Pass          ? "PASS"
                          : r.status == checks::Status::Underpowered ? "UNDERPOWERED"
                                                                     : "FAIL";
        if (r.status == checks::Status::Fail) ++failed;
        std::printf("%-12s %s%s%s\n", tag, r.name.c_str(), r.detail.empty() ? "" : " -- ",
                    r.detail.c_str());
    }
    std::printf("%d failed / %zu checks\n", failed, results.size());
    return failed ? 1 : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximal out-degree of Galton-Watson trees: exact laws, asymptotics, simulation"};
    app.require_subcommand(1);

    CommonOpts c_dist, c_global, c_ratios, c_sim;
    std::string dist_target = "generation", ratios_regime, sim_target = "global";
    std::int64_t dist_horizon = 0, dist_rmax = -1;
    std::int64_t global_rmax = -1;
    std::int64_t ratios_horizon = 0, ratios_rmin = 1, ratios_rmax = -1;
    std::int64_t sim_horizon = 0, sim_trials = 100000, sim_maxgens = 200, sim_maxpop = 1000000;
    std::uint64_t sim_seed = 0, check_seed = 1;
    std::int64_t check_trials = 20000;
    bool sim_compare = false, check_skip_mc = false;

    auto* dist = app.add_subcommand("dist", "exact distribution table of M_n or M_[0,n]");
    add_common(dist, c_dist);
    dist->add_option("--target", dist_target, "generation | local")->required();
    dist->add_option("--horizon", dist_horizon, "generation index n (default 0)");
    dist->add_option("--rmax", dist_rmax, "largest r in the table")->required();

    auto* glob = app.add_subcommand("global", "fixed-point law of the global maximum M");
    add_common(glob, c_global);
    glob->add_option("--rmax", global_rmax, "largest r in the table")->required();

    auto* ratios = app.add_subcommand("ratios", "asymptotic-constant ratio report");
    add_common(ratios, c_ratios);
    ratios->add_option("--regime", ratios_regime,
                       "generation | local | subcritical | critical | supercritical")
        ->required();
    ratios->add_option("--horizon", ratios_horizon, "n for generation/local regimes");
    ratios->add_option("--rmin", ratios_rmin, "first r (default 1)");
    ratios->add_option("--rmax", ratios_rmax, "last r")->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates with optional exact comparison");
    add_common(sim, c_sim);
    sim->add_option("--target", sim_target, "generation | local | global | width");
    sim->add_option("--horizon", sim_horizon, "n for generation/local targets");
    sim->add_option("--trials", sim_trials, "number of trees (default 1e5)");
    sim->add_option("--seed", sim_seed, "master seed (default 0)");
    sim->add_option("--max-generations", sim_maxgens, "generation cap (default 200)");
    sim->add_option("--max-population", sim_maxpop, "per-generation population cap (default 1e6)");
    sim->add_flag("--compare", sim_compare, "compute exact tables and z-scores");

    auto* check = app.add_subcommand("check", "run the builtin invariant suite");
    check->add_option("--trials", check_trials, "Monte Carlo trials per check (default 20000)");
    check->add_option("--seed", check_seed, "Monte Carlo seed (default 1)");
    check->add_flag("--skip-montecarlo", check_skip_mc, "only the exact/analytic invariants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitSpec;
    }

    try {
        if (dist->parsed()) return cmd_dist(c_dist, dist_target, dist_horizon, dist_rmax);
        if (glob->parsed()) return cmd_global(c_global, global_rmax);
        if (ratios->parsed())
            return cmd_ratios(c_ratios, ratios_regime, ratios_horizon, ratios_rmin, ratios_rmax);
        if (sim->parsed())
            return cmd_simulate(c_sim, sim_target, sim_horizon, sim_trials, sim_seed, sim_maxgens,
                                sim_maxpop, sim_compare);
        if (check->parsed()) return cmd_check(check_trials, check_seed, check_skip_mc);
    } catch (const SpecError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSpec;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitSpec;
}
