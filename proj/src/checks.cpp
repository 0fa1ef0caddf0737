#include "gwmaxdeg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gwmaxdeg/asymptotics.hpp"
#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/exact.hpp"
#include "gwmaxdeg/global.hpp"
#include "gwmaxdeg/montecarlo.hpp"

namespace gwmaxdeg::checks {

namespace {

struct FamilyPlan {
    OffspringSpec spec;
    std::int64_t law_r_hi;          // global-law range
    std::int64_t exact_r_hi;        // generation/local bound range
    std::int64_t exact_n_hi;        // horizon for exact checks
    std::int64_t mc_max_gens;       // simulation generation cap
    std::int64_t local_limit_r_hi;  // largest r whose local->global iteration
                                    // converges within the budget (rate 1 - T(r))
};

std::vector<FamilyPlan> family_plans() {
    return {
        {OffspringSpec::explicit_pmf({0.5, 0.0, 0.5}), 2, 2, 4, 10000, 2},
        {OffspringSpec::geometric(1.0 / 3.0), 60, 50, 4, 200, 60},
        {OffspringSpec::geometric(0.5), 96, 42, 4, 10000, 14},
        {OffspringSpec::poisson(0.8), 40, 30, 4, 200, 40},
        {OffspringSpec::poisson(1.5), 40, 30, 4, 200, 40},
        {OffspringSpec::critical_power_law(3.0), 400, 64, 2, 8000, 60},
        {OffspringSpec::explicit_pmf({0.25, 0.0, 0.75}), 2, 2, 4, 200, 2},
        {OffspringSpec::explicit_pmf({0.0, 0.5, 0.0, 0.5}), 3, 3, 4, 200, 3},
    };
}

std::string short_name(const OffspringSpec& s) {
    switch (s.family) {
        case Family::Geometric: {
            char b[32];
            std::snprintf(b, sizeof b, "geometric(%.4g)", s.param);
            return b;
        }
        case Family::Poisson: {
            char b[32];
            std::snprintf(b, sizeof b, "poisson(%.4g)", s.param);
            return b;
        }
        case Family::CriticalPowerLaw: {
            char b[32];
            std::snprintf(b, sizeof b, "power(%.4g)", s.param);
            return b;
        }
        case Family::Explicit: {
            std::string out = "explicit[";
            char b[24];
            for (std::size_t i = 0; i < s.pmf.size(); ++i) {
                std::snprintf(b, sizeof b, "%g", s.pmf[i]);
                if (i) out += ',';
                out += b;
            }
            return out + "]";
        }
    }
    return "?";
}

struct Collector {
    std::vector<CheckResult> out;
    void add(std::string name, bool pass, std::string detail = "") {
        out.push_back(CheckResult{std::move(name), pass ? Status::Pass : Status::Fail, std::move(detail)});
    }
    void add_status(std::string name, Status st, std::string detail = "") {
        out.push_back(CheckResult{std::move(name), st, std::move(detail)});
    }
};

std::vector<std::int64_t> r_grid(std::int64_t hi) {
    std::vector<std::int64_t> g{0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
    g.erase(std::remove_if(g.begin(), g.end(), [hi](std::int64_t r) { return r > hi; }), g.end());
    if (g.empty() || g.back() != hi) g.push_back(hi);
    return g;
}

void offspring_checks(Collector& cc, const FamilyPlan& plan, const OffspringDistribution& d,
                      const std::string& nm) {
    bool norm_ok = true, order_ok = true;
    for (std::int64_t r : r_grid(plan.law_r_hi))
        if (std::abs(d.cdf(r) + d.tail(r) - 1.0) > 1e-12) norm_ok = false;
    cc.add("offspring." + nm + ".normalization", norm_ok);

    cc.add("offspring." + nm + ".mean_derivative",
           std::abs(d.pgf_derivative(std::nullopt, 1.0, 1) - d.mean()) <= 1e-10);

    for (double x = 0.0; x <= 1.0 + 1e-12; x += 0.125) {
        const double xx = std::min(x, 1.0);
        double prev_r = -1.0;
        for (std::int64_t r : {0, 1, 2, 5, 11, 23}) {
            const double g = d.pgf_truncated(r, xx);
            if (g > d.pgf(xx) + 1e-14) order_ok = false;
            if (g + 1e-15 < prev_r) order_ok = false;
            prev_r = g;
            if (xx > 0.0 && d.pgf_truncated(r, xx - 0.125 <= 0 ? 0.0 : xx - 0.125) > g + 1e-14)
                order_ok = false;
        }
    }
    cc.add("offspring." + nm + ".pgf_order", order_ok);

    const double q = d.extinction_probability();
    cc.add("offspring." + nm + ".extinction_residual", std::abs(d.pgf(q) - q) <= 1e-12);

    if (d.bounded()) {
        bool exact_eq = true;
        for (double x : {0.0, 0.25, 0.5, 0.75, 1.0})
            if (d.pgf_truncated(d.support_max(), x) != d.pgf(x)) exact_eq = false;
        cc.add("offspring." + nm + ".truncated_at_max_equals_full", exact_eq);
    }
}

void exact_checks(Collector& cc, const FamilyPlan& plan, const OffspringDistribution& d,
                  const std::string& nm) {
    bool bitwise_ok = true, sandwich_ok = true, complement_ok = true;
    for (std::int64_t n = 0; n <= plan.exact_n_hi; ++n) {
        for (std::int64_t r : r_grid(std::min<std::int64_t>(plan.exact_r_hi, 32))) {
            std::vector<std::int64_t> caps(static_cast<std::size_t>(n) + 1, r);
            if (exact::finite_dim_cdf(d, caps) != exact::local_cdf(d, n, r)) bitwise_ok = false;
            if (exact::generation_cdf(d, n, r) < exact::local_cdf(d, n, r) - 1e-15) sandwich_ok = false;
            if (std::abs((1.0 - exact::generation_tail(d, n, r)) - exact::generation_cdf(d, n, r)) > 1e-12)
                complement_ok = false;
            if (std::abs((1.0 - exact::local_tail(d, n, r)) - exact::local_cdf(d, n, r)) > 1e-12)
                complement_ok = false;
        }
    }
    cc.add("exact." + nm + ".equal_caps_bitwise", bitwise_ok);
    cc.add("exact." + nm + ".sandwich", sandwich_ok);
    cc.add("exact." + nm + ".complement_consistency", complement_ok);

    bool gen_bound = true, loc_bound = true;
    const double mu = d.mean();
    for (std::int64_t n = 0; n <= plan.exact_n_hi; ++n) {
        const auto gt = exact::generation_table(d, n, plan.exact_r_hi);
        const auto lt = exact::local_table(d, n, plan.exact_r_hi);
        const double mun = std::pow(mu, static_cast<double>(n));
        double summ = 0.0, w = 1.0;
        for (std::int64_t i = 0; i <= n; ++i) {
            summ += w;
            w *= mu;
        }
        for (std::int64_t r = 0; r <= plan.exact_r_hi; ++r) {
            const double pr = d.p(r);
            if (gt.rows[static_cast<std::size_t>(r)].pmf > mun * pr + 1e-12) gen_bound = false;
            if (lt.rows[static_cast<std::size_t>(r)].pmf > summ * pr + 1e-12) loc_bound = false;
        }
    }
    cc.add("exact." + nm + ".generation_pmf_bound", gen_bound);
    cc.add("exact." + nm + ".local_pmf_bound", loc_bound);
}

void global_checks(Collector& cc, const FamilyPlan& plan, const OffspringDistribution& d,
                   const std::string& nm) {
    const auto law = global::compute_law(d, plan.law_r_hi);
    bool residual_ok = true;
    for (const auto& row : law.rows) {
        if (d.tail(row.r) <= 0.0) continue;
        if (row.residual > 1e-10) residual_ok = false;
        const double back = std::abs(d.pgf_truncated_complement(row.r, row.tail) - row.tail);
        if (back > 1e-10) residual_ok = false;
    }
    cc.add("global." + nm + ".fixed_point_residual", residual_ok);

    // local_cdf decreases in n toward the global law
    bool limit_ok = true;
    char detail[96] = "";
    for (std::int64_t r : r_grid(plan.local_limit_r_hi)) {
        const double target = law.rows[static_cast<std::size_t>(r)].cdf;
        double v = 1.0, prev = 2.0;
        bool reached = false;
        for (std::int64_t n = 0; n < 500000; ++n) {
            v = d.pgf_truncated(r, v);
            if (v > prev + 1e-14) {
                limit_ok = false;
                break;
            }
            prev = v;
            if (std::abs(v - target) < 1e-8) {
                reached = true;
                break;
            }
        }
        if (!reached) {
            limit_ok = false;
            std::snprintf(detail, sizeof detail, "no convergence to global law at r=%lld",
                          static_cast<long long>(r));
            break;
        }
    }
    cc.add("global." + nm + ".local_limit", limit_ok, detail);

    if (d.criticality() != Criticality::Supercritical) {
        if (d.bounded() || d.spec().family != Family::CriticalPowerLaw) {
            const double h_end = law.rows.back().tail;
            cc.add("global." + nm + ".completeness",
                   d.bounded() ? h_end == 0.0 : h_end <= d.tail_tolerance());
        } else {
            // heavy tail: mass still escapes to 1, checked through the r*Hbar trend
            const double a = 100.0 * law.rows[100].tail;
            const double b = 300.0 * law.rows[300].tail;
            cc.add("global." + nm + ".completeness_trend", b < a);
        }
    } else {
        const double q = d.extinction_probability();
        cc.add("global." + nm + ".infinite_mass_consistency",
               std::abs(global::infinite_mass(d) - (d.bounded() && d.p(0) > 0.0 ? 0.0
                                                    : d.p(0) == 0.0            ? 1.0
                                                                                : 1.0 - q)) == 0.0);
        if (!d.bounded() && d.p(0) > 0.0) {
            cc.add("global." + nm + ".supercritical_limit",
                   std::abs(law.rows.back().cdf - q) < 1e-6);
        }
    }
}

void asymptotic_checks(Collector& cc, const FamilyPlan& plan, const OffspringDistribution& d,
                       const std::string& nm) {
    if (d.bounded()) return;
    const auto law = global::compute_law(d, plan.law_r_hi);
    char detail[128];

    if (d.criticality() == Criticality::Subcritical) {
        const auto rep = asymptotics::subcritical_global_ratio_table(d, law, 1, plan.law_r_hi);
        const double dev = std::abs(rep.rows.back().ratio - 1.0);
        const double tdev = std::abs(rep.tail_rows.back().ratio - 1.0);
        std::snprintf(detail, sizeof detail, "window end r=%lld: |ratio-1|=%.2e tail %.2e",
                      static_cast<long long>(rep.window_end), dev, tdev);
        cc.add("asymptotics." + nm + ".subcritical_ratio", dev < 0.01 && tdev < 0.01, detail);

        // expectation bound from the proof: sum r q_r <= sum r p_r / (1-mu)
        double lhs = 0.0, rhs = 0.0;
        for (const auto& row : law.rows) {
            lhs += static_cast<double>(row.r) * row.pmf;
            rhs += static_cast<double>(row.r) * d.p(row.r);
        }
        cc.add("asymptotics." + nm + ".expectation_bound", lhs <= rhs / (1.0 - d.mean()) + 1e-12);
    } else if (d.criticality() == Criticality::Critical) {
        const auto rep = asymptotics::critical_bounds_report(d, law, 1, plan.law_r_hi);
        cc.add("asymptotics." + nm + ".critical_bounds", !rep.any_bound_violation);
        std::snprintf(detail, sizeof detail, "q_r/p_r growth x%.3g across [%lld,%lld]",
                      rep.growth_factor, static_cast<long long>(rep.window_begin),
                      static_cast<long long>(rep.window_end));
        cc.add("asymptotics." + nm + ".ratio_divergence", rep.growth_ok, detail);
        std::snprintf(detail, sizeof detail, "running max %.4g vs target %.4g", rep.quad_limsup,
                      rep.quad_target);
        cc.add("asymptotics." + nm + ".limsup_pmf", rep.quad_ok, detail);
        if (rep.quad_target == 0.0) {
            // sigma^2 = inf: the quadratic ratios head to 0, so the window trend
            // must point down; with finite sigma^2 they settle at 2/sigma^2
            const bool tail_trend = !rep.quad_tail_rows.empty() &&
                                    rep.quad_tail_rows.back().ratio < rep.quad_tail_rows.front().ratio;
            cc.add("asymptotics." + nm + ".quad_tail_trend", tail_trend);
        }
        std::snprintf(detail, sizeof detail,
                      "running max %.4g vs target %.4g; converges like 1/log r when sigma^2 = inf",
                      rep.quad_tail_limsup, rep.quad_target);
        cc.add("asymptotics." + nm + ".limsup_tail", rep.quad_tail_ok, detail);

        // liminf echo: Hbar/Fbar eventually exceeds n+1 for n = 1,2,3
        const double end_ratio = rep.tail_rows.back().ratio;
        cc.add("asymptotics." + nm + ".liminf_tail_ratio", end_ratio > 4.0);
    } else if (d.p(0) > 0.0) {
        const auto rep = asymptotics::supercritical_limits_report(d, law, 1, plan.law_r_hi);
        const double dev = std::abs(rep.rows.back().ratio - 1.0);
        std::snprintf(detail, sizeof detail, "pmf ratio window end dev %.2e, Hbar end dev %.2e", dev,
                      std::abs(rep.tail_rows.back().ratio - 1.0));
        cc.add("asymptotics." + nm + ".supercritical_limits",
               dev < 0.02 && std::abs(rep.tail_rows.back().ratio - 1.0) < 1e-5, detail);
    }
}

void montecarlo_checks(Collector& cc, const FamilyPlan& plan, const OffspringDistribution& d,
                       const std::string& nm, const SuiteOptions& opt) {
    using namespace montecarlo;
    const bool subcritical_side = d.criticality() != Criticality::Supercritical;

    SimConfig cfg;
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.limits.max_generations = plan.mc_max_gens;
    if (d.criticality() == Criticality::Supercritical)
        cfg.limits.max_population = 5000;  // non-extinct trials explode; cap the walk cost
    cfg.targets = {TargetSpec{Statistic::Generation, 0}, TargetSpec{Statistic::Generation, 2},
                   TargetSpec{Statistic::Local, 2}, TargetSpec{Statistic::Global, 0}};
    const auto summary = estimate(d, cfg, true);

    bool any_compared = false;
    bool skipped_global = false;
    double maxz = 0.0;
    for (const auto& t : summary.targets) {
        if (!t.compared) continue;
        if (t.target.stat == Statistic::Global && summary.censor_rate > 0.0 &&
            d.criticality() != Criticality::Supercritical &&
            summary.censor_rate * std::sqrt(static_cast<double>(t.usable_trials)) > 0.3) {
            // censored-exclusion bias would rival the Monte Carlo error
            skipped_global = true;
            continue;
        }
        for (const auto& c : t.pmf_cells)
            if (c.compared && c.well_populated) {
                any_compared = true;
                maxz = std::max(maxz, std::abs(c.z));
            }
        for (const auto& c : t.cdf_cells)
            if (c.compared && c.well_populated) {
                any_compared = true;
                maxz = std::max(maxz, std::abs(c.z));
            }
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "max |z| = %.3f over populated cells%s", maxz,
                  skipped_global ? "; global cells skipped (censor bias)" : "");
    if (!any_compared)
        cc.add_status("montecarlo." + nm + ".oracle_z", Status::Underpowered,
                      "no cell reaches expected count 10");
    else
        cc.add("montecarlo." + nm + ".oracle_z", maxz < 4.0, detail);

    if (d.criticality() == Criticality::Supercritical && !d.bounded() && d.p(0) > 0.0) {
        const double expect = 1.0 - d.extinction_probability();
        const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(cfg.trials));
        std::snprintf(detail, sizeof detail, "censor rate %.4f vs 1-q %.4f", summary.censor_rate, expect);
        cc.add("montecarlo." + nm + ".censor_rate", std::abs(summary.censor_rate - expect) < 6.0 * se,
               detail);
    }

    if (subcritical_side) {
        const auto width = width_bound_check(d, cfg, {1, 2, 5, 10, 20, 50});
        bool violated = false, all_under = true;
        for (const auto& row : width.rows) {
            if (!row.underpowered) all_under = false;
            if (!row.ok && !row.underpowered) violated = true;
        }
        if (all_under)
            cc.add_status("montecarlo." + nm + ".width_bound", Status::Underpowered,
                          "all grid rows below 10 hits");
        else
            cc.add("montecarlo." + nm + ".width_bound", !violated);
    }
}

}  // namespace

std::vector<OffspringSpec> builtin_families() {
    std::vector<OffspringSpec> out;
    for (auto& p : family_plans()) out.push_back(p.spec);
    return out;
}

std::vector<CheckResult> run_builtin_suite(const SuiteOptions& opt) {
    Collector cc;
    for (const auto& plan : family_plans()) {
        const std::string nm = short_name(plan.spec);
        try {
            const auto d = OffspringDistribution::build(plan.spec);
            offspring_checks(cc, plan, d, nm);
            exact_checks(cc, plan, d, nm);
            global_checks(cc, plan, d, nm);
            asymptotic_checks(cc, plan, d, nm);
            if (opt.include_montecarlo) montecarlo_checks(cc, plan, d, nm, opt);
        } catch (const std::exception& e) {
            cc.add("suite." + nm, false, e.what());
        }
    }

    // determinism: identical (spec, config) must reproduce identical summaries
    if (opt.include_montecarlo) {
        using namespace montecarlo;
        const auto d = OffspringDistribution::build(OffspringSpec::explicit_pmf({0.5, 0.0, 0.5}));
        SimConfig cfg;
        cfg.trials = std::min<std::int64_t>(opt.trials, 5000);
        cfg.seed = opt.seed;
        cfg.limits.max_generations = 4000;
        cfg.targets = {TargetSpec{Statistic::Global, 0}};
        const auto a = estimate(d, cfg, false);
        const auto b = estimate(d, cfg, false);
        bool same = a.censored_trials == b.censored_trials &&
                    a.targets[0].pmf_cells.size() == b.targets[0].pmf_cells.size();
        if (same)
            for (std::size_t i = 0; i < a.targets[0].pmf_cells.size(); ++i)
                if (a.targets[0].pmf_cells[i].count != b.targets[0].pmf_cells[i].count) same = false;
        cc.add("montecarlo.determinism", same);
    }
    return cc.out;
}

}  // namespace gwmaxdeg::checks
