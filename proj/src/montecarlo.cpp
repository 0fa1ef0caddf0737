#include "gwmaxdeg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/exact.hpp"
#include "gwmaxdeg/global.hpp"
#include "gwmaxdeg/parallel.hpp"

namespace gwmaxdeg::montecarlo {

namespace {

constexpr std::int64_t kValueCap = 2048;  // per-target count array size; larger values pool
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// sampler

OffspringSampler::OffspringSampler(const OffspringDistribution& d) : dist_(&d) {
    const auto prefix = d.pmf_prefix();
    std::int64_t cut = static_cast<std::int64_t>(prefix.size());
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(prefix.size()); ++k) {
        if (d.tail(k) <= 1e-9) {
            cut = k + 1;
            break;
        }
        if (k >= 65535) {
            cut = k + 1;
            break;
        }
    }
    tail_start_ = cut;
    tail_mass_ = d.tail(cut - 1);

    const std::int64_t n = cut + 1;
    std::vector<double> w(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < cut; ++k) w[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(cut)] = tail_mass_;

    double total = 0.0;
    for (double v : w) total += v;

    // Vose alias construction
    prob_.assign(static_cast<std::size_t>(n), 0.0);
    alias_.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> scaled(static_cast<std::size_t>(n));
    std::vector<std::uint32_t> small, large;
    for (std::int64_t i = 0; i < n; ++i) {
        scaled[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] * static_cast<double>(n) / total;
        (scaled[static_cast<std::size_t>(i)] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;
}

std::int64_t OffspringSampler::sample(CounterRng& rng) const {
    const std::uint64_t u = rng.next_u64();
    const std::uint64_t n = prob_.size();
    const auto idx = static_cast<std::size_t>((static_cast<unsigned __int128>(u) * n) >> 64);
    std::int64_t k = rng.next_unit() < prob_[idx] ? static_cast<std::int64_t>(idx)
                                                  : static_cast<std::int64_t>(alias_[idx]);
    if (k != tail_start_) return k;
    // tail bucket: sequential inversion over the family closed form
    double t = rng.next_unit() * tail_mass_;
    std::int64_t v = tail_start_;
    for (;;) {
        const double pv = dist_->p(v);
        if (t < pv || pv == 0.0) return v;
        t -= pv;
        ++v;
    }
}

// ---------------------------------------------------------------------------
// tree sampling

TreeObservation sample_tree(const OffspringDistribution& d, const OffspringSampler& sampler,
                            CounterRng& rng, const SimLimits& limits) {
    if (limits.max_generations < 1 || limits.max_population < 1)
        throw SpecError("simulation caps must be >= 1");
    (void)d;
    TreeObservation obs;
    std::int64_t pop = 1;
    std::int64_t g = 0;
    for (;;) {
        if (pop == 0) {
            obs.extinct = true;
            break;
        }
        obs.width = std::max(obs.width, pop);
        if (g >= limits.max_generations || pop > limits.max_population) {
            obs.censored = true;
            break;
        }
        std::int64_t gmax = 0, next = 0;
        for (std::int64_t i = 0; i < pop; ++i) {
            const std::int64_t k = sampler.sample(rng);
            gmax = std::max(gmax, k);
            next += k;
        }
        obs.generation_max.push_back(gmax);
        obs.global_max = std::max(obs.global_max, gmax);
        pop = next;
        ++g;
    }
    return obs;
}

TreeObservation sample_tree(const OffspringDistribution& d, CounterRng& rng, const SimLimits& limits) {
    OffspringSampler sampler(d);
    return sample_tree(d, sampler, rng, limits);
}

// ---------------------------------------------------------------------------
// estimate

namespace {

struct TargetTally {
    std::vector<std::int64_t> counts;  // value -> trials, index capped at kValueCap
    std::int64_t beyond = 0;
    std::int64_t short_trials = 0;  // generation target: extinct before horizon
    std::int64_t unusable = 0;      // censored before the statistic resolved

    TargetTally() : counts(static_cast<std::size_t>(kValueCap) + 1, 0) {}

    void merge(const TargetTally& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        beyond += o.beyond;
        short_trials += o.short_trials;
        unusable += o.unusable;
    }
    void record(std::int64_t v) {
        if (v > kValueCap)
            ++beyond;
        else
            ++counts[static_cast<std::size_t>(v)];
    }
};

struct TrialOutcome {
    std::vector<std::int64_t> gen_max;  // generations 0..H-1 that completed
    std::int64_t gens_done = 0;
    std::int64_t global_max = 0;
    std::int64_t width = 1;
    bool extinct = false;
    bool censored = false;
};

// Fused per-trial loop; tracks only the first `horizon_cap` generation maxima.
// `stop_gens` cuts the walk once every requested horizon is fully observed
// (neither extinction nor censoring); full-tree targets pass int64 max.
void run_trial(const OffspringSampler& sampler, CounterRng& rng, const SimLimits& limits,
               std::int64_t horizon_cap, std::int64_t stop_gens, TrialOutcome& out) {
    out.gens_done = 0;
    out.global_max = 0;
    out.width = 1;
    out.extinct = out.censored = false;
    std::int64_t pop = 1;
    std::int64_t g = 0;
    for (;;) {
        if (pop == 0) {
            out.extinct = true;
            return;
        }
        out.width = std::max(out.width, pop);
        if (g >= limits.max_generations || pop > limits.max_population) {
            out.censored = true;
            return;
        }
        if (g >= stop_gens) return;
        std::int64_t gmax = 0, next = 0;
        for (std::int64_t i = 0; i < pop; ++i) {
            const std::int64_t k = sampler.sample(rng);
            gmax = std::max(gmax, k);
            next += k;
        }
        if (g < horizon_cap) out.gen_max[static_cast<std::size_t>(g)] = gmax;
        out.gens_done = g + 1;
        out.global_max = std::max(out.global_max, gmax);
        pop = next;
        ++g;
    }
}

struct Aggregate {
    std::vector<TargetTally> per_target;
    std::int64_t censored = 0;

    explicit Aggregate(std::size_t n_targets) : per_target(n_targets) {}
    void merge(const Aggregate& o) {
        for (std::size_t i = 0; i < per_target.size(); ++i) per_target[i].merge(o.per_target[i]);
        censored += o.censored;
    }
};

void tally_trial(const std::vector<TargetSpec>& targets, const TrialOutcome& t, Aggregate& agg) {
    if (t.censored) ++agg.censored;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        auto& tally = agg.per_target[i];
        const auto& spec = targets[i];
        switch (spec.stat) {
            case Statistic::Generation: {
                const std::int64_t n = spec.horizon;
                if (t.gens_done > n) {
                    tally.record(t.gen_max[static_cast<std::size_t>(n)]);
                } else if (t.extinct) {
                    ++tally.short_trials;  // M_n <= r for every r
                } else {
                    ++tally.unusable;
                }
                break;
            }
            case Statistic::Local: {
                const std::int64_t n = spec.horizon;
                if (t.gens_done > n || t.extinct) {
                    std::int64_t m = 0;
                    const std::int64_t upto = std::min(n + 1, t.gens_done);
                    for (std::int64_t g = 0; g < upto; ++g)
                        m = std::max(m, t.gen_max[static_cast<std::size_t>(g)]);
                    tally.record(m);
                } else {
                    ++tally.unusable;
                }
                break;
            }
            case Statistic::Global:
                if (t.extinct)
                    tally.record(t.global_max);
                else
                    ++tally.unusable;
                break;
            case Statistic::Width:
                if (!t.censored)
                    tally.record(t.width);
                else
                    ++tally.unusable;
                break;
        }
    }
}

double binom_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

SimSummary estimate(const OffspringDistribution& d, const SimConfig& config, bool compare_exact) {
    if (config.trials < 1) throw SpecError("trials must be >= 1");
    if (config.limits.max_generations < 1 || config.limits.max_population < 1)
        throw SpecError("simulation caps must be >= 1");
    if (config.targets.empty()) throw SpecError("no statistics requested");

    std::int64_t horizon_cap = 0;
    bool needs_full_tree = false;
    for (const auto& t : config.targets) {
        if (t.horizon < 0) throw SpecError("target horizon must be >= 0");
        if (t.stat == Statistic::Generation || t.stat == Statistic::Local)
            horizon_cap = std::max(horizon_cap, t.horizon + 1);
        else
            needs_full_tree = true;
    }
    const std::int64_t stop_gens =
        needs_full_tree ? std::numeric_limits<std::int64_t>::max() : horizon_cap;

    const OffspringSampler sampler(d);
    const unsigned threads = std::min<unsigned>(thread_budget(),
                                                static_cast<unsigned>(std::min<std::int64_t>(
                                                    config.trials, 1024)));
    std::vector<Aggregate> partial(threads, Aggregate(config.targets.size()));

    {
        std::vector<std::thread> pool;
        for (unsigned ti = 0; ti < threads; ++ti) {
            const std::int64_t lo = config.trials * ti / threads;
            const std::int64_t hi = config.trials * (ti + 1) / threads;
            pool.emplace_back([&, ti, lo, hi] {
                TrialOutcome out;
                out.gen_max.resize(static_cast<std::size_t>(std::max<std::int64_t>(horizon_cap, 1)));
                for (std::int64_t trial = lo; trial < hi; ++trial) {
                    CounterRng rng = CounterRng::for_trial(config.seed, static_cast<std::uint64_t>(trial));
                    run_trial(sampler, rng, config.limits, horizon_cap, stop_gens, out);
                    tally_trial(config.targets, out, partial[ti]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    Aggregate total(config.targets.size());
    for (const auto& p : partial) total.merge(p);

    SimSummary sum;
    sum.dist_description = d.describe();
    sum.trials = config.trials;
    sum.seed = config.seed;
    sum.censored_trials = total.censored;
    sum.censor_rate = static_cast<double>(total.censored) / static_cast<double>(config.trials);

    const double q_ext = d.extinction_probability();

    for (std::size_t i = 0; i < config.targets.size(); ++i) {
        const auto& spec = config.targets[i];
        const auto& tally = total.per_target[i];
        TargetSummary ts;
        ts.target = spec;
        ts.short_trials = tally.short_trials;
        ts.usable_trials = config.trials - tally.unusable;

        std::int64_t r_emit = 0;
        for (std::int64_t r = 0; r <= kValueCap; ++r)
            if (tally.counts[static_cast<std::size_t>(r)] > 0) r_emit = r;

        // exact comparison range: cells whose suffix still holds >= 5 trials
        std::int64_t r_cmp = -1;
        if (compare_exact && spec.stat != Statistic::Width && ts.usable_trials > 0) {
            std::int64_t suffix = tally.beyond;
            std::vector<std::int64_t> suffix_at(static_cast<std::size_t>(kValueCap) + 1, 0);
            for (std::int64_t r = kValueCap; r >= 0; --r) {
                suffix += tally.counts[static_cast<std::size_t>(r)];
                suffix_at[static_cast<std::size_t>(r)] = suffix;
            }
            for (std::int64_t r = 0; r <= kValueCap; ++r)
                if (suffix_at[static_cast<std::size_t>(r)] >= 5) r_cmp = r;
        }

        std::vector<double> exact_pmf, exact_cdf;
        double conditional_norm = 1.0;
        bool have_exact = false;
        if (r_cmp >= 0) {
            if (spec.stat == Statistic::Generation || spec.stat == Statistic::Local) {
                const auto table = spec.stat == Statistic::Generation
                                       ? exact::generation_table(d, spec.horizon, r_cmp)
                                       : exact::local_table(d, spec.horizon, r_cmp);
                for (const auto& row : table.rows) {
                    exact_pmf.push_back(row.pmf);
                    exact_cdf.push_back(row.cdf);
                }
                have_exact = true;
            } else if (spec.stat == Statistic::Global) {
                if (d.criticality() == Criticality::Supercritical && q_ext == 0.0) {
                    have_exact = false;  // no extinct trials to compare against
                } else {
                    const auto law = global::compute_law(d, r_cmp);
                    conditional_norm = d.criticality() == Criticality::Supercritical ? q_ext : 1.0;
                    for (const auto& row : law.rows) {
                        exact_pmf.push_back(row.pmf / conditional_norm);
                        exact_cdf.push_back(row.cdf / conditional_norm);
                    }
                    have_exact = true;
                }
            }
        }

        const double n_use = static_cast<double>(ts.usable_trials);
        std::int64_t cum = 0;
        const std::int64_t r_out = std::max(r_emit, std::max<std::int64_t>(r_cmp, 0));
        for (std::int64_t r = 0; r <= r_out && r <= kValueCap; ++r) {
            const std::int64_t c = tally.counts[static_cast<std::size_t>(r)];
            cum += c;

            CellStat pmf_cell;
            pmf_cell.r = r;
            pmf_cell.count = c;
            pmf_cell.estimate = n_use > 0 ? static_cast<double>(c) / n_use : 0.0;
            CellStat cdf_cell = pmf_cell;
            cdf_cell.count = cum + tally.short_trials;
            cdf_cell.estimate = n_use > 0 ? static_cast<double>(cdf_cell.count) / n_use : 0.0;

            if (have_exact && r <= r_cmp && n_use > 0) {
                const double p = exact_pmf[static_cast<std::size_t>(r)];
                pmf_cell.compared = true;
                pmf_cell.well_populated = n_use * p >= 10.0 && n_use * (1.0 - p) >= 10.0;
                pmf_cell.se = binom_se(p, n_use);
                pmf_cell.z = pmf_cell.se > 0 ? (pmf_cell.estimate - p) / pmf_cell.se : kNaN;

                const double pc = exact_cdf[static_cast<std::size_t>(r)];
                cdf_cell.compared = true;
                cdf_cell.well_populated = n_use * pc >= 10.0 && n_use * (1.0 - pc) >= 10.0;
                cdf_cell.se = binom_se(pc, n_use);
                cdf_cell.z = cdf_cell.se > 0 ? (cdf_cell.estimate - pc) / cdf_cell.se : kNaN;

                if (pmf_cell.well_populated && std::isfinite(pmf_cell.z))
                    ts.max_abs_z = std::max(ts.max_abs_z, std::abs(pmf_cell.z));
                if (cdf_cell.well_populated && std::isfinite(cdf_cell.z))
                    ts.max_abs_z = std::max(ts.max_abs_z, std::abs(cdf_cell.z));
                ts.compared = true;
            } else {
                pmf_cell.se = n_use > 0 ? binom_se(pmf_cell.estimate, n_use) : 0.0;
                cdf_cell.se = n_use > 0 ? binom_se(cdf_cell.estimate, n_use) : 0.0;
                pmf_cell.z = cdf_cell.z = kNaN;
            }
            ts.pmf_cells.push_back(pmf_cell);
            ts.cdf_cells.push_back(cdf_cell);
        }
        sum.max_abs_z = std::max(sum.max_abs_z, ts.max_abs_z);
        sum.targets.push_back(std::move(ts));
    }

    if (d.criticality() != Criticality::Supercritical && sum.censor_rate > 0.01) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "excessive censoring for a (sub)critical law: %.3g%% of trials hit a cap; "
                      "raise max_generations/max_population",
                      100.0 * sum.censor_rate);
        throw NumericError(msg);
    }
    return sum;
}

WidthReport width_bound_check(const OffspringDistribution& d, const SimConfig& config,
                              const std::vector<std::int64_t>& grid) {
    if (d.criticality() == Criticality::Supercritical)
        throw SpecError("regime mismatch: the width bound P[W >= r] <= 1/r requires a (sub)critical law");
    if (config.trials < 1) throw SpecError("trials must be >= 1");
    for (auto r : grid)
        if (r < 1) throw SpecError("width grid entries must be >= 1");

    const OffspringSampler sampler(d);
    const unsigned threads = std::min<unsigned>(thread_budget(),
                                                static_cast<unsigned>(std::min<std::int64_t>(
                                                    config.trials, 1024)));
    std::vector<std::vector<std::int64_t>> partial(threads,
                                                   std::vector<std::int64_t>(grid.size(), 0));
    {
        std::vector<std::thread> pool;
        for (unsigned ti = 0; ti < threads; ++ti) {
            const std::int64_t lo = config.trials * ti / threads;
            const std::int64_t hi = config.trials * (ti + 1) / threads;
            pool.emplace_back([&, ti, lo, hi] {
                TrialOutcome out;
                out.gen_max.resize(1);
                for (std::int64_t trial = lo; trial < hi; ++trial) {
                    CounterRng rng = CounterRng::for_trial(config.seed, static_cast<std::uint64_t>(trial));
                    run_trial(sampler, rng, config.limits, 0,
                              std::numeric_limits<std::int64_t>::max(), out);
                    // censored widths are lower bounds; they still certify W >= r
                    for (std::size_t gi = 0; gi < grid.size(); ++gi)
                        if (out.width >= grid[gi]) ++partial[ti][gi];
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    WidthReport rep;
    rep.dist_description = d.describe();
    rep.trials = config.trials;
    rep.seed = config.seed;
    const double n = static_cast<double>(config.trials);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        std::int64_t c = 0;
        for (unsigned ti = 0; ti < threads; ++ti) c += partial[ti][gi];
        WidthReport::Row row;
        row.r = grid[gi];
        row.count = c;
        row.estimate = static_cast<double>(c) / n;
        row.se = binom_se(row.estimate, n);
        row.bound = 1.0 / static_cast<double>(grid[gi]);
        row.ok = !(row.estimate - 3.0 * row.se > row.bound);
        row.underpowered = c < 10;
        if (!row.ok) rep.any_violation = true;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace gwmaxdeg::montecarlo
