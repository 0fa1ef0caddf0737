#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwmaxdeg/offspring.hpp"

namespace gwmaxdeg::montecarlo {

// splitmix64 stream; per-trial substreams are derived from the master seed by
// scrambling a trial-indexed counter, so results do not depend on execution
// order or thread count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t state) : state_(state) {}

    static CounterRng for_trial(std::uint64_t seed, std::uint64_t trial) {
        return CounterRng(scramble(seed + 0x9E3779B97F4A7C15ULL * (trial + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return scramble(state_);
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

// Alias table over the materialized prefix plus an explicit tail bucket that
// falls back to sequential inversion, so infinite supports sample exactly.
class OffspringSampler {
public:
    explicit OffspringSampler(const OffspringDistribution& d);
    std::int64_t sample(CounterRng& rng) const;

private:
    const OffspringDistribution* dist_;
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    std::int64_t tail_start_ = 0;  // bucket index of the tail bucket
    double tail_mass_ = 0.0;
};

struct SimLimits {
    std::int64_t max_generations = 200;
    std::int64_t max_population = 1000000;
};

enum class Statistic { Generation, Local, Global, Width };

struct TargetSpec {
    Statistic stat = Statistic::Global;
    std::int64_t horizon = 0;  // Generation/Local only
};

struct SimConfig {
    std::int64_t trials = 100000;
    std::uint64_t seed = 0;
    SimLimits limits;
    std::vector<TargetSpec> targets;
};

struct TreeObservation {
    std::vector<std::int64_t> generation_max;  // up to extinction or cap
    std::int64_t global_max = 0;
    std::int64_t width = 1;
    bool extinct = false;
    bool censored = false;  // a cap was hit; maxima are lower bounds
};

TreeObservation sample_tree(const OffspringDistribution& d, const OffspringSampler& sampler,
                            CounterRng& rng, const SimLimits& limits);
TreeObservation sample_tree(const OffspringDistribution& d, CounterRng& rng, const SimLimits& limits);

struct CellStat {
    std::int64_t r = 0;
    std::int64_t count = 0;
    double estimate = 0;
    double se = 0;
    double z = 0;                  // valid when compared && well_populated
    bool well_populated = false;   // expected count >= 10 on both sides
    bool compared = false;
};

struct TargetSummary {
    TargetSpec target;
    std::int64_t usable_trials = 0;
    std::int64_t short_trials = 0;  // generation target: extinct before the horizon
    std::vector<CellStat> pmf_cells;
    std::vector<CellStat> cdf_cells;
    double max_abs_z = 0;
    bool compared = false;
};

struct SimSummary {
    std::string dist_description;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::int64_t censored_trials = 0;
    double censor_rate = 0;
    std::vector<TargetSummary> targets;
    double max_abs_z = 0;
};

// Aggregates independent trials on counter-derived substreams; identical
// (spec, config) gives an identical summary at any thread count. With
// compare_exact, z-scores are computed against the exact tables; censored
// trials are excluded from two-sided tests and the exclusion is reported.
// Throws NumericError when a (sub)critical run censors more than 1% of
// trials (cap misconfiguration).
SimSummary estimate(const OffspringDistribution& d, const SimConfig& config, bool compare_exact);

struct WidthReport {
    struct Row {
        std::int64_t r = 0;
        std::int64_t count = 0;  // trials with observed width >= r
        double estimate = 0;
        double se = 0;
        double bound = 0;  // 1/r
        bool ok = true;    // estimate - 3 se <= 1/r
        bool underpowered = false;
    };
    std::string dist_description;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<Row> rows;
    bool any_violation = false;
};

// Empirical check of P[W >= r] <= 1/r for (sub)critical laws.
WidthReport width_bound_check(const OffspringDistribution& d, const SimConfig& config,
                              const std::vector<std::int64_t>& grid);

}  // namespace gwmaxdeg::montecarlo
