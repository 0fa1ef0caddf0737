#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwmaxdeg/offspring.hpp"

namespace gwmaxdeg::exact {

// Exact distributions of M_n (per-generation maximum), M_{[0,n]} (maximum over
// the first n+1 generations) and joint multi-generation events, by composing
// (truncated) generating functions.
//
// cdf values compose in the natural variable,
//     P[M_i <= r_i, 0 <= i <= n] = G_{r_0} G_{r_1} ... G_{r_n}(1),
// while pmf and tail values compose in the complement variable s = 1 - t,
// which keeps relative accuracy once the cdfs crowd against 1.
//
// Convention for an early-extinct process: P[M_n <= r] counts trees extinct
// before generation n for every r, so pmf mass at generation n sums to
// 1 - G^n(0) and the r = 0 cell is G^n(p_0) - G^n(0).

struct GenerationCap {
    std::int64_t generation = 0;
    std::int64_t cap = 0;
};

double finite_dim_cdf(const OffspringDistribution& d, std::span<const std::int64_t> caps);

double generation_cdf(const OffspringDistribution& d, std::int64_t n, std::int64_t r);
double generation_tail(const OffspringDistribution& d, std::int64_t n, std::int64_t r);  // r >= -1
double generation_pmf(const OffspringDistribution& d, std::int64_t n, std::int64_t r);

double local_cdf(const OffspringDistribution& d, std::int64_t n, std::int64_t r);
double local_tail(const OffspringDistribution& d, std::int64_t n, std::int64_t r);  // r >= -1
double local_pmf(const OffspringDistribution& d, std::int64_t n, std::int64_t r);

// Difference-of-compositions probability for caps hit at chosen generations,
// D = C(caps) - C(caps, every cap decremented), with full G interleaved
// between the constrained generations. Reduces to generation_pmf for one cap.
double joint_union_prob(const OffspringDistribution& d, std::span<const GenerationCap> caps);

struct DistTable {
    enum class Target { Generation, Local, Global };
    struct Row {
        std::int64_t r = 0;
        double cdf = 0, pmf = 0, tail = 0;
    };
    Target target = Target::Generation;
    std::int64_t horizon = 0;  // n; unused for Global
    std::vector<Row> rows;
    double cdf_at_minus1 = 0;  // generation targets: G^n(0); otherwise 0
    std::string dist_description;
};

DistTable generation_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_max);
DistTable local_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_max);

}  // namespace gwmaxdeg::exact
