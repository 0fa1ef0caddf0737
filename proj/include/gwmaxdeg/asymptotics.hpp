#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwmaxdeg/global.hpp"
#include "gwmaxdeg/offspring.hpp"

namespace gwmaxdeg::asymptotics {

// One comparison row. `ratio` is num/(den * constant) for convergence-type
// claims, so a verified limit reads as ratio -> 1; for the critical "-> inf"
// rows it is the raw quotient num/den. `bound_ok` is false only when the
// row's inequality is violated by more than 1e-12 absolute.
struct RatioRow {
    std::int64_t r = 0;
    double numerator = 0;
    double denominator = 0;
    double ratio = 0;
    bool bound_ok = true;
};

struct RatioReport {
    std::string regime;
    std::string constant_desc;
    double constant = 1.0;       // claimed limit constant for `rows`
    double tail_constant = 1.0;  // same for `tail_rows`

    std::vector<RatioRow> rows;       // pmf-type comparisons, trusted window only
    std::vector<RatioRow> tail_rows;  // tail-type comparisons

    // critical regime extras: q_r^2/p_r and Hbar^2/Fbar against 2/sigma^2
    std::vector<RatioRow> quad_rows;
    std::vector<RatioRow> quad_tail_rows;
    double quad_target = 0;
    double quad_limsup = 0, quad_tail_limsup = 0;  // running max, last half of window
    bool quad_ok = false, quad_tail_ok = false;
    double growth_factor = 0, tail_growth_factor = 0;  // window end over window start
    bool growth_ok = false;

    std::int64_t precision_floor_r = -1;
    std::int64_t window_begin = -1, window_end = -1;
    double max_ratio_deviation = 0;       // max |ratio - 1| over rows
    double max_tail_ratio_deviation = 0;  // over tail_rows
    bool any_bound_violation = false;
};

// P[M_n = r] against mu^n p_r and P[M_n > r] against mu^n Fbar(r).
RatioReport generation_ratio_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_lo,
                                   std::int64_t r_hi);

// P[M_{[0,n]} = r] against (1 + mu + ... + mu^n) p_r, plus the tail variant.
RatioReport local_ratio_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_lo,
                              std::int64_t r_hi);

// Subcritical unbounded laws: p_r/q_r and Fbar/Hbar against 1 - mu.
RatioReport subcritical_global_ratio_table(const OffspringDistribution& d, std::int64_t r_lo,
                                           std::int64_t r_hi);
RatioReport subcritical_global_ratio_table(const OffspringDistribution& d, const global::GlobalLaw& law,
                                           std::int64_t r_lo, std::int64_t r_hi);

// Critical unbounded laws: growth of q_r/p_r and Hbar/Fbar, the two product
// bounds against the truncated first moment, and the quadratic ratios against
// 2/sigma^2 (0 when sigma^2 is infinite).
RatioReport critical_bounds_report(const OffspringDistribution& d, std::int64_t r_lo, std::int64_t r_hi);
RatioReport critical_bounds_report(const OffspringDistribution& d, const global::GlobalLaw& law,
                                   std::int64_t r_lo, std::int64_t r_hi);

// Supercritical unbounded laws with p_0 > 0: Hbar(r) against 1 - q, and the
// extinction-conditioned pmf comparison q p_r q^{r-1} / q_r against 1 - G'(q).
// (The conditioned-on-extinction tree is a subcritical tree with offspring
// pmf p_k q^{k-1}, whose pmf-ratio law supplies the constant; the factor q
// converts the conditional pmf back to q_r.)
RatioReport supercritical_limits_report(const OffspringDistribution& d, std::int64_t r_lo,
                                        std::int64_t r_hi);
RatioReport supercritical_limits_report(const OffspringDistribution& d, const global::GlobalLaw& law,
                                        std::int64_t r_lo, std::int64_t r_hi);

// sum_{i>r} i p_i = mu - G_r'(1); analytic per family.
double truncated_first_moment(const OffspringDistribution& d, std::int64_t r);

}  // namespace gwmaxdeg::asymptotics
