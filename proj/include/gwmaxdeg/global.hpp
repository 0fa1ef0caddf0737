#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwmaxdeg/exact.hpp"
#include "gwmaxdeg/offspring.hpp"

namespace gwmaxdeg::global {

struct SolveDiagnostics {
    int iterations = 0;
    double residual = 0.0;  // |G_r(q) - q| at the returned point
};

// P[M > r]: the smallest root of s = 1 - G_r(1-s), solved natively in the
// tail variable. Equivalent to the largest fixed point of G_r on [0,1] in
// the cdf variable, which is the monotone limit of P[M_{[0,n]} <= r].
double global_tail(const OffspringDistribution& d, std::int64_t r);
double global_tail(const OffspringDistribution& d, std::int64_t r, SolveDiagnostics& diag);

double global_cdf(const OffspringDistribution& d, std::int64_t r);   // q_{[0,r]}
double global_pmf(const OffspringDistribution& d, std::int64_t r);   // q_r, clipped at 0

// Mass of {M = inf}: 0 for (sub)critical or bounded supercritical laws with
// p_0 > 0; 1 - q for unbounded supercritical laws with p_0 > 0; 1 when the
// law is supercritical with p_0 = 0 (the smallest root of G(t) = t is 0).
double infinite_mass(const OffspringDistribution& d);

struct GlobalLaw {
    struct Row {
        std::int64_t r = 0;
        double cdf = 0, pmf = 0, tail = 0;
        int iterations = 0;
        double residual = 0;
    };
    std::vector<Row> rows;
    double limit_mass_at_infinity = 0;
    std::string dist_description;

    exact::DistTable to_dist_table() const;
};

GlobalLaw compute_law(const OffspringDistribution& d, std::int64_t r_max);

}  // namespace gwmaxdeg::global
