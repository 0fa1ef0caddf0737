#include "gwmaxdeg/global.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/parallel.hpp"

namespace gwmaxdeg::global {

namespace {

// Solve g(s) = phi_r(s) - s = 0 for the smallest root in [0,1].
// g is concave with g(0) = Fbar(r) > 0 after the bounded-support early-out,
// so the crossing is unique; safeguarded Newton over a shrinking bracket,
// with functional iteration s <- phi_r(s) when Newton is unusable. The
// functional iterate from below is exactly the increasing limit of
// P[M_{[0,n]} > r], so every safeguard step stays on the correct root.
double solve_tail_root(const OffspringDistribution& d, std::int64_t r, SolveDiagnostics& diag) {
    const double fbar = d.tail(r);
    diag = SolveDiagnostics{};
    if (!(fbar > 0.0)) return 0.0;
    // p_0 = 0 with mass above the cap: G_r(t) <= t F(r) < t on (0,1], so the
    // only fixed point is t = 0 and every out-degree cap is a.s. exceeded.
    if (d.p(0) == 0.0) return 1.0;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double lo = 0.0, hi = 1.0;
    double s = fbar;  // first functional iterate from 0
    double best_s = s, best_abs = 1.0;
    const int cap = 20000;
    for (int it = 1; it <= cap; ++it) {
        double phi, dphi;
        d.pgf_truncated_complement_pair(r, s, phi, dphi);
        const double g = phi - s;
        const double ag = std::abs(g);
        diag.iterations = it;
        if (ag < best_abs) {
            best_abs = ag;
            best_s = s;
        }
        if (g > 0.0) lo = std::max(lo, s); else hi = std::min(hi, s);
        // residual floor scales with the root: g itself carries ~eps*s noise
        if (ag <= 8.0 * eps * s || hi - lo <= 4.0 * eps * s) {
            diag.residual = ag;
            return s;
        }
        const double slope = dphi - 1.0;  // g'(s)
        double next;
        if (slope < -1e-300) {
            next = s - g / slope;
        } else {
            next = phi;  // functional step
        }
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (it % 16 == 0) next = 0.5 * (lo + hi);  // guarantees bracket progress
        s = next;
    }
    if (best_abs <= 1e-12) {
        diag.residual = best_abs;
        return best_s;
    }
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "fixed-point solve for r=%lld did not converge: best iterate %.17g, residual %.3g",
                  static_cast<long long>(r), best_s, best_abs);
    throw NumericError(msg);
}

}  // namespace

double global_tail(const OffspringDistribution& d, std::int64_t r, SolveDiagnostics& diag) {
    if (r < 0) throw SpecError("r must be >= 0");
    return solve_tail_root(d, r, diag);
}

double global_tail(const OffspringDistribution& d, std::int64_t r) {
    SolveDiagnostics diag;
    return global_tail(d, r, diag);
}

double global_cdf(const OffspringDistribution& d, std::int64_t r) {
    return 1.0 - global_tail(d, r);
}

double global_pmf(const OffspringDistribution& d, std::int64_t r) {
    if (r < 0) throw SpecError("r must be >= 0");
    const double above = r == 0 ? 1.0 : global_tail(d, r - 1);
    const double here = global_tail(d, r);
    const double q = above - here;
    if (q < 0.0) {
        if (q < -1e-12) throw NumericError("global pmf came out negative beyond tolerance");
        return 0.0;
    }
    return q;
}

double infinite_mass(const OffspringDistribution& d) {
    if (d.criticality() != Criticality::Supercritical) return 0.0;
    if (d.p(0) == 0.0) return 1.0;
    if (d.bounded()) return 0.0;
    return 1.0 - d.extinction_probability();
}

exact::DistTable GlobalLaw::to_dist_table() const {
    exact::DistTable t;
    t.target = exact::DistTable::Target::Global;
    t.horizon = 0;
    t.dist_description = dist_description;
    t.rows.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        t.rows[i] = exact::DistTable::Row{rows[i].r, rows[i].cdf, rows[i].pmf, rows[i].tail};
    return t;
}

GlobalLaw compute_law(const OffspringDistribution& d, std::int64_t r_max) {
    if (r_max < 0) throw SpecError("r_max must be >= 0");
    GlobalLaw law;
    law.dist_description = d.describe();
    law.limit_mass_at_infinity = infinite_mass(d);
    law.rows.resize(static_cast<std::size_t>(r_max) + 1);

    parallel_for(r_max + 1, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
            SolveDiagnostics diag;
            const double s = solve_tail_root(d, r, diag);
            auto& row = law.rows[static_cast<std::size_t>(r)];
            row.r = r;
            row.tail = s;
            row.iterations = diag.iterations;
            row.residual = diag.residual;
        }
    });

    double prev = 1.0;
    for (auto& row : law.rows) {
        if (row.tail > prev) row.tail = prev;  // monotone clamp, at most ~ulp
        row.cdf = 1.0 - row.tail;
        row.pmf = prev - row.tail;
        prev = row.tail;
    }
    return law;
}

}  // namespace gwmaxdeg::global
