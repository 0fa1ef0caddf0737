#include "gwmaxdeg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwmaxdeg/accumulate.hpp"
#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/exact.hpp"

namespace gwmaxdeg::asymptotics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBoundSlack = 1e-12;
constexpr double kSubnormalGuard = 1e-290;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_range(std::int64_t r_lo, std::int64_t r_hi) {
    if (r_lo < 0 || r_hi < r_lo) throw SpecError("invalid r range");
}

// pmf cell (r) is trusted when the differenced tails resolve it:
// parent tail above the subnormal guard and the difference above 64 ulp of it.
bool pmf_trusted(double parent_tail, double pmf, double p_r) {
    return p_r > 0.0 && parent_tail > kSubnormalGuard && pmf > 64.0 * kEps * parent_tail;
}

struct WindowStats {
    std::int64_t begin = -1, end = -1, floor_r = -1;
};

double sum_mu_powers(double mu, std::int64_t n) {
    CompensatedSum acc;
    double w = 1.0;
    for (std::int64_t i = 0; i <= n; ++i) {
        acc.add(w);
        w *= mu;
    }
    return acc.value();
}

// Shared builder for the generation/local tables. `tails[j]` holds the tail
// value at r = r_lo - 1 + j over j = 0..(r_hi - r_lo + 1).
RatioReport build_exact_report(const OffspringDistribution& d, const std::vector<double>& tails,
                               std::int64_t r_lo, std::int64_t r_hi, double constant,
                               const char* regime, const char* constant_desc) {
    RatioReport rep;
    rep.regime = regime;
    rep.constant_desc = constant_desc;
    rep.constant = constant;
    rep.tail_constant = constant;

    WindowStats win;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        const std::size_t j = static_cast<std::size_t>(r - r_lo);
        const double parent = tails[j];
        const double here = tails[j + 1];
        const double pmf = parent - here;
        const double pr = d.p(r);
        const double allowed = constant * pr + kBoundSlack;
        const bool ok = pmf <= allowed;
        if (!ok) rep.any_bound_violation = true;

        if (pmf_trusted(parent, pmf, pr)) {
            if (win.begin < 0) win.begin = r;
            win.end = win.floor_r = r;
            RatioRow row{r, pmf, pr, pmf / (pr * constant), ok};
            rep.rows.push_back(row);
            rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(row.ratio - 1.0));
        }

        const double fbar = d.tail(r);
        const bool tail_ok = here <= constant * fbar + kBoundSlack;
        if (!tail_ok) rep.any_bound_violation = true;
        if (fbar > kSubnormalGuard && here > kSubnormalGuard) {
            RatioRow row{r, here, fbar, here / (fbar * constant), tail_ok};
            rep.tail_rows.push_back(row);
            rep.max_tail_ratio_deviation =
                std::max(rep.max_tail_ratio_deviation, std::abs(row.ratio - 1.0));
        }
    }
    rep.window_begin = win.begin;
    rep.window_end = win.end;
    rep.precision_floor_r = win.floor_r;
    if (rep.rows.empty())
        throw NumericError("empty trusted window: precision floor sits below the requested range");
    return rep;
}

}  // namespace

double truncated_first_moment(const OffspringDistribution& d, std::int64_t r) {
    return d.tail_first_moment(r);
}

RatioReport generation_ratio_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_lo,
                                   std::int64_t r_hi) {
    check_range(r_lo, r_hi);
    if (n < 0) throw SpecError("horizon must be >= 0");
    std::vector<double> tails(static_cast<std::size_t>(r_hi - r_lo) + 2);
    for (std::int64_t r = r_lo - 1; r <= r_hi; ++r)
        tails[static_cast<std::size_t>(r - r_lo + 1)] = exact::generation_tail(d, n, r);
    const double constant = std::pow(d.mean(), static_cast<double>(n));
    return build_exact_report(d, tails, r_lo, r_hi, constant, "generation", "mu^n");
}

RatioReport local_ratio_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_lo,
                              std::int64_t r_hi) {
    check_range(r_lo, r_hi);
    if (n < 0) throw SpecError("horizon must be >= 0");
    std::vector<double> tails(static_cast<std::size_t>(r_hi - r_lo) + 2);
    for (std::int64_t r = r_lo - 1; r <= r_hi; ++r)
        tails[static_cast<std::size_t>(r - r_lo + 1)] = exact::local_tail(d, n, r);
    const double constant = sum_mu_powers(d.mean(), n);
    return build_exact_report(d, tails, r_lo, r_hi, constant, "local", "1+mu+...+mu^n");
}

RatioReport subcritical_global_ratio_table(const OffspringDistribution& d, const global::GlobalLaw& law,
                                           std::int64_t r_lo, std::int64_t r_hi) {
    check_range(r_lo, r_hi);
    if (d.criticality() != Criticality::Subcritical || d.bounded())
        throw SpecError("regime mismatch: subcritical table requires a subcritical unbounded law");
    if (static_cast<std::int64_t>(law.rows.size()) <= r_hi)
        throw SpecError("global law table too short for requested range");

    RatioReport rep;
    rep.regime = "subcritical-global";
    rep.constant_desc = "1-mu";
    rep.constant = rep.tail_constant = 1.0 - d.mean();

    WindowStats win;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        const auto& row = law.rows[static_cast<std::size_t>(r)];
        const double parent = r == 0 ? 1.0 : law.rows[static_cast<std::size_t>(r - 1)].tail;
        const double qr = row.pmf;
        const double pr = d.p(r);
        if (pmf_trusted(parent, qr, pr)) {
            if (win.begin < 0) win.begin = r;
            win.end = win.floor_r = r;
            RatioRow out{r, pr, qr, pr / (qr * rep.constant), true};
            rep.rows.push_back(out);
            rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(out.ratio - 1.0));
        }
        const double fbar = d.tail(r);
        if (row.tail > kSubnormalGuard && fbar > kSubnormalGuard) {
            RatioRow out{r, fbar, row.tail, fbar / (row.tail * rep.tail_constant), true};
            rep.tail_rows.push_back(out);
            rep.max_tail_ratio_deviation =
                std::max(rep.max_tail_ratio_deviation, std::abs(out.ratio - 1.0));
        }
    }
    rep.window_begin = win.begin;
    rep.window_end = win.end;
    rep.precision_floor_r = win.floor_r;
    if (rep.rows.empty())
        throw NumericError("empty trusted window: precision floor sits below the requested range");
    return rep;
}

RatioReport subcritical_global_ratio_table(const OffspringDistribution& d, std::int64_t r_lo,
                                           std::int64_t r_hi) {
    return subcritical_global_ratio_table(d, global::compute_law(d, r_hi), r_lo, r_hi);
}

RatioReport critical_bounds_report(const OffspringDistribution& d, const global::GlobalLaw& law,
                                   std::int64_t r_lo, std::int64_t r_hi) {
    check_range(r_lo, r_hi);
    if (d.criticality() != Criticality::Critical || d.bounded())
        throw SpecError("regime mismatch: critical report requires a critical unbounded law");
    if (static_cast<std::int64_t>(law.rows.size()) <= r_hi)
        throw SpecError("global law table too short for requested range");

    RatioReport rep;
    rep.regime = "critical";
    rep.constant_desc = "q_r/p_r -> infinity; limsup q_r^2/p_r <= 2/sigma^2";
    rep.constant = rep.tail_constant = kInf;
    rep.quad_target = std::isinf(d.variance()) ? 0.0 : 2.0 / d.variance();

    // The quadratic ratios ride on the curvature balance s^2 G''/2 of the
    // fixed-point equation; its resolution dies once eps * E[k^2] approaches
    // the local slope |phi'(s*) - 1|. Gate those rows on the estimated
    // relative solve error, or the deep-critical window reports pure noise.
    auto quad_resolvable = [&](std::int64_t r, double s) {
        if (!(s > 0.0)) return false;
        double phi, dphi;
        d.pgf_truncated_complement_pair(r, s, phi, dphi);
        const double slope = std::max(std::abs(dphi - 1.0), 1e-300);
        const double weight = 2.0 + d.pgf_derivative(r, 1.0, 2) + d.mean();
        return 2.0 * kEps * weight / slope <= 0.02;
    };

    WindowStats win;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        const auto& row = law.rows[static_cast<std::size_t>(r)];
        const double parent = r == 0 ? 1.0 : law.rows[static_cast<std::size_t>(r - 1)].tail;
        const double qr = row.pmf;
        const double pr = d.p(r);
        const double tfm = d.tail_first_moment(r);
        const double fbar = d.tail(r);

        const bool ok_pmf = qr * tfm <= pr + kBoundSlack;
        const bool ok_tail = row.tail * tfm <= fbar + kBoundSlack;
        if (!ok_pmf || !ok_tail) rep.any_bound_violation = true;

        const bool quad_ok_here = quad_resolvable(r, row.tail);
        if (pmf_trusted(parent, qr, pr)) {
            if (win.begin < 0) win.begin = r;
            win.end = win.floor_r = r;
            rep.rows.push_back(RatioRow{r, qr, pr, qr / pr, ok_pmf});
            if (quad_ok_here) rep.quad_rows.push_back(RatioRow{r, qr * qr, pr, qr * qr / pr, true});
        }
        if (row.tail > kSubnormalGuard && fbar > kSubnormalGuard) {
            rep.tail_rows.push_back(RatioRow{r, row.tail, fbar, row.tail / fbar, ok_tail});
            if (quad_ok_here)
                rep.quad_tail_rows.push_back(
                    RatioRow{r, row.tail * row.tail, fbar, row.tail * row.tail / fbar, true});
        }
    }
    rep.window_begin = win.begin;
    rep.window_end = win.end;
    rep.precision_floor_r = win.floor_r;
    if (rep.rows.empty())
        throw NumericError("empty trusted window: precision floor sits below the requested range");

    rep.growth_factor = rep.rows.back().ratio / rep.rows.front().ratio;
    rep.growth_ok = rep.growth_factor >= 10.0 && rep.rows.back().ratio > 5.0;
    if (!rep.tail_rows.empty())
        rep.tail_growth_factor = rep.tail_rows.back().ratio / rep.tail_rows.front().ratio;

    // limsup surrogate: running max over the last half of the trusted window
    auto limsup_check = [&](std::vector<RatioRow>& rows, double& limsup, bool& ok) {
        if (rows.empty()) return;
        const std::size_t half = rows.size() / 2;
        limsup = 0.0;
        for (std::size_t i = half; i < rows.size(); ++i) limsup = std::max(limsup, rows[i].ratio);
        const double allowance = rep.quad_target == 0.0 ? 0.01 : rep.quad_target * 1.05;
        ok = limsup <= allowance;
        for (std::size_t i = half; i < rows.size(); ++i)
            if (rows[i].ratio > allowance) rows[i].bound_ok = false;
    };
    limsup_check(rep.quad_rows, rep.quad_limsup, rep.quad_ok);
    limsup_check(rep.quad_tail_rows, rep.quad_tail_limsup, rep.quad_tail_ok);
    return rep;
}

RatioReport critical_bounds_report(const OffspringDistribution& d, std::int64_t r_lo, std::int64_t r_hi) {
    return critical_bounds_report(d, global::compute_law(d, r_hi), r_lo, r_hi);
}

RatioReport supercritical_limits_report(const OffspringDistribution& d, const global::GlobalLaw& law,
                                        std::int64_t r_lo, std::int64_t r_hi) {
    check_range(r_lo, r_hi);
    if (d.criticality() != Criticality::Supercritical || d.bounded() || d.p(0) == 0.0)
        throw SpecError(
            "regime mismatch: supercritical report requires an unbounded supercritical law with p_0 > 0");
    if (static_cast<std::int64_t>(law.rows.size()) <= r_hi)
        throw SpecError("global law table too short for requested range");

    const double q = d.extinction_probability();
    const double gpq = d.pgf_derivative(std::nullopt, q, 1);

    RatioReport rep;
    rep.regime = "supercritical";
    rep.constant_desc = "1-G'(q) (pmf, extinction-conditioned), 1-q (tail)";
    rep.constant = 1.0 - gpq;
    rep.tail_constant = 1.0 - q;

    const double logq = std::log(q);
    WindowStats win;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        const auto& row = law.rows[static_cast<std::size_t>(r)];
        const double parent = r == 0 ? 1.0 : law.rows[static_cast<std::size_t>(r - 1)].tail;
        const double qr = row.pmf;
        const double pr = d.p(r);
        if (pmf_trusted(parent, qr, pr)) {
            if (win.begin < 0) win.begin = r;
            win.end = win.floor_r = r;
            const double num = pr * std::exp(static_cast<double>(r) * logq);  // q * p_r q^{r-1}
            RatioRow out{r, num, qr, num / (qr * rep.constant), true};
            rep.rows.push_back(out);
            rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(out.ratio - 1.0));
        }
        RatioRow tail_out{r, row.tail, 1.0, row.tail / rep.tail_constant, true};
        rep.tail_rows.push_back(tail_out);
        rep.max_tail_ratio_deviation =
            std::max(rep.max_tail_ratio_deviation, std::abs(tail_out.ratio - 1.0));
    }
    rep.window_begin = win.begin;
    rep.window_end = win.end;
    rep.precision_floor_r = win.floor_r;
    if (rep.rows.empty())
        throw NumericError("empty trusted window: precision floor sits below the requested range");
    return rep;
}

RatioReport supercritical_limits_report(const OffspringDistribution& d, std::int64_t r_lo,
                                        std::int64_t r_hi) {
    return supercritical_limits_report(d, global::compute_law(d, r_hi), r_lo, r_hi);
}

}  // namespace gwmaxdeg::asymptotics
