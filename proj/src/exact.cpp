#include "gwmaxdeg/exact.hpp"

#include <algorithm>

#include "gwmaxdeg/errors.hpp"

namespace gwmaxdeg::exact {

namespace {

// Right fold of truncated pgfs over the cap list, starting from 1.
// Values are clamped to 1: an explicit pmf may legitimately sum to 1 + 1e-12
// and must not knock the next argument out of the pgf domain.
double compose_truncated(const OffspringDistribution& d, std::span<const std::int64_t> caps) {
    double v = 1.0;
    for (std::size_t i = caps.size(); i-- > 0;) v = std::min(d.pgf_truncated(caps[i], v), 1.0);
    return v;
}

// Complement-variable composition for one segment list. A segment is
// `full` applications of psi followed by phi_{cap} (cap = -2 means none).
struct Segment {
    std::int64_t full = 0;
    std::int64_t cap = -2;
};

double compose_complement(const OffspringDistribution& d, std::span<const Segment> segs, double s0) {
    // segments are listed outermost-first, so apply them innermost-last:
    // value = psi^{f_0} phi_{c_0} psi^{f_1} phi_{c_1} ... (s0)
    double s = s0;
    for (std::size_t i = segs.size(); i-- > 0;) {
        if (segs[i].cap >= -1) s = d.pgf_truncated_complement(segs[i].cap, s);
        for (std::int64_t j = 0; j < segs[i].full; ++j) s = d.pgf_complement(s);
    }
    return s;
}

void check_horizon(std::int64_t n) {
    if (n < 0) throw SpecError("generation index must be >= 0");
}

}  // namespace

double finite_dim_cdf(const OffspringDistribution& d, std::span<const std::int64_t> caps) {
    if (caps.empty()) throw SpecError("finite_dim_cdf requires at least one cap");
    for (auto c : caps)
        if (c < 0) throw SpecError("caps must be >= 0");
    return compose_truncated(d, caps);
}

double generation_cdf(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < 0) throw SpecError("r must be >= 0");
    double v = std::min(d.pgf_truncated(r, 1.0), 1.0);
    for (std::int64_t i = 0; i < n; ++i) v = std::min(d.pgf(v), 1.0);
    return v;
}

double generation_tail(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < -1) throw SpecError("r must be >= -1");
    double s = r < 0 ? 1.0 : d.tail(r);
    for (std::int64_t i = 0; i < n; ++i) s = d.pgf_complement(s);
    return s;
}

double generation_pmf(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < 0) throw SpecError("r must be >= 0");
    return generation_tail(d, n, r - 1) - generation_tail(d, n, r);
}

double local_cdf(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < 0) throw SpecError("r must be >= 0");
    std::vector<std::int64_t> caps(static_cast<std::size_t>(n) + 1, r);
    return compose_truncated(d, caps);
}

double local_tail(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < -1) throw SpecError("r must be >= -1");
    if (r < 0) return 1.0;
    double s = 0.0;
    for (std::int64_t i = 0; i <= n; ++i) s = d.pgf_truncated_complement(r, s);
    return s;
}

double local_pmf(const OffspringDistribution& d, std::int64_t n, std::int64_t r) {
    check_horizon(n);
    if (r < 0) throw SpecError("r must be >= 0");
    return local_tail(d, n, r - 1) - local_tail(d, n, r);
}

double joint_union_prob(const OffspringDistribution& d, std::span<const GenerationCap> caps) {
    if (caps.empty()) throw SpecError("joint_union_prob requires at least one (generation, cap) pair");
    for (std::size_t i = 0; i < caps.size(); ++i) {
        if (caps[i].generation < 0) throw SpecError("generation indices must be >= 0");
        if (i && caps[i].generation <= caps[i - 1].generation)
            throw SpecError("generation indices must be strictly increasing");
        if (caps[i].cap < 1) throw SpecError("joint caps must be >= 1 (decremented composition)");
    }

    std::vector<Segment> segs(caps.size());
    std::int64_t prev = -1;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        segs[i].full = caps[i].generation - prev - 1;
        segs[i].cap = caps[i].cap;
        prev = caps[i].generation;
    }

    const double s_hi = compose_complement(d, segs, 0.0);  // 1 - C(caps)
    for (auto& seg : segs) seg.cap -= 1;
    const double s_lo = compose_complement(d, segs, 0.0);  // 1 - C(caps - 1)
    double v = s_lo - s_hi;
    return std::clamp(v, 0.0, 1.0);
}

namespace {

DistTable build_table(const OffspringDistribution& d, DistTable::Target target, std::int64_t n,
                      std::int64_t r_max) {
    check_horizon(n);
    if (r_max < 0) throw SpecError("r_max must be >= 0");
    DistTable t;
    t.target = target;
    t.horizon = n;
    t.dist_description = d.describe();
    t.rows.resize(static_cast<std::size_t>(r_max) + 1);

    // One complement chain per r; tails are clamped nonincreasing so cdf and
    // pmf columns come out monotone by construction.
    std::vector<double> tails(static_cast<std::size_t>(r_max) + 1);
    double anchor;  // tail at r = -1
    if (target == DistTable::Target::Generation) {
        anchor = generation_tail(d, n, -1);
        for (std::int64_t r = 0; r <= r_max; ++r)
            tails[static_cast<std::size_t>(r)] = generation_tail(d, n, r);
    } else {
        anchor = 1.0;
        for (std::int64_t r = 0; r <= r_max; ++r)
            tails[static_cast<std::size_t>(r)] = local_tail(d, n, r);
    }
    double prev = anchor;
    t.cdf_at_minus1 = 1.0 - anchor;
    for (std::int64_t r = 0; r <= r_max; ++r) {
        auto& row = t.rows[static_cast<std::size_t>(r)];
        double s = std::min(tails[static_cast<std::size_t>(r)], prev);
        row.r = r;
        row.tail = s;
        row.cdf = 1.0 - s;
        row.pmf = prev - s;
        prev = s;
    }
    return t;
}

}  // namespace

DistTable generation_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_max) {
    return build_table(d, DistTable::Target::Generation, n, r_max);
}

DistTable local_table(const OffspringDistribution& d, std::int64_t n, std::int64_t r_max) {
    return build_table(d, DistTable::Target::Local, n, r_max);
}

}  // namespace gwmaxdeg::exact
