#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "gwmaxdeg/errors.hpp"
#include "gwmaxdeg/offspring.hpp"
#include "oracles.hpp"

using namespace gwmaxdeg;

namespace {

const double kZeta3 = 1.2020569031595942854;  // zeta(3)
const double kZeta2 = 1.6449340668482264365;  // zeta(2) = pi^2/6

OffspringDistribution binary_critical() {
    return OffspringDistribution::build(OffspringSpec::explicit_pmf({0.5, 0.0, 0.5}));
}

}  // namespace

TEST_CASE("build: explicit binary critical law") {
    const auto d = binary_critical();
    CHECK(d.criticality() == Criticality::Critical);
    CHECK(d.mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.variance() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.bounded());
    CHECK(d.support_max() == 2);
}

TEST_CASE("build: geometric closed-form mean and variance") {
    const auto d = OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0));
    CHECK(d.criticality() == Criticality::Subcritical);
    CHECK(d.mean() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.variance() == doctest::Approx(0.75).epsilon(1e-13));
    CHECK_FALSE(d.bounded());

    const auto crit = OffspringDistribution::build(OffspringSpec::geometric(0.5));
    CHECK(crit.criticality() == Criticality::Critical);
    CHECK(crit.mean() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("build: critical power law alpha = 3") {
    const auto d = OffspringDistribution::build(OffspringSpec::critical_power_law(3.0));
    CHECK(d.criticality() == Criticality::Critical);
    CHECK(d.mean() == 1.0);
    CHECK(std::isinf(d.variance()));
    CHECK_FALSE(d.second_factorial_moment_finite());

    const double c = 1.0 / kZeta2;
    CHECK(d.p(0) == doctest::Approx(1.0 - c * kZeta3).epsilon(1e-12));
    CHECK(d.p(1) == doctest::Approx(c).epsilon(1e-12));
    CHECK(d.p(10) == doctest::Approx(c / 1000.0).epsilon(1e-12));

    // independent mean check: direct summation plus an integral bracket
    const std::int64_t N = 400000;
    long double s = 0.0L;
    for (std::int64_t k = N; k >= 1; --k) s += static_cast<long double>(d.p(k)) * k;
    const long double rem_lo = c / static_cast<long double>(N + 1);
    const long double rem_hi = c / static_cast<long double>(N);
    CHECK(static_cast<double>(s + rem_lo) <= 1.0 + 1e-9);
    CHECK(static_cast<double>(s + rem_hi) >= 1.0 - 1e-9);
}

TEST_CASE("build: rejects invalid parameters") {
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::poisson(-1.0)), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::poisson(0.0)), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::geometric(1.0)), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::geometric(0.0)), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::critical_power_law(2.0)), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::explicit_pmf({0.5, 0.4})), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::explicit_pmf({0.5, -0.1, 0.6})),
                    SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::explicit_pmf({1.0})), SpecError);
    CHECK_THROWS_AS(OffspringDistribution::build(OffspringSpec::explicit_pmf({0.0, 1.0})), SpecError);
}

TEST_CASE("family string parsing") {
    const auto g = OffspringSpec::parse("geometric:0.3333333");
    CHECK(g.family == Family::Geometric);
    CHECK(g.param == doctest::Approx(0.3333333));
    const auto e = OffspringSpec::parse("explicit:0.5,0,0.5");
    CHECK(e.pmf.size() == 3);
    CHECK_THROWS_AS(OffspringSpec::parse("cauchy:1"), SpecError);
    CHECK_THROWS_AS(OffspringSpec::parse("poisson:abc"), SpecError);
}

TEST_CASE("pgf: point values") {
    const auto b = binary_critical();
    CHECK(b.pgf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.pgf(0.5) == doctest::Approx(0.625).epsilon(1e-15));  // 1/2 + (1/2)(1/4)

    const auto g = OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0));
    CHECK(g.pgf(0.5) == doctest::Approx(0.8).epsilon(1e-14));  // (2/3)/(5/6)
    CHECK_THROWS_AS(b.pgf(1.5), SpecError);
    CHECK_THROWS_AS(b.pgf(-0.1), SpecError);
}

TEST_CASE("pgf_truncated: point values") {
    const auto b = binary_critical();
    for (double x : {0.0, 0.3, 0.9, 1.0}) CHECK(b.pgf_truncated(1, x) == 0.5);  // G_1 = p_0
    CHECK(b.pgf_truncated(2, 1.0) == doctest::Approx(1.0).epsilon(1e-15));

    const auto g = OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0));
    CHECK(g.pgf_truncated(0, 0.9) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(g.pgf_truncated(-1, 0.5) == 0.0);
}

TEST_CASE("pgf_derivative: moments at 1 and truncated sums") {
    const auto b = binary_critical();
    CHECK(b.pgf_derivative(std::nullopt, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    // sum k(k-1) p_k = 2 * 1 * 0.5 = 1 for the binary law
    CHECK(b.pgf_derivative(std::nullopt, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(b.pgf_derivative(std::nullopt, 1.0, 3), SpecError);

    const auto g = OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0));
    long double direct = 0.0L;
    for (int k = 0; k <= 5; ++k) direct += static_cast<long double>(k) * g.p(k);
    CHECK(g.pgf_derivative(5, 1.0, 1) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-14));

    const auto p = OffspringDistribution::build(OffspringSpec::critical_power_law(3.0));
    CHECK(std::isinf(p.pgf_derivative(std::nullopt, 1.0, 2)));
}

TEST_CASE("extinction probability") {
    CHECK(binary_critical().extinction_probability() == 1.0);
    CHECK(OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0)).extinction_probability() ==
          1.0);

    // closed-form quadratic root of (3/4)t^2 - t + 1/4 = 0
    const auto s = OffspringDistribution::build(OffspringSpec::explicit_pmf({0.25, 0.0, 0.75}));
    CHECK(s.extinction_probability() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    const auto pois = OffspringDistribution::build(OffspringSpec::poisson(1.5));
    const long double q_oracle =
        oracle::fixed_point_iteration([](long double t) { return expl(1.5L * (t - 1.0L)); });
    CHECK(pois.extinction_probability() ==
          doctest::Approx(static_cast<double>(q_oracle)).epsilon(1e-11));
    CHECK(pois.extinction_probability() == doctest::Approx(0.4172).epsilon(2e-4));

    // p_0 = 0 supercritical: smallest root is 0
    const auto z = OffspringDistribution::build(OffspringSpec::explicit_pmf({0.0, 0.5, 0.0, 0.5}));
    CHECK(z.extinction_probability() == 0.0);
}

TEST_CASE("tails and truncated first moments") {
    const auto g = OffspringDistribution::build(OffspringSpec::geometric(1.0 / 3.0));
    // spec example: closed-form tail moment vs direct summation at r = 5
    long double direct = 0.0L;
    for (int k = 6; k <= 200; ++k) direct += static_cast<long double>(k) * g.p(k);
    CHECK(g.tail_first_moment(5) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
    CHECK(g.tail_first_moment(-1) == doctest::Approx(g.mean()).epsilon(1e-14));

    const auto b = binary_critical();
    CHECK(b.tail_first_moment(-1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.tail_first_moment(2) == 0.0);
    CHECK(b.tail_first_moment(5) == 0.0);

    const auto pois = OffspringDistribution::build(OffspringSpec::poisson(0.8));
    long double dp = 0.0L;
    for (int k = 4; k <= 80; ++k) dp += static_cast<long double>(k) * pois.p(k);
    CHECK(pois.tail_first_moment(3) == doctest::Approx(static_cast<double>(dp)).epsilon(1e-12));

    const auto pl = OffspringDistribution::build(OffspringSpec::critical_power_law(3.0));
    long double dl = 0.0L;
    for (int k = 11; k <= 2000000; ++k) dl += static_cast<long double>(k) * pl.p(k);
    // direct sum is missing ~c/2e6 of mass; compare loosely plus bracket
    CHECK(pl.tail_first_moment(10) > static_cast<double>(dl));
    CHECK(pl.tail_first_moment(10) == doctest::Approx(static_cast<double>(dl)).epsilon(1e-5));
}

TEST_CASE("zeta tail helper") {
    CHECK(riemann_zeta(2.0) == doctest::Approx(kZeta2).epsilon(1e-13));
    CHECK(riemann_zeta(3.0) == doctest::Approx(kZeta3).epsilon(1e-13));
    long double direct = 0.0L;
    for (int k = 2500; k >= 37; --k) direct += powl(static_cast<long double>(k), -2.5L);
    direct += /* tail beyond 2500, crude integral bracket midpoint */
        (powl(2500.5L, -1.5L) / 1.5L);
    CHECK(zeta_tail(2.5, 37.0) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-9));
}

TEST_CASE("power_exp_tail vs direct summation") {
    long double direct = 0.0L;
    for (int k = 60000; k > 1000; --k)
        direct += powl(static_cast<long double>(k), -3.0L) * expl(-0.001L * k);
    CHECK(power_exp_tail(3.0, 0.001, 1000.0) ==
          doctest::Approx(static_cast<double>(direct)).epsilon(1e-10));
}

TEST_CASE("complement maps agree with the direct pgf") {
    for (const auto& spec :
         {OffspringSpec::explicit_pmf({0.5, 0.0, 0.5}), OffspringSpec::geometric(1.0 / 3.0),
          OffspringSpec::geometric(0.5), OffspringSpec::poisson(1.5),
          OffspringSpec::critical_power_law(3.0)}) {
        const auto d = OffspringDistribution::build(spec);
        for (double s : {0.0, 1e-6, 1e-3, 0.25, 0.9, 1.0}) {
            CHECK(std::abs((1.0 - d.pgf_complement(s)) - d.pgf(1.0 - s)) <= 1e-12);
            for (std::int64_t r : {0, 1, 3, 17})
                CHECK(std::abs((1.0 - d.pgf_truncated_complement(r, s)) - d.pgf_truncated(r, 1.0 - s)) <=
                      1e-12);
        }
        // deep tail: complement keeps relative accuracy where 1 - pgf cannot
        const double tiny = 1e-12;
        const double psi = d.pgf_complement(tiny);
        CHECK(psi == doctest::Approx(d.mean() * tiny).epsilon(1e-3));
    }
}

TEST_CASE("property: pgf family invariants on random laws") {
    std::mt19937_64 gen(20240817);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        OffspringSpec spec;
        const int kind = trial % 3;
        if (kind == 0) {
            std::vector<double> p(2 + static_cast<std::size_t>(gen() % 7));
            double total = 0.0;
            for (auto& v : p) total += (v = unif(gen));
            for (auto& v : p) v /= total;
            spec = OffspringSpec::explicit_pmf(p);
        } else if (kind == 1) {
            spec = OffspringSpec::geometric(0.05 + 0.9 * unif(gen));
        } else {
            spec = OffspringSpec::poisson(0.1 + 3.0 * unif(gen));
        }
        OffspringDistribution d = OffspringDistribution::build(spec);

        // mean via derivative
        CHECK(std::abs(d.pgf_derivative(std::nullopt, 1.0, 1) - d.mean()) <= 1e-10);
        // extinction fixed point
        const double q = d.extinction_probability();
        CHECK(std::abs(d.pgf(q) - q) <= 1e-12);
        // monotonicity and domination on a grid
        double prev_x = -1.0;
        for (double x = 0.0; x <= 1.0000001; x += 0.2) {
            const double xx = std::min(x, 1.0);
            const double g = d.pgf(xx);
            CHECK(g >= prev_x - 1e-15);
            prev_x = g;
            double prev_r = -1.0;
            for (std::int64_t r : {0, 1, 2, 4, 8, 16}) {
                const double gr = d.pgf_truncated(r, xx);
                CHECK(gr <= g + 1e-13);
                CHECK(gr >= prev_r - 1e-15);
                prev_r = gr;
            }
        }
        // normalization split
        for (std::int64_t r : {0, 1, 5, 20}) CHECK(std::abs(d.cdf(r) + d.tail(r) - 1.0) <= 1e-12);
        // bounded laws: truncation at the support max is the full pgf, exactly
        if (d.bounded())
            for (double x : {0.0, 0.37, 1.0}) CHECK(d.pgf_truncated(d.support_max(), x) == d.pgf(x));
    }
}
