#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gwmaxdeg {

enum class Family { Explicit, Geometric, Poisson, CriticalPowerLaw };
enum class Criticality { Subcritical, Critical, Supercritical };

const char* to_string(Criticality c);

// Parametric description of an offspring law. Families:
//   explicit:     pmf given outright (entries >= 0, sum to 1 within 1e-12)
//   geometric(a): p_k = (1-a) a^k, a in (0,1)
//   poisson(l):   rate l > 0
//   power(alpha): p_k = k^-alpha / zeta(alpha-1) for k >= 1, alpha > 2,
//                 p_0 absorbs the remaining mass; mean is 1 by construction
struct OffspringSpec {
    Family family = Family::Explicit;
    std::vector<double> pmf;  // Explicit only
    double param = 0.0;       // ratio / rate / exponent
    double tail_tolerance = 1e-14;

    static OffspringSpec explicit_pmf(std::vector<double> p, double tol = 1e-14);
    static OffspringSpec geometric(double ratio, double tol = 1e-14);
    static OffspringSpec poisson(double rate, double tol = 1e-14);
    static OffspringSpec critical_power_law(double exponent, double tol = 1e-14);

    // Shell syntax "name:param" or "explicit:p0,p1,..."; throws SpecError.
    static OffspringSpec parse(const std::string& text, double tol = 1e-14);

    std::string describe() const;
};

// Immutable after build; shares safely across threads. Infinite supports are
// materialized at construction up to the point where the residual tail mass
// falls below tail_tolerance; probabilities beyond the prefix come from the
// family closed form, so any requested prefix is exact.
class OffspringDistribution {
public:
    static OffspringDistribution build(const OffspringSpec& spec);

    const OffspringSpec& spec() const { return spec_; }
    std::string describe() const { return spec_.describe(); }

    double p(std::int64_t k) const;     // pmf
    double cdf(std::int64_t r) const;   // F(r), F(-1) = 0
    double tail(std::int64_t r) const;  // Fbar(r), keeps relative accuracy deep in the tail

    double mean() const { return mean_; }
    double variance() const { return variance_; }  // +inf is a legal value
    Criticality criticality() const { return criticality_; }
    bool bounded() const { return bounded_; }
    std::int64_t support_max() const { return support_max_; }  // bounded() only
    bool analytic_tail() const { return analytic_tail_; }
    double tail_tolerance() const { return spec_.tail_tolerance; }

    // sum_{i>r} i p_i; closed form for geometric/poisson, zeta tails for the
    // power law, exact suffix sums for explicit pmfs. r = -1 gives the mean.
    double tail_first_moment(std::int64_t r) const;

    bool second_factorial_moment_finite() const { return second_fact_finite_; }
    double second_factorial_moment() const;  // sum k(k-1) p_k, may be +inf

    double pgf(double x) const;                            // G(x)
    double pgf_truncated(std::int64_t r, double x) const;  // G_r(x); r = -1 -> 0
    // Sum_{k<=trunc} k p_k x^{k-1} (order 1) or k(k-1) p_k x^{k-2} (order 2);
    // no truncation means the full series. May return +inf at x = 1.
    double pgf_derivative(std::optional<std::int64_t> truncation, double x, int order) const;

    // Complement maps evaluated natively in s = 1 - x, preserving relative
    // accuracy for s near 0:  psi(s) = 1 - G(1-s),  phi_r(s) = 1 - G_r(1-s).
    double pgf_complement(double s) const;
    double pgf_truncated_complement(std::int64_t r, double s) const;
    // d/ds [1 - G_r(1-s)] = G_r'(1-s), and the pair (value, derivative).
    double pgf_truncated_complement_derivative(std::int64_t r, double s) const;
    void pgf_truncated_complement_pair(std::int64_t r, double s, double& value, double& derivative) const;

    // Smallest fixed point of G on [0,1]; 1 for (sub)critical laws.
    double extinction_probability() const { return extinction_; }

    std::span<const double> pmf_prefix() const { return pmf_; }

private:
    OffspringDistribution() = default;

    double explicit_suffix(std::int64_t r) const;
    double power_law_series(double s_exponent, double x) const;  // sum_{k>=1} k^-s x^k

    OffspringSpec spec_;
    std::vector<double> pmf_;            // materialized prefix
    std::vector<double> suffix_;         // Explicit: exact suffix sums of p
    std::vector<double> suffix_moment_;  // Explicit: suffix sums of k p_k
    double mean_ = 0.0;
    double variance_ = 0.0;
    double second_fact_ = 0.0;
    bool second_fact_finite_ = true;
    Criticality criticality_ = Criticality::Critical;
    bool bounded_ = false;
    std::int64_t support_max_ = 0;
    bool analytic_tail_ = false;
    double power_c_ = 0.0;  // power-law normalization 1/zeta(alpha-1)
    double extinction_ = 1.0;
};

// sum_{k>=m} k^-s for s > 1, m >= 1: direct part plus Euler-Maclaurin closure.
double zeta_tail(double s, double m);
inline double riemann_zeta(double s) { return zeta_tail(s, 1.0); }

// sum_{k>m} k^-s e^{-beta k} for s > 1, beta >= 0.
double power_exp_tail(double s, double beta, double m);

}  // namespace gwmaxdeg
