#include "gwmaxdeg/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gwmaxdeg/accumulate.hpp"
#include "gwmaxdeg/errors.hpp"

namespace gwmaxdeg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kPrefixCap = std::int64_t{1} << 23;
constexpr double kCriticalTie = 1e-12;

double format_param(double v, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%.17g", v);
    return v;
}

// 32-interval composite Simpson on [a,b].
template <class F>
double simpson(const F& f, double a, double b) {
    constexpr int n = 32;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Critical: return "critical";
        case Criticality::Supercritical: return "supercritical";
    }
    return "?";
}

double zeta_tail(double s, double m) {
    if (!(s > 1.0)) throw SpecError("zeta_tail requires exponent > 1");
    if (m < 1.0) m = 1.0;
    const double M = std::max(std::ceil(m), 64.0);
    CompensatedSum direct;
    for (double k = m; k < M; k += 1.0) direct.add(std::pow(k, -s));
    const double ms = std::pow(M, -s);
    double em = std::pow(M, 1.0 - s) / (s - 1.0) + 0.5 * ms + s * ms / M / 12.0;
    em -= s * (s + 1.0) * (s + 2.0) * ms / (M * M * M) / 720.0;
    em += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ms / (M * M * M * M * M) / 30240.0;
    direct.add(em);
    return direct.value();
}

double power_exp_tail(double s, double beta, double m) {
    if (beta <= 0.0) return zeta_tail(s, m + 1.0);
    const double M = std::floor(m) + 1.0;
    if (beta * M > 740.0) return 0.0;
    auto h = [s, beta](double t) { return std::pow(t, -s) * std::exp(-beta * t); };

    double integral = 0.0;
    double a = M;
    for (int i = 0; i < 1200; ++i) {
        if (beta * a > 740.0) break;
        if (s > 1.0 + 1e-12 && beta * a < 1e-14) {
            integral += std::pow(a, 1.0 - s) / (s - 1.0);
            break;
        }
        const double b = 2.0 * a;
        integral += simpson(h, a, b);
        if (beta * b > 60.0) break;
        a = b;
    }

    // Euler-Maclaurin closure at M: sum = integral + h/2 - h'/12 + h'''/720.
    const double hM = h(M);
    const double L1 = -s / M - beta;
    const double L2 = s / (M * M);
    const double L3 = -2.0 * s / (M * M * M);
    const double h1 = L1 * hM;
    const double h3 = (L3 + 3.0 * L1 * L2 + L1 * L1 * L1) * hM;
    return integral + 0.5 * hM - h1 / 12.0 + h3 / 720.0;
}

// ---------------------------------------------------------------------------
// OffspringSpec

OffspringSpec OffspringSpec::explicit_pmf(std::vector<double> p, double tol) {
    OffspringSpec s;
    s.family = Family::Explicit;
    s.pmf = std::move(p);
    s.tail_tolerance = tol;
    return s;
}

OffspringSpec OffspringSpec::geometric(double ratio, double tol) {
    OffspringSpec s;
    s.family = Family::Geometric;
    s.param = ratio;
    s.tail_tolerance = tol;
    return s;
}

OffspringSpec OffspringSpec::poisson(double rate, double tol) {
    OffspringSpec s;
    s.family = Family::Poisson;
    s.param = rate;
    s.tail_tolerance = tol;
    return s;
}

OffspringSpec OffspringSpec::critical_power_law(double exponent, double tol) {
    OffspringSpec s;
    s.family = Family::CriticalPowerLaw;
    s.param = exponent;
    s.tail_tolerance = tol;
    return s;
}

OffspringSpec OffspringSpec::parse(const std::string& text, double tol) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string() : text.substr(colon + 1);

    auto parse_double = [&](const std::string& t) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0' || !std::isfinite(v))
            throw SpecError("invalid numeric parameter '" + t + "' in family '" + text + "'");
        return v;
    };

    if (name == "geometric") return geometric(parse_double(args), tol);
    if (name == "poisson") return poisson(parse_double(args), tol);
    if (name == "power" || name == "power-law" || name == "critical-power-law")
        return critical_power_law(parse_double(args), tol);
    if (name == "explicit") {
        std::vector<double> p;
        std::size_t pos = 0;
        while (pos <= args.size()) {
            const auto comma = args.find(',', pos);
            const std::string tok = args.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (tok.empty()) throw SpecError("empty probability in '" + text + "'");
            p.push_back(parse_double(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return explicit_pmf(std::move(p), tol);
    }
    throw SpecError("unknown offspring family '" + name + "'");
}

std::string OffspringSpec::describe() const {
    char buf[64];
    switch (family) {
        case Family::Geometric:
            format_param(param, buf, sizeof buf);
            return std::string("geometric:") + buf;
        case Family::Poisson:
            format_param(param, buf, sizeof buf);
            return std::string("poisson:") + buf;
        case Family::CriticalPowerLaw:
            format_param(param, buf, sizeof buf);
            return std::string("critical-power-law:") + buf;
        case Family::Explicit: {
            std::string out = "explicit:";
            for (std::size_t i = 0; i < pmf.size(); ++i) {
                format_param(pmf[i], buf, sizeof buf);
                if (i) out += ',';
                out += buf;
            }
            return out;
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// build

OffspringDistribution OffspringDistribution::build(const OffspringSpec& spec) {
    if (!(spec.tail_tolerance > 0.0) || spec.tail_tolerance > 1e-3)
        throw SpecError("tail_tolerance must lie in (0, 1e-3]");

    OffspringDistribution d;
    d.spec_ = spec;
    const double tol = spec.tail_tolerance;

    switch (spec.family) {
        case Family::Explicit: {
            if (spec.pmf.empty()) throw SpecError("explicit pmf is empty");
            CompensatedSum total;
            for (double v : spec.pmf) {
                if (!(v >= 0.0) || !std::isfinite(v)) throw SpecError("explicit pmf entries must be >= 0");
                total.add(v);
            }
            if (std::abs(total.value() - 1.0) > 1e-12)
                throw SpecError("explicit pmf does not sum to 1 within 1e-12");
            d.pmf_ = spec.pmf;
            while (d.pmf_.size() > 1 && d.pmf_.back() == 0.0) d.pmf_.pop_back();
            d.bounded_ = true;
            d.support_max_ = static_cast<std::int64_t>(d.pmf_.size()) - 1;
            if (d.support_max_ == 0) throw SpecError("offspring mean is zero (p_0 = 1)");
            if (d.pmf_.size() == 2 && d.pmf_[0] == 0.0)
                throw SpecError("degenerate law p_1 = 1: every t is a fixed point of G_1");

            const std::size_t n = d.pmf_.size();
            d.suffix_.assign(n + 1, 0.0);
            d.suffix_moment_.assign(n + 1, 0.0);
            CompensatedSum sfx, sfxm;
            for (std::size_t j = n; j-- > 0;) {
                sfx.add(d.pmf_[j]);
                sfxm.add(static_cast<double>(j) * d.pmf_[j]);
                d.suffix_[j] = sfx.value();
                d.suffix_moment_[j] = sfxm.value();
            }
            CompensatedSum m1, m2;
            for (std::size_t k = 0; k < n; ++k) {
                m1.add(static_cast<double>(k) * d.pmf_[k]);
                m2.add(static_cast<double>(k) * static_cast<double>(k) * d.pmf_[k]);
            }
            d.mean_ = m1.value();
            d.variance_ = m2.value() - d.mean_ * d.mean_;
            d.second_fact_ = m2.value() - m1.value();
            d.analytic_tail_ = false;
            break;
        }
        case Family::Geometric: {
            const double a = spec.param;
            if (!(a > 0.0) || !(a < 1.0)) throw SpecError("geometric ratio must lie strictly inside (0,1)");
            const std::int64_t K =
                std::min<std::int64_t>(kPrefixCap, static_cast<std::int64_t>(std::ceil(std::log(tol) / std::log(a))) + 1);
            d.pmf_.resize(static_cast<std::size_t>(K) + 1);
            double pk = 1.0 - a;
            for (std::int64_t k = 0; k <= K; ++k, pk *= a) d.pmf_[static_cast<std::size_t>(k)] = pk;
            d.mean_ = a / (1.0 - a);
            d.variance_ = a / ((1.0 - a) * (1.0 - a));
            d.second_fact_ = 2.0 * a * a / ((1.0 - a) * (1.0 - a));
            d.analytic_tail_ = true;
            break;
        }
        case Family::Poisson: {
            const double lam = spec.param;
            if (!(lam > 0.0) || !std::isfinite(lam)) throw SpecError("poisson rate must be strictly positive");
            d.pmf_.push_back(std::exp(-lam));
            for (std::int64_t k = 1; k < kPrefixCap; ++k) {
                d.pmf_.push_back(d.pmf_.back() * lam / static_cast<double>(k));
                const double rho = lam / static_cast<double>(k + 1);
                if (static_cast<double>(k) > lam && rho < 0.5 && d.pmf_.back() * rho / (1.0 - rho) <= tol) break;
            }
            d.mean_ = lam;
            d.variance_ = lam;
            d.second_fact_ = lam * lam;
            d.analytic_tail_ = true;
            break;
        }
        case Family::CriticalPowerLaw: {
            const double alpha = spec.param;
            if (!(alpha > 2.0) || !std::isfinite(alpha)) throw SpecError("power-law exponent must be > 2");
            const double c = 1.0 / riemann_zeta(alpha - 1.0);
            d.power_c_ = c;
            // smallest K with c * zeta_tail(alpha, K+1) <= tol, prefix-capped
            double k0 = std::pow(c / ((alpha - 1.0) * tol), 1.0 / (alpha - 1.0));
            std::int64_t K = std::min<std::int64_t>(kPrefixCap, static_cast<std::int64_t>(std::ceil(k0)) + 2);
            while (K < kPrefixCap && c * zeta_tail(alpha, static_cast<double>(K + 1)) > tol) K = std::min(kPrefixCap, K * 2);
            d.pmf_.resize(static_cast<std::size_t>(K) + 1);
            d.pmf_[0] = 1.0 - c * riemann_zeta(alpha);
            for (std::int64_t k = 1; k <= K; ++k)
                d.pmf_[static_cast<std::size_t>(k)] = c * std::pow(static_cast<double>(k), -alpha);
            d.mean_ = 1.0;  // normalization: sum k p_k = c * zeta(alpha-1) = 1
            if (alpha > 3.0) {
                const double m2 = c * riemann_zeta(alpha - 2.0);
                d.variance_ = m2 - 1.0;
                d.second_fact_ = m2 - 1.0;
            } else {
                d.variance_ = kInf;
                d.second_fact_ = kInf;
                d.second_fact_finite_ = false;
            }
            d.analytic_tail_ = true;
            break;
        }
    }

    if (!(d.mean_ > 0.0) || !std::isfinite(d.mean_)) throw SpecError("offspring mean must lie in (0, inf)");
    if (std::abs(d.mean_ - 1.0) <= kCriticalTie)
        d.criticality_ = Criticality::Critical;
    else
        d.criticality_ = d.mean_ < 1.0 ? Criticality::Subcritical : Criticality::Supercritical;

    // extinction probability: smallest fixed point of G on [0,1]
    if (d.criticality_ != Criticality::Supercritical) {
        d.extinction_ = 1.0;
    } else if (d.p(0) == 0.0) {
        d.extinction_ = 0.0;
    } else {
        double t = 0.0;
        bool done = false;
        for (int i = 0; i < 200; ++i) {
            const double f = d.pgf(t) - t;
            const double fp = d.pgf_derivative(std::nullopt, t, 1) - 1.0;
            if (std::abs(f) < 1e-15) {
                done = true;
                break;
            }
            if (!(fp < 0.0)) break;
            double next = t - f / fp;
            if (!(next > t) || next >= 1.0) next = 0.5 * (t + 1.0);
            t = next;
        }
        if (!done && std::abs(d.pgf(t) - t) > 1e-12)
            throw NumericError("extinction probability iteration did not converge");
        d.extinction_ = t;
    }
    return d;
}

// ---------------------------------------------------------------------------
// pointwise law

double OffspringDistribution::p(std::int64_t k) const {
    if (k < 0) return 0.0;
    const auto idx = static_cast<std::size_t>(k);
    if (idx < pmf_.size()) return pmf_[idx];
    switch (spec_.family) {
        case Family::Explicit: return 0.0;
        case Family::Geometric: return (1.0 - spec_.param) * std::exp(static_cast<double>(k) * std::log(spec_.param));
        case Family::Poisson: {
            const double lam = spec_.param;
            return std::exp(-lam + static_cast<double>(k) * std::log(lam) - std::lgamma(static_cast<double>(k) + 1.0));
        }
        case Family::CriticalPowerLaw: return power_c_ * std::pow(static_cast<double>(k), -spec_.param);
    }
    return 0.0;
}

double OffspringDistribution::explicit_suffix(std::int64_t r) const {
    if (r < 0) return 1.0;
    const auto idx = static_cast<std::size_t>(r);
    if (idx >= suffix_.size()) return 0.0;
    return suffix_[idx];
}

double OffspringDistribution::tail(std::int64_t r) const {
    if (r < 0) return 1.0;
    switch (spec_.family) {
        case Family::Explicit: return explicit_suffix(r + 1);
        case Family::Geometric: return std::exp(static_cast<double>(r + 1) * std::log(spec_.param));
        case Family::Poisson: {
            CompensatedSum acc;
            double term = p(r + 1);
            const double lam = spec_.param;
            for (std::int64_t j = r + 2; term > 0.0; ++j) {
                acc.add(term);
                const double next = term * lam / static_cast<double>(j);
                if (next < acc.value() * 1e-18) {
                    acc.add(next * static_cast<double>(j) / (static_cast<double>(j) - lam));
                    break;
                }
                term = next;
            }
            return acc.value();
        }
        case Family::CriticalPowerLaw: return power_c_ * zeta_tail(spec_.param, static_cast<double>(r + 1));
    }
    return 0.0;
}

double OffspringDistribution::cdf(std::int64_t r) const {
    if (r < 0) return 0.0;
    if (bounded_ && r >= support_max_) return 1.0;
    return 1.0 - tail(r);
}

double OffspringDistribution::tail_first_moment(std::int64_t r) const {
    if (r < -1) r = -1;
    switch (spec_.family) {
        case Family::Explicit: {
            const auto idx = static_cast<std::size_t>(r + 1);
            if (idx >= suffix_moment_.size()) return 0.0;
            return suffix_moment_[idx];
        }
        case Family::Geometric: {
            const double a = spec_.param;
            const double ar = std::exp(static_cast<double>(r + 1) * std::log(a));
            return ar * (static_cast<double>(r + 1) - static_cast<double>(r) * a) / (1.0 - a);
        }
        case Family::Poisson: return spec_.param * tail(r - 1);
        case Family::CriticalPowerLaw: return power_c_ * zeta_tail(spec_.param - 1.0, static_cast<double>(r + 1));
    }
    return 0.0;
}

double OffspringDistribution::second_factorial_moment() const {
    return second_fact_finite_ ? second_fact_ : kInf;
}

// ---------------------------------------------------------------------------
// generating functions

double OffspringDistribution::pgf_truncated(std::int64_t r, double x) const {
    if (!(x >= 0.0) || !(x <= 1.0)) throw SpecError("pgf argument must lie in [0,1]");
    if (r < 0) return 0.0;
    if (bounded_ && r > support_max_) r = support_max_;
    CompensatedSum acc(p(0));
    double w = 1.0;
    double prev_pk = kInf;
    const std::int64_t prefix = static_cast<std::int64_t>(pmf_.size());
    for (std::int64_t k = 1; k <= r; ++k) {
        w *= x;
        if (w == 0.0) break;
        const double pk = k < prefix ? pmf_[static_cast<std::size_t>(k)] : p(k);
        acc.add(pk * w);
        // once the pmf is nonincreasing, the dropped part is below p_k w x/(1-x)
        if (k >= 8 && pk <= prev_pk && x < 1.0 && pk * w / (1.0 - x) < 1e-18 * acc.value()) break;
        prev_pk = pk;
    }
    return acc.value();
}

double OffspringDistribution::pgf(double x) const {
    if (!(x >= 0.0) || !(x <= 1.0)) throw SpecError("pgf argument must lie in [0,1]");
    switch (spec_.family) {
        case Family::Explicit: return pgf_truncated(support_max_, x);
        case Family::Geometric: return (1.0 - spec_.param) / (1.0 - spec_.param * x);
        case Family::Poisson: return std::exp(spec_.param * (x - 1.0));
        case Family::CriticalPowerLaw: {
            if (x == 0.0) return pmf_[0];
            CompensatedSum acc(pmf_[0]);
            double w = 1.0;
            const std::int64_t K = static_cast<std::int64_t>(pmf_.size()) - 1;
            const double alpha = spec_.param;
            const double inv_am1 = 1.0 / (alpha - 1.0);
            std::int64_t k = 1;
            while (k <= K) {
                const std::int64_t block_end = std::min<std::int64_t>(K, k + 4095);
                for (; k <= block_end; ++k) {
                    w *= x;
                    acc.add(pmf_[static_cast<std::size_t>(k)] * w);
                }
                // rest of the series is below w * Fbar(k) <= w p_k k/(alpha-1);
                // once that undercuts 1e-7 of the sum, close with the analytic
                // tail (its own error is ~1e-9 relative of that small piece)
                if (pmf_[static_cast<std::size_t>(k - 1)] * w * static_cast<double>(k - 1) * inv_am1 <
                    1e-7 * acc.value())
                    break;
            }
            const std::int64_t cut = k - 1;
            if (x < 1.0)
                acc.add(power_c_ * power_exp_tail(alpha, -std::log(x), static_cast<double>(cut)));
            else
                acc.add(power_c_ * zeta_tail(alpha, static_cast<double>(cut + 1)));
            return acc.value();
        }
    }
    return 0.0;
}

namespace {

// Complement power recurrence: y_k = 1 - (1-s)^k via y <- y + s(1-y).
// Relative error grows like 2 k eps, which keeps tiny tails honest.
struct ComplementPower {
    explicit ComplementPower(double s) : s_(s) {}
    double advance() {  // returns y for the next k (starting at k = 1)
        y_ += s_ * (1.0 - y_);
        if (y_ > 1.0) y_ = 1.0;
        return y_;
    }
    double one_minus() const { return 1.0 - y_; }
    double s_;
    double y_ = 0.0;
};

}  // namespace

double OffspringDistribution::pgf_truncated_complement(std::int64_t r, double s) const {
    if (!(s >= 0.0) || !(s <= 1.0)) throw SpecError("complement argument must lie in [0,1]");
    if (r < 0) return 1.0;  // G_{-1} == 0
    if (bounded_ && r > support_max_) r = support_max_;
    CompensatedSum acc(tail(r));
    ComplementPower cp(s);
    const std::int64_t prefix = static_cast<std::int64_t>(pmf_.size());
    for (std::int64_t k = 1; k <= r; ++k) {
        const double y = cp.advance();
        const double pk = k < prefix ? pmf_[static_cast<std::size_t>(k)] : p(k);
        acc.add(pk * y);
    }
    double v = acc.value();
    if (v > 1.0) v = 1.0;
    return v;
}

double OffspringDistribution::pgf_complement(double s) const {
    if (!(s >= 0.0) || !(s <= 1.0)) throw SpecError("complement argument must lie in [0,1]");
    switch (spec_.family) {
        case Family::Explicit: return pgf_truncated_complement(support_max_, s);
        case Family::Geometric: {
            const double a = spec_.param;
            return a * s / (1.0 - a + a * s);
        }
        case Family::Poisson: return -std::expm1(-spec_.param * s);
        case Family::CriticalPowerLaw: {
            if (s == 0.0) return 0.0;
            CompensatedSum acc;
            ComplementPower cp(s);
            const std::int64_t K = static_cast<std::int64_t>(pmf_.size()) - 1;
            const double alpha = spec_.param;
            const double inv_am1 = 1.0 / (alpha - 1.0);
            std::int64_t k = 1;
            while (k <= K) {
                const std::int64_t block_end = std::min<std::int64_t>(K, k + 4095);
                for (; k <= block_end; ++k) acc.add(pmf_[static_cast<std::size_t>(k)] * cp.advance());
                if (pmf_[static_cast<std::size_t>(k - 1)] * static_cast<double>(k - 1) * inv_am1 <
                    1e-7 * acc.value())
                    break;
            }
            // remaining mass minus what the surviving powers still hold
            const std::int64_t cut = k - 1;
            const double fbar = power_c_ * zeta_tail(alpha, static_cast<double>(cut + 1));
            const double beta = -std::log1p(-s);
            acc.add(fbar - power_c_ * power_exp_tail(alpha, beta, static_cast<double>(cut)));
            double v = acc.value();
            if (v > 1.0) v = 1.0;
            return v;
        }
    }
    return 0.0;
}

double OffspringDistribution::pgf_truncated_complement_derivative(std::int64_t r, double s) const {
    double value, deriv;
    pgf_truncated_complement_pair(r, s, value, deriv);
    return deriv;
}

void OffspringDistribution::pgf_truncated_complement_pair(std::int64_t r, double s, double& value,
                                                          double& derivative) const {
    if (!(s >= 0.0) || !(s <= 1.0)) throw SpecError("complement argument must lie in [0,1]");
    if (r < 0) {
        value = 1.0;
        derivative = 0.0;
        return;
    }
    if (bounded_ && r > support_max_) r = support_max_;
    CompensatedSum acc(tail(r));
    CompensatedSum dacc;
    ComplementPower cp(s);
    const std::int64_t prefix = static_cast<std::int64_t>(pmf_.size());
    double w_prev = 1.0;  // (1-s)^{k-1}
    for (std::int64_t k = 1; k <= r; ++k) {
        const double y = cp.advance();
        const double pk = k < prefix ? pmf_[static_cast<std::size_t>(k)] : p(k);
        acc.add(pk * y);
        dacc.add(static_cast<double>(k) * pk * w_prev);
        w_prev = cp.one_minus();
    }
    value = std::min(acc.value(), 1.0);
    derivative = dacc.value();
}

double OffspringDistribution::pgf_derivative(std::optional<std::int64_t> truncation, double x, int order) const {
    if (order != 1 && order != 2) throw SpecError("pgf_derivative supports orders 1 and 2");
    if (!(x >= 0.0) || !(x <= 1.0)) throw SpecError("pgf argument must lie in [0,1]");

    if (!truncation) {
        if (x == 1.0) {
            if (order == 1) return mean_;
            return second_factorial_moment();
        }
        switch (spec_.family) {
            case Family::Geometric: {
                const double a = spec_.param;
                const double d = 1.0 - a * x;
                if (order == 1) return a * (1.0 - a) / (d * d);
                return 2.0 * a * a * (1.0 - a) / (d * d * d);
            }
            case Family::Poisson: {
                const double lam = spec_.param;
                const double g = std::exp(lam * (x - 1.0));
                return order == 1 ? lam * g : lam * lam * g;
            }
            case Family::Explicit: return pgf_derivative(support_max_, x, order);
            case Family::CriticalPowerLaw: {
                const double alpha = spec_.param;
                const std::int64_t K = static_cast<std::int64_t>(pmf_.size()) - 1;
                CompensatedSum acc;
                double w = 1.0;  // x^{k-order}
                std::int64_t k = order;
                if (order == 2 && x == 0.0) return 2.0 * p(2);
                if (order == 1 && x == 0.0) return p(1);
                for (; k <= K; ++k) {
                    const double kk = static_cast<double>(k);
                    const double coeff = order == 1 ? kk : kk * (kk - 1.0);
                    const double term = coeff * pmf_[static_cast<std::size_t>(k)] * w;
                    acc.add(term);
                    if (k >= 8 && term / (1.0 - x) * 2.0 < 1e-17 * std::max(acc.value(), 1e-300)) break;
                    w *= x;
                }
                if (k > K) {
                    const double beta = -std::log(x);
                    const double scale = std::pow(x, -static_cast<double>(order));
                    if (order == 1)
                        acc.add(power_c_ * scale * power_exp_tail(alpha - 1.0, beta, static_cast<double>(K)));
                    else
                        acc.add(power_c_ * scale *
                                (power_exp_tail(alpha - 2.0, beta, static_cast<double>(K)) -
                                 power_exp_tail(alpha - 1.0, beta, static_cast<double>(K))));
                }
                return acc.value();
            }
        }
        return 0.0;
    }

    std::int64_t r = *truncation;
    if (r < 0) return 0.0;
    if (bounded_ && r > support_max_) r = support_max_;
    CompensatedSum acc;
    const std::int64_t prefix = static_cast<std::int64_t>(pmf_.size());
    double w = 1.0;  // x^{k-order}
    for (std::int64_t k = order; k <= r; ++k) {
        const double kk = static_cast<double>(k);
        const double coeff = order == 1 ? kk : kk * (kk - 1.0);
        const double pk = k < prefix ? pmf_[static_cast<std::size_t>(k)] : p(k);
        acc.add(coeff * pk * w);
        w *= x;
        if (w == 0.0) break;
    }
    return acc.value();
}

}  // namespace gwmaxdeg
