#pragma once

// Test-side oracles, independent of the library implementation paths:
//  - enum_caps_prob: exhaustive population-DP law of generation maxima for
//    bounded offspring laws (convolution powers, small horizons)
//  - solve_truncated_fixed_point: long-double bisection for G_r(t) = t
//  - fixed_point_iteration: plain functional iteration for G(t) = t
// Everything here recomputes from the raw pmf; nothing touches the library's
// composition or solver code.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// P[M_i <= caps[i] for 0 <= i <= n] for an explicit bounded pmf.
// State: distribution of the population size per generation; a generation
// with cap c kills every outcome where some individual draws > c.
inline double enum_caps_prob(const std::vector<double>& pmf, std::span<const std::int64_t> caps,
                             std::size_t pop_limit = 20000) {
    std::vector<double> pop_dist{0.0, 1.0};  // population 1 with probability 1
    for (std::size_t gen = 0; gen < caps.size(); ++gen) {
        const auto cap = static_cast<std::size_t>(caps[gen]);
        std::vector<double> truncated(pmf.begin(),
                                      pmf.begin() + static_cast<std::ptrdiff_t>(
                                                        std::min(pmf.size(), cap + 1)));
        // next_dist = sum_m pop_dist[m] * truncated^{*m}
        std::vector<double> next{1.0};  // convolution power for m = 0
        std::vector<double> out(1, 0.0);
        for (std::size_t m = 0; m < pop_dist.size(); ++m) {
            if (pop_dist[m] > 0.0) {
                if (out.size() < next.size()) out.resize(next.size(), 0.0);
                for (std::size_t s = 0; s < next.size(); ++s) out[s] += pop_dist[m] * next[s];
            }
            // next <- next * truncated
            std::vector<double> grown(next.size() + truncated.size() - 1, 0.0);
            for (std::size_t a = 0; a < next.size(); ++a)
                for (std::size_t b = 0; b < truncated.size(); ++b) grown[a + b] += next[a] * truncated[b];
            next = std::move(grown);
            if (next.size() > pop_limit) throw std::runtime_error("oracle population blow-up");
        }
        pop_dist = std::move(out);
    }
    double total = 0.0;
    for (double v : pop_dist) total += v;
    return total;
}

// Largest fixed point of the truncated pgf on [0,1] (= the global law cdf),
// via 200 long-double bisections on 1 - G_r(1-s) - s from the tail side.
inline long double solve_truncated_fixed_point(const std::vector<long double>& pmf_prefix,
                                               long double fbar, std::int64_t r) {
    if (fbar <= 0.0L) return 1.0L;
    auto phi = [&](long double s) {
        long double acc = fbar;
        long double w = 1.0L;
        const long double x = 1.0L - s;
        for (std::int64_t k = 1; k <= r; ++k) {
            w *= x;
            acc += pmf_prefix[static_cast<std::size_t>(k)] * (1.0L - w);
        }
        return acc;
    };
    long double lo = 0.0L, hi = 1.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (phi(mid) - mid > 0.0L)
            lo = mid;
        else
            hi = mid;
    }
    return 1.0L - 0.5L * (lo + hi);  // cdf value
}

// Smallest fixed point of a full pgf by increasing functional iteration.
template <class G>
long double fixed_point_iteration(const G& g, int iters = 400000) {
    long double t = 0.0L;
    for (int i = 0; i < iters; ++i) t = g(t);
    return t;
}

}  // namespace oracle
