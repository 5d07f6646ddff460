#include "mtme/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace mtme {

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Largest DP table (items x chosen x rank-sum) for which the exact null
// distribution is computed.
constexpr double kMaxExactWork = 5e7;

/// Two-sided exact p-value: 2 min(P(S <= s), P(S >= s)) where S is the
/// doubled rank sum of a random subset of size k of the pooled doubled ranks.
double exact_p(const std::vector<std::int64_t>& doubled_ranks, std::size_t k, std::int64_t observed) {
    const std::int64_t total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), std::int64_t{0});
    const std::size_t width = static_cast<std::size_t>(total) + 1;
    // ways[c][v]: number of subsets of size c with doubled-rank sum v.
    std::vector<std::vector<double>> ways(k + 1, std::vector<double>(width, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t idx = 0; idx < doubled_ranks.size(); ++idx) {
        const auto r = static_cast<std::size_t>(doubled_ranks[idx]);
        for (std::size_t c = std::min(k, idx + 1); c >= 1; --c) {
            auto& dst = ways[c];
            const auto& src = ways[c - 1];
            for (std::size_t v = width; v-- > r;) dst[v] += src[v - r];
        }
    }
    double all = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t v = 0; v < width; ++v) {
        const double w = ways[k][v];
        all += w;
        if (static_cast<std::int64_t>(v) <= observed) lower += w;
        if (static_cast<std::int64_t>(v) >= observed) upper += w;
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    // Midranks are multiples of 1/2; doubling keeps everything integral.
    std::vector<std::int64_t> doubled(n);
    for (std::size_t i = 0; i < n; ++i) doubled[i] = std::llround(2.0 * ranks[i]);
    const std::int64_t rank_sum_a2 = std::accumulate(doubled.begin(), doubled.begin() + static_cast<std::ptrdiff_t>(na), std::int64_t{0});

    MannWhitneyResult res;
    res.u = 0.5 * static_cast<double>(rank_sum_a2) - 0.5 * static_cast<double>(na * (na + 1));

    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
        res.p_two_sided = 1.0;
        res.exact = std::min(na, nb) < 8;
        return res;
    }

    const std::size_t k = std::min(na, nb);
    const double work = static_cast<double>(n) * static_cast<double>(k) * static_cast<double>(n * (n + 1));
    if (k < 8 && work <= kMaxExactWork) {
        // Work with whichever sample is smaller; the two-sided p is symmetric.
        const std::int64_t observed = na <= nb ? rank_sum_a2
                                               : static_cast<std::int64_t>(n * (n + 1)) - rank_sum_a2;
        res.p_two_sided = exact_p(doubled, k, observed);
        res.exact = true;
        return res;
    }

    // Tie-corrected normal approximation.
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    const double dn = static_cast<double>(n);
    const double mean = 0.5 * dna * dnb;
    const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) {
        res.p_two_sided = 1.0;
        return res;
    }
    const double z = std::max(0.0, std::abs(res.u - mean) - 0.5) / std::sqrt(var);
    res.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return res;
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
    std::vector<double> v(values.begin(), values.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
    const double x_lo = v[lo];
    if (frac == 0.0 || lo + 1 >= v.size()) return x_lo;
    const double x_hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
    return x_lo + frac * (x_hi - x_lo);
}

Summary summarize(std::span<const double> values) {
    return Summary{values.size(), quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

}  // namespace mtme
