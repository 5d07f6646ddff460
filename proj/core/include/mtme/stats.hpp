#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mtme {

struct MannWhitneyResult {
    double u = 0.0;            // U of sample a: (rank sum of a) - n_a (n_a + 1) / 2
    double p_two_sided = 1.0;
    bool exact = false;        // exact null distribution vs. normal approximation
};

/// Rank-sum test with midranks for ties. Uses the exact permutation
/// distribution of the (tied) ranks when the smaller sample has fewer than 8
/// values, otherwise a tie-corrected normal approximation with continuity
/// correction. Throws std::invalid_argument on an empty sample.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Midranks (1-based) of `values`, in input order.
std::vector<double> midranks(std::span<const double> values);

/// Linear-interpolation quantile (Hyndman-Fan type 7), q in [0, 1].
double quantile(std::span<const double> values, double q);
inline double median(std::span<const double> values) { return quantile(values, 0.5); }

struct Summary {
    std::size_t n = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

Summary summarize(std::span<const double> values);

}  // namespace mtme
