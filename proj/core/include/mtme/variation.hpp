#pragma once

#include <cstddef>
#include <span>

#include "mtme/core.hpp"
#include "mtme/random.hpp"

namespace mtme {

struct VariationParams {
    double sigma_iso = 0.01;   // isotropic Gaussian strength
    double sigma_line = 0.2;   // strength along the parent-to-parent direction

    /// Throws std::invalid_argument unless both strengths are finite and >= 0.
    void validate() const;
};

struct ParentPair {
    std::size_t first_task = 0;
    std::size_t second_task = 0;
    const Elite* first = nullptr;
    const Elite* second = nullptr;
};

/// Two independent uniform draws over the filled slots (they may coincide).
/// Throws std::logic_error on an empty archive.
ParentPair select_parents(const Archive& archive, Rng& rng);

/// x_i + sigma_iso * g + sigma_line * (x_j - x_i) * s, without clipping.
/// g holds one standard normal per dimension, drawn first; s is a single
/// standard normal shared by all dimensions, drawn last.
Genome iso_line_perturb(std::span<const double> x_i, std::span<const double> x_j,
                        const VariationParams& params, Rng& rng);

/// iso_line_perturb() clipped component-wise to [0, 1].
Genome iso_line_variation(std::span<const double> x_i, std::span<const double> x_j,
                          const VariationParams& params, Rng& rng);

void clip_unit(std::span<double> genome) noexcept;

}  // namespace mtme
