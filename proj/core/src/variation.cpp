#include "mtme/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtme/check.hpp"

namespace mtme {

void VariationParams::validate() const {
    if (!std::isfinite(sigma_iso) || sigma_iso < 0.0 || !std::isfinite(sigma_line) || sigma_line < 0.0) {
        throw std::invalid_argument("VariationParams: strengths must be finite and >= 0");
    }
}

ParentPair select_parents(const Archive& archive, Rng& rng) {
    if (archive.empty()) throw std::logic_error("select_parents: archive has no elites");
    const auto filled = archive.filled_ids();
    ParentPair p;
    p.first_task = filled[uniform_index(rng, filled.size())];
    p.second_task = filled[uniform_index(rng, filled.size())];
    p.first = &*archive.at(p.first_task);
    p.second = &*archive.at(p.second_task);
    return p;
}

Genome iso_line_perturb(std::span<const double> x_i, std::span<const double> x_j,
                        const VariationParams& params, Rng& rng) {
    MTME_CHECK(x_i.size() == x_j.size(), "parent genomes differ in length");
    std::normal_distribution<double> normal(0.0, 1.0);
    Genome child(x_i.size());
    for (std::size_t k = 0; k < child.size(); ++k) {
        child[k] = x_i[k] + params.sigma_iso * normal(rng);
    }
    const double s = normal(rng);
    for (std::size_t k = 0; k < child.size(); ++k) {
        child[k] += params.sigma_line * (x_j[k] - x_i[k]) * s;
    }
    return child;
}

Genome iso_line_variation(std::span<const double> x_i, std::span<const double> x_j,
                          const VariationParams& params, Rng& rng) {
    Genome child = iso_line_perturb(x_i, x_j, params, rng);
    clip_unit(child);
    return child;
}

void clip_unit(std::span<double> genome) noexcept {
    for (double& v : genome) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace mtme
