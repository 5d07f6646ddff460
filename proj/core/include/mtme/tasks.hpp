#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mtme/core.hpp"

namespace mtme {

enum class TaskGeneration { cvt, uniform_random, external };

/// Dense, immutable list of task descriptors; descriptor i has id i.
class TaskSet {
public:
    TaskSet() = default;
    /// Throws std::invalid_argument if ids are not 0..n-1 in order, a
    /// dimension differs from `d_task`, or a parameter leaves [0, 1].
    TaskSet(std::vector<TaskDescriptor> descriptors, std::size_t d_task, TaskGeneration mode);

    std::size_t size() const noexcept { return descriptors_.size(); }
    std::size_t dim() const noexcept { return d_task_; }
    TaskGeneration mode() const noexcept { return mode_; }
    const TaskDescriptor& operator[](std::size_t id) const { return descriptors_[id]; }
    std::span<const TaskDescriptor> descriptors() const noexcept { return descriptors_; }

    friend bool operator==(const TaskSet&, const TaskSet&) = default;

private:
    std::vector<TaskDescriptor> descriptors_;
    std::size_t d_task_ = 0;
    TaskGeneration mode_ = TaskGeneration::external;
};

inline bool operator==(const TaskDescriptor& a, const TaskDescriptor& b) {
    return a.id == b.id && a.params == b.params;
}

/// Lloyd sample count used when none is given: max(100000, 20 n).
std::size_t default_cvt_samples(std::size_t n);
inline constexpr std::size_t kDefaultCvtIterations = 30;

/// Centroidal Voronoi tessellation of [0,1]^d_task by Lloyd's algorithm on
/// `n_samples` uniform points. Stops after `n_iterations` rounds or once no
/// centroid moves more than 1e-6. Empty clusters are re-seeded from a random
/// sample. If `energy_trace` is given it receives the quantization energy
/// (mean squared distance to the nearest centroid) at every assignment step.
TaskSet generate_cvt(std::size_t n, std::size_t d_task, std::size_t n_samples,
                     std::size_t n_iterations, std::uint64_t seed,
                     std::vector<double>* energy_trace = nullptr);

TaskSet generate_uniform(std::size_t n, std::size_t d_task, std::uint64_t seed);

double task_distance(std::span<const double> a, std::span<const double> b);
inline double task_distance(const TaskDescriptor& a, const TaskDescriptor& b) {
    return task_distance(a.params, b.params);
}

/// Candidate closest to `reference`; ties go to the lowest id.
std::size_t closest_task(std::span<const std::size_t> candidate_ids,
                         const TaskDescriptor& reference, const TaskSet& tasks);

/// CSV schema: task_id,p0,...,p{d-1}
void write_task_csv(const std::filesystem::path& path, const TaskSet& tasks);
TaskSet read_task_csv(const std::filesystem::path& path);

}  // namespace mtme
