#include "mtme/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "mtme/check.hpp"
#include "mtme/csv.hpp"
#include "mtme/random.hpp"

namespace mtme {

TaskSet::TaskSet(std::vector<TaskDescriptor> descriptors, std::size_t d_task, TaskGeneration mode)
    : descriptors_(std::move(descriptors)), d_task_(d_task), mode_(mode) {
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
        const auto& t = descriptors_[i];
        if (t.id != i) throw std::invalid_argument("TaskSet: ids must be dense and ordered");
        if (t.params.size() != d_task_) throw std::invalid_argument("TaskSet: wrong parameter count");
        for (double p : t.params) {
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("TaskSet: parameter outside [0, 1]");
        }
    }
}

std::size_t default_cvt_samples(std::size_t n) {
    return std::max<std::size_t>(100000, 20 * n);
}

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

}  // namespace

TaskSet generate_cvt(std::size_t n, std::size_t d_task, std::size_t n_samples,
                     std::size_t n_iterations, std::uint64_t seed,
                     std::vector<double>* energy_trace) {
    if (n == 0) throw std::invalid_argument("generate_cvt: n must be >= 1");
    if (d_task == 0) throw std::invalid_argument("generate_cvt: d_task must be >= 1");
    if (n_samples < 10 * n) throw std::invalid_argument("generate_cvt: need n_samples >= 10 n");

    Rng rng = make_stream(seed, StreamKind::cvt, 0);
    std::vector<double> samples(n_samples * d_task);
    for (auto& x : samples) x = uniform01(rng);

    // Initial centroids: the first n samples (already uniformly random).
    std::vector<double> centroids(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n * d_task));
    std::vector<std::size_t> assignment(n_samples);
    std::vector<double> nearest_sq(n_samples);
    std::vector<double> sums(n * d_task);
    std::vector<std::size_t> counts(n);

    if (energy_trace) energy_trace->clear();

    for (std::size_t iter = 0; iter < n_iterations; ++iter) {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n_samples, 1024),
                          [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t i = r.begin(); i != r.end(); ++i) {
                const double* x = &samples[i * d_task];
                std::size_t best = 0;
                double best_sq = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < n; ++c) {
                    const double sq = squared_distance(x, &centroids[c * d_task], d_task);
                    if (sq < best_sq) {
                        best_sq = sq;
                        best = c;
                    }
                }
                assignment[i] = best;
                nearest_sq[i] = best_sq;
            }
        });

        if (energy_trace) {
            double energy = 0.0;
            for (double v : nearest_sq) energy += v;
            energy_trace->push_back(energy / static_cast<double>(n_samples));
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const std::size_t c = assignment[i];
            ++counts[c];
            for (std::size_t k = 0; k < d_task; ++k) sums[c * d_task + k] += samples[i * d_task + k];
        }

        double max_move = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            double* centroid = &centroids[c * d_task];
            std::vector<double> updated(d_task);
            if (counts[c] == 0) {
                const std::size_t pick = uniform_index(rng, n_samples);
                std::copy_n(&samples[pick * d_task], d_task, updated.begin());
            } else {
                for (std::size_t k = 0; k < d_task; ++k) {
                    updated[k] = sums[c * d_task + k] / static_cast<double>(counts[c]);
                }
            }
            max_move = std::max(max_move, std::sqrt(squared_distance(centroid, updated.data(), d_task)));
            std::copy(updated.begin(), updated.end(), centroid);
        }
        if (max_move < 1e-6) break;
    }

    std::vector<TaskDescriptor> out(n);
    for (std::size_t c = 0; c < n; ++c) {
        out[c].id = c;
        out[c].params.assign(centroids.begin() + static_cast<std::ptrdiff_t>(c * d_task),
                             centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * d_task));
        for (auto& p : out[c].params) p = std::clamp(p, 0.0, 1.0);
    }
    return TaskSet(std::move(out), d_task, TaskGeneration::cvt);
}

TaskSet generate_uniform(std::size_t n, std::size_t d_task, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("generate_uniform: n must be >= 1");
    if (d_task == 0) throw std::invalid_argument("generate_uniform: d_task must be >= 1");
    Rng rng = make_stream(seed, StreamKind::uniform_tasks, 0);
    std::vector<TaskDescriptor> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].id = i;
        out[i].params = random_unit_vector(d_task, rng);
    }
    return TaskSet(std::move(out), d_task, TaskGeneration::uniform_random);
}

double task_distance(std::span<const double> a, std::span<const double> b) {
    MTME_CHECK(a.size() == b.size(), "task dimension mismatch");
    return std::sqrt(squared_distance(a.data(), b.data(), a.size()));
}

std::size_t closest_task(std::span<const std::size_t> candidate_ids,
                         const TaskDescriptor& reference, const TaskSet& tasks) {
    MTME_CHECK(!candidate_ids.empty(), "closest_task needs at least one candidate");
    std::size_t best = candidate_ids.front();
    double best_d = task_distance(tasks[best], reference);
    for (std::size_t id : candidate_ids.subspan(1)) {
        const double d = task_distance(tasks[id], reference);
        if (d < best_d || (d == best_d && id < best)) {
            best = id;
            best_d = d;
        }
    }
    return best;
}

void write_task_csv(const std::filesystem::path& path, const TaskSet& tasks) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::vector<std::string> row{"task_id"};
    for (std::size_t k = 0; k < tasks.dim(); ++k) row.push_back("p" + std::to_string(k));
    csv::write_row(out, row);
    for (const auto& t : tasks.descriptors()) {
        row.assign(1, std::to_string(t.id));
        for (double p : t.params) row.push_back(csv::format_double(p));
        csv::write_row(out, row);
    }
}

TaskSet read_task_csv(const std::filesystem::path& path) {
    const auto table = csv::read_table(path);
    if (table.header.size() < 2 || table.header[0] != "task_id") {
        throw std::runtime_error(path.string() + ": expected header task_id,p0,...");
    }
    const std::size_t d = table.header.size() - 1;
    std::vector<TaskDescriptor> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        TaskDescriptor t;
        t.id = csv::parse_uint(row[0]);
        for (std::size_t k = 0; k < d; ++k) t.params.push_back(csv::parse_double(row[k + 1]));
        out.push_back(std::move(t));
    }
    return TaskSet(std::move(out), d, TaskGeneration::external);
}

}  // namespace mtme
