#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtme {

/// Candidate solution in the normalized parameter space [0, 1]^d.
using Genome = std::vector<double>;

struct TaskDescriptor {
    std::size_t id = 0;
    std::vector<double> params;  // each component in [0, 1]
};

struct Elite {
    Genome genome;
    double fitness = 0.0;
    std::uint64_t eval_count_at_insert = 0;
};

enum class Method {
    mtme,
    me_random_task,
    me_all_tasks,
    random_sampling,
    es_per_task,
};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
std::vector<Method> all_methods();

/// How the bandit turns accumulated successes into a mean reward.
/// `normalized` divides by the batch size so rewards live in [0, 1];
/// `raw` uses successes / selections as-is.
enum class UcbReward { normalized, raw };

struct RunConfig {
    std::size_t n_tasks = 0;
    std::size_t d_genome = 0;
    std::size_t d_task = 0;
    std::uint64_t eval_budget = 100000;
    std::size_t batch_size = 64;
    std::size_t init_count = 100;
    std::vector<std::size_t> tournament_sizes;  // empty = defaults for n_tasks
    double sigma_iso = 0.01;
    double sigma_line = 0.2;
    std::uint64_t seed = 0;
    Method method = Method::mtme;
    std::optional<std::size_t> fixed_tournament;
    UcbReward ucb_reward = UcbReward::normalized;

    // (1+1)-ES baseline settings.
    double es_initial_step = 0.3;
    double es_step_factor = 1.5;

    // Execution only; never changes results.
    std::size_t workers = 1;

    /// Tournament sizes actually used: the configured list, or the default
    /// decades capped at n_tasks.
    std::vector<std::size_t> effective_tournament_sizes() const;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct ArchiveStats {
    double coverage = 0.0;
    std::optional<double> mean_fitness;  // nullopt when no slot is filled
    std::optional<double> max_fitness;
};

/// One slot per task. A slot only changes when a candidate strictly beats the
/// incumbent, so per-slot fitness never decreases.
class Archive {
public:
    explicit Archive(std::size_t n_tasks);

    /// Returns true iff the slot was empty or `fitness` strictly exceeds the
    /// incumbent. Aborts on an out-of-range task id; throws
    /// std::invalid_argument on non-finite fitness.
    bool insert(std::size_t task_id, Genome genome, double fitness,
                std::uint64_t eval_count = 0);

    /// Fitness `fitness` would be accepted by insert().
    bool would_accept(std::size_t task_id, double fitness) const;

    const std::optional<Elite>& at(std::size_t task_id) const;
    const std::optional<Elite>& operator[](std::size_t task_id) const { return at(task_id); }

    std::size_t size() const noexcept { return slots_.size(); }
    std::size_t filled_count() const noexcept { return filled_ids_.size(); }
    bool empty() const noexcept { return filled_ids_.empty(); }

    /// Task ids of filled slots, in first-fill order.
    std::span<const std::size_t> filled_ids() const noexcept { return filled_ids_; }

    ArchiveStats stats() const;

    friend bool operator==(const Archive& a, const Archive& b);

private:
    std::vector<std::optional<Elite>> slots_;
    std::vector<std::size_t> filled_ids_;
    // Neumaier-compensated running sum of filled fitness values.
    double sum_ = 0.0;
    double sum_compensation_ = 0.0;
    std::optional<double> max_;

    void add_to_sum(double v) noexcept;
};

bool operator==(const Elite& a, const Elite& b);

}  // namespace mtme
