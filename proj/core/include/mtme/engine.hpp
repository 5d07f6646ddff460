#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include "mtme/core.hpp"
#include "mtme/domains.hpp"
#include "mtme/scheduler.hpp"
#include "mtme/tasks.hpp"

namespace mtme {

/// Snapshot of the archive after one batch (or after initialization).
struct BatchRecord {
    std::uint64_t generation = 0;   // 0 for the initialization record
    std::uint64_t evaluations = 0;  // cumulative calls to the fitness function
    double coverage = 0.0;
    std::optional<double> mean_fitness;
    std::optional<double> max_fitness;
    std::size_t tournament_size = 0;  // 0 where no tournament is used
    std::uint64_t successes = 0;      // archive insertions during the batch

    friend bool operator==(const BatchRecord&, const BatchRecord&) = default;
};

struct RunCounters {
    std::uint64_t evaluations = 0;
    std::uint64_t variation_calls = 0;
    std::uint64_t candidates = 0;  // genomes produced by the main loop
    std::uint64_t nonfinite = 0;   // evaluations discarded for NaN/inf fitness
};

struct RunResult {
    Archive archive{0};
    std::vector<BatchRecord> log;
    RunCounters counters;
    std::optional<BanditState> bandit;  // MT-ME with an adaptive tournament only
    double wall_seconds = 0.0;
};

/// Optional callbacks, always invoked on the coordinating thread in
/// evaluation order.
struct RunHooks {
    std::function<void(const BatchRecord&)> on_record;
    std::function<void(std::size_t task_id, double fitness, bool inserted)> on_evaluation;
};

/// Dispatches on config.method. Throws std::invalid_argument if the config is
/// invalid or does not match the task set / domain dimensions.
RunResult run(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
              const RunHooks& hooks = {});

/// Multi-task MAP-Elites: tournament task selection with a UCB1-adapted (or
/// fixed) tournament size.
RunResult run_mtme(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                   const RunHooks& hooks = {});

/// MAP-Elites where each offspring competes on one uniformly random task.
RunResult run_me_random_task(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                             const RunHooks& hooks = {});

/// MAP-Elites where each offspring is evaluated on, and competes in, every
/// task. Only whole batches (batch_size * |T| evaluations) are run.
RunResult run_me_all_tasks(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                           const RunHooks& hooks = {});

/// Uniform random genome on a uniform random task, repeated to the budget.
RunResult run_random_sampling(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                              const RunHooks& hooks = {});

/// One independent (1+1)-ES per task with the 1/5th success rule, visited
/// round-robin so every task receives budget/|T| evaluations (+1 for the
/// first budget mod |T| tasks).
RunResult run_es_per_task(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                          const RunHooks& hooks = {});

// Run log CSV: generation,evaluations,coverage,mean_fitness,max_fitness,
// tournament_size,successes

/// Streams records to disk, flushing after each one.
class LogCsvWriter {
public:
    explicit LogCsvWriter(const std::filesystem::path& path);
    void write(const BatchRecord& record);

private:
    std::ofstream out_;
};

void write_log_csv(const std::filesystem::path& path, const std::vector<BatchRecord>& log);
std::vector<BatchRecord> read_log_csv(const std::filesystem::path& path);

// Archive CSV: one row per filled slot,
// task_id,t0..t{d_task-1},fitness,g0..g{d_genome-1}

void write_archive_csv(const std::filesystem::path& path, const Archive& archive, const TaskSet& tasks);
/// Rebuilds an archive over `tasks`. eval_count_at_insert is not stored and
/// reads back as 0.
Archive read_archive_csv(const std::filesystem::path& path, const TaskSet& tasks);

}  // namespace mtme
