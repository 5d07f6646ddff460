#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtme/core.hpp"
#include "mtme/domains.hpp"
#include "mtme/engine.hpp"
#include "mtme/tasks.hpp"

namespace mtme {

struct DomainSpec {
    std::string name = "arm";  // "arm" or "synthetic"
    std::size_t genome_dim = 10;
    std::size_t task_dim = 2;
    std::array<double, 2> target{1.0, 1.0};
    std::uint64_t constants_seed = SyntheticConfig{}.constants_seed;
};

/// Throws std::invalid_argument for an unknown domain or inconsistent dims
/// (the arm always has a 2-D task space).
std::unique_ptr<Domain> make_domain(const DomainSpec& spec);

struct TaskSpec {
    TaskGeneration mode = TaskGeneration::cvt;
    std::size_t count = 500;
    std::uint64_t seed = 0;
    std::size_t cvt_samples = 0;  // 0 = default_cvt_samples(count)
    std::size_t cvt_iterations = kDefaultCvtIterations;
    std::filesystem::path file;   // used when mode == external
};

TaskSet make_tasks(const TaskSpec& spec, std::size_t d_task);

/// A method plus an optional fixed tournament size, written "mtme@10".
struct MethodSpec {
    Method method = Method::mtme;
    std::optional<std::size_t> fixed_tournament;

    std::string label() const;
    /// Throws std::invalid_argument for unknown names or a malformed size.
    static MethodSpec parse(std::string_view text);
};

struct ExperimentSpec {
    RunConfig base;  // n_tasks / d_genome / d_task are filled from domain and tasks
    std::vector<MethodSpec> methods;
    std::size_t n_replicates = 1;
    std::uint64_t seed_base = 0;
    std::filesystem::path output_dir = "results";
    DomainSpec domain;
    TaskSpec tasks;
    std::size_t jobs = 1;  // concurrent runs

    /// Throws std::invalid_argument if the spec cannot be run.
    void validate() const;
};

/// Parses the `key = value` experiment format documented in
/// docs/experiment-format.md. Unknown keys and method names are errors.
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct AggregateRow {
    std::string method;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::optional<double> final_mean_fitness;
    std::optional<double> final_coverage;
    std::uint64_t evaluations = 0;
    std::string status = "ok";
};

/// RunConfig for one (method, replicate) cell of an experiment.
RunConfig replicate_config(const ExperimentSpec& spec, const MethodSpec& method, std::size_t replicate,
                           const TaskSet& tasks, const Domain& domain);

/// Runs every (method, replicate) pair with seed = seed_base + replicate.
/// Layout under output_dir:
///   tasks.csv
///   <method label>/rep_<r>/log.csv, archive.csv
///   aggregate.csv
/// A failing run is recorded with status "failed: ..." and no fitness.
std::vector<AggregateRow> run_experiment(const ExperimentSpec& spec);

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

/// Reads an experiment directory and writes
///   summary.csv: method,n,median,q25,q75 of the final mean fitness
///   utests.csv:  method_a,method_b,median_a,median_b,U,p_two_sided
///   curves.csv:  method,evaluations,n,median,q25,q75 of the mean fitness per
///                log record, across replicates
void write_experiment_stats(const std::filesystem::path& experiment_dir);

// --- exports -----------------------------------------------------------------

/// CSV task_id,x,y,fitness (filled slots only; x,y are the first two task
/// parameters, empty when d_task < 2) and, when d_task == 2, an SVG map with
/// one fitness-coloured cell per task. Returns whether the SVG was written.
bool export_heatmap(const Archive& archive, const TaskSet& tasks,
                    const std::filesystem::path& svg_path, const std::filesystem::path& csv_path);

/// Long format elite_id,param_index,param_value,fitness.
void export_genome_plot(const Archive& archive, const std::filesystem::path& csv_path);

struct CrossEvalRow {
    std::size_t top_elite = 0;  // task id holding the top elite
    std::size_t task = 0;
    double fitness_top = 0.0;
    double fitness_elite = 0.0;
    double delta = 0.0;  // fitness_top - fitness_elite
};

/// Evaluates the best ceil(top_fraction * filled) elites (ties to the lower
/// task id) on every filled task and compares with that task's own elite.
std::vector<CrossEvalRow> cross_evaluate_top_elites(const Archive& archive, const TaskSet& tasks,
                                                    const Domain& domain, double top_fraction);
void write_cross_eval_csv(const std::filesystem::path& path, const std::vector<CrossEvalRow>& rows);

}  // namespace mtme
