#include "mtme/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "mtme/csv.hpp"
#include "mtme/random.hpp"
#include "mtme/variation.hpp"

namespace mtme {

namespace {

/// Runs independent items on a bounded number of threads. Each item writes
/// only to its own output slot, so results do not depend on the worker count.
class BatchExecutor {
public:
    explicit BatchExecutor(std::size_t workers)
        : workers_(workers), arena_(static_cast<int>(std::max<std::size_t>(workers, 1))) {}

    template <typename F>
    void for_each(std::size_t n, F&& fn) {
        if (workers_ <= 1 || n <= 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        arena_.execute([&] {
            tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n),
                              [&](const tbb::blocked_range<std::size_t>& r) {
                for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
            });
        });
    }

private:
    std::size_t workers_;
    tbb::task_arena arena_;
};

struct Evaluated {
    Genome genome;
    std::size_t task = 0;
    double fitness = 0.0;
};

/// Coordinator-side bookkeeping shared by every method.
class RunState {
public:
    RunState(const TaskSet& tasks, const RunHooks& hooks)
        : hooks_(hooks), start_(std::chrono::steady_clock::now()) {
        result_.archive = Archive(tasks.size());
    }

    RunResult& result() { return result_; }
    Archive& archive() { return result_.archive; }
    std::uint64_t evaluations() const { return result_.counters.evaluations; }

    /// Applies one evaluation: counts it, and tries the archive if finite.
    bool apply(Evaluated&& item) {
        auto& c = result_.counters;
        ++c.evaluations;
        bool inserted = false;
        if (std::isfinite(item.fitness)) {
            inserted = result_.archive.insert(item.task, std::move(item.genome), item.fitness, c.evaluations);
        } else {
            if (c.nonfinite == 0) {
                std::clog << "warning: non-finite fitness on task " << item.task
                          << " at evaluation " << c.evaluations << "; candidate discarded\n";
            }
            ++c.nonfinite;
        }
        if (hooks_.on_evaluation) hooks_.on_evaluation(item.task, item.fitness, inserted);
        return inserted;
    }

    void record(std::uint64_t generation, std::size_t tournament_size, std::uint64_t successes) {
        const auto st = result_.archive.stats();
        BatchRecord r{generation, evaluations(), st.coverage, st.mean_fitness,
                      st.max_fitness, tournament_size, successes};
        result_.log.push_back(r);
        if (hooks_.on_record) hooks_.on_record(r);
    }

    RunResult finish() {
        const auto& c = result_.counters;
        if (c.nonfinite > 1) {
            std::clog << "warning: " << c.nonfinite << " of " << c.evaluations
                      << " evaluations returned non-finite fitness\n";
        }
        result_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return std::move(result_);
    }

private:
    const RunHooks& hooks_;
    std::chrono::steady_clock::time_point start_;
    RunResult result_;
};

void check_compatible(const RunConfig& config, const TaskSet& tasks, const Domain& domain) {
    config.validate();
    if (config.n_tasks != tasks.size()) throw std::invalid_argument("n_tasks does not match the task set");
    if (config.d_task != tasks.dim()) throw std::invalid_argument("d_task does not match the task set");
    if (config.d_genome != domain.genome_dim()) throw std::invalid_argument("d_genome does not match the domain");
    if (domain.task_dim() != tasks.dim()) throw std::invalid_argument("domain task dimension does not match the task set");
}

/// Random genomes on uniformly random tasks (the shared initialization).
void random_init(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                 BatchExecutor& exec, RunState& state, std::size_t count) {
    const std::uint64_t base = state.evaluations();
    std::vector<Evaluated> items(count);
    exec.for_each(count, [&](std::size_t j) {
        Rng rng = make_stream(config.seed, StreamKind::evaluation, base + j);
        auto& it = items[j];
        it.genome = random_unit_vector(config.d_genome, rng);
        it.task = uniform_index(rng, tasks.size());
        it.fitness = domain.evaluate(it.genome, tasks[it.task]);
    });
    std::uint64_t successes = 0;
    for (auto& it : items) successes += state.apply(std::move(it));
    state.record(0, 0, successes);
}

enum class TaskChoice { tournament, uniform };

RunResult run_map_elites(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                         const RunHooks& hooks, TaskChoice choice) {
    check_compatible(config, tasks, domain);
    BatchExecutor exec(config.workers);
    RunState state(tasks, hooks);
    random_init(config, tasks, domain, exec, state, config.init_count);

    const VariationParams vp{config.sigma_iso, config.sigma_line};
    const bool adaptive = choice == TaskChoice::tournament && !config.fixed_tournament;
    Rng coordinator = make_stream(config.seed, StreamKind::coordinator, 0);
    std::optional<BanditState> bandit;
    std::size_t arm = 0;
    if (adaptive) {
        bandit = BanditState::for_sizes(config.effective_tournament_sizes());
        arm = uniform_index(coordinator, bandit->sizes.size());
    }

    std::uint64_t generation = 0;
    std::vector<Evaluated> items;
    while (state.evaluations() < config.eval_budget) {
        const std::uint64_t base = state.evaluations();
        const std::size_t b = static_cast<std::size_t>(
            std::min<std::uint64_t>(config.batch_size, config.eval_budget - base));
        std::size_t s = 1;
        if (choice == TaskChoice::tournament) s = adaptive ? bandit->sizes[arm] : *config.fixed_tournament;

        const Archive& snapshot = state.archive();
        items.assign(b, Evaluated{});
        exec.for_each(b, [&](std::size_t j) {
            Rng rng = make_stream(config.seed, StreamKind::evaluation, base + j);
            const ParentPair parents = select_parents(snapshot, rng);
            auto& it = items[j];
            it.genome = iso_line_variation(parents.first->genome, parents.second->genome, vp, rng);
            it.task = choice == TaskChoice::tournament
                          ? tournament_select_task(tasks[parents.first_task], tasks, s, rng)
                          : uniform_index(rng, tasks.size());
            it.fitness = domain.evaluate(it.genome, tasks[it.task]);
        });

        std::uint64_t successes = 0;
        for (auto& it : items) successes += state.apply(std::move(it));
        auto& counters = state.result().counters;
        counters.variation_calls += b;
        counters.candidates += b;
        ++generation;

        if (adaptive) {
            bandit = bandit_update(std::move(*bandit), arm, successes, config.batch_size);
            arm = ucb1_select(*bandit, config.batch_size, config.ucb_reward);
        }
        state.record(generation, choice == TaskChoice::tournament ? s : 0, successes);
    }
    state.result().bandit = std::move(bandit);
    return state.finish();
}

}  // namespace

RunResult run_mtme(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                   const RunHooks& hooks) {
    return run_map_elites(config, tasks, domain, hooks, TaskChoice::tournament);
}

RunResult run_me_random_task(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                             const RunHooks& hooks) {
    return run_map_elites(config, tasks, domain, hooks, TaskChoice::uniform);
}

RunResult run_me_all_tasks(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                           const RunHooks& hooks) {
    check_compatible(config, tasks, domain);
    BatchExecutor exec(config.workers);
    RunState state(tasks, hooks);
    random_init(config, tasks, domain, exec, state, config.init_count);

    const VariationParams vp{config.sigma_iso, config.sigma_line};
    const std::size_t n = tasks.size();
    const std::size_t B = config.batch_size;
    const std::uint64_t batch_cost = static_cast<std::uint64_t>(B) * n;

    std::uint64_t generation = 0;
    std::vector<Genome> children(B);
    std::vector<Evaluated> items(B * n);
    while (state.evaluations() + batch_cost <= config.eval_budget) {
        const std::uint64_t base = state.evaluations();
        const Archive& snapshot = state.archive();
        exec.for_each(B, [&](std::size_t j) {
            // Candidate j owns evaluation indices [base + j n, base + (j+1) n).
            Rng rng = make_stream(config.seed, StreamKind::evaluation, base + j * n);
            const ParentPair parents = select_parents(snapshot, rng);
            children[j] = iso_line_variation(parents.first->genome, parents.second->genome, vp, rng);
        });
        exec.for_each(B * n, [&](std::size_t k) {
            auto& it = items[k];
            it.task = k % n;
            it.genome = children[k / n];
            it.fitness = domain.evaluate(it.genome, tasks[it.task]);
        });

        std::uint64_t successes = 0;
        for (auto& it : items) successes += state.apply(std::move(it));
        auto& counters = state.result().counters;
        counters.variation_calls += B;
        counters.candidates += B;
        state.record(++generation, 0, successes);
    }
    return state.finish();
}

RunResult run_random_sampling(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                              const RunHooks& hooks) {
    check_compatible(config, tasks, domain);
    BatchExecutor exec(config.workers);
    RunState state(tasks, hooks);

    std::uint64_t generation = 0;
    std::vector<Evaluated> items;
    while (state.evaluations() < config.eval_budget) {
        const std::uint64_t base = state.evaluations();
        const std::size_t b = static_cast<std::size_t>(
            std::min<std::uint64_t>(config.batch_size, config.eval_budget - base));
        items.assign(b, Evaluated{});
        exec.for_each(b, [&](std::size_t j) {
            Rng rng = make_stream(config.seed, StreamKind::evaluation, base + j);
            auto& it = items[j];
            it.genome = random_unit_vector(config.d_genome, rng);
            it.task = uniform_index(rng, tasks.size());
            it.fitness = domain.evaluate(it.genome, tasks[it.task]);
        });
        std::uint64_t successes = 0;
        for (auto& it : items) successes += state.apply(std::move(it));
        state.result().counters.candidates += b;
        state.record(++generation, 0, successes);
    }
    return state.finish();
}

namespace {

struct EsInstance {
    Rng rng;
    Genome parent;
    double parent_fitness = 0.0;
    bool has_parent = false;
    double step = 0.0;
};

}  // namespace

RunResult run_es_per_task(const RunConfig& config, const TaskSet& tasks, const Domain& domain,
                          const RunHooks& hooks) {
    check_compatible(config, tasks, domain);
    BatchExecutor exec(config.workers);
    RunState state(tasks, hooks);

    const std::size_t n = tasks.size();
    std::vector<EsInstance> es(n);
    for (std::size_t t = 0; t < n; ++t) {
        es[t].rng = make_stream(config.seed, StreamKind::task, t);
        es[t].step = config.es_initial_step;
    }
    const double grow = config.es_step_factor;
    const double shrink = std::pow(config.es_step_factor, -0.25);

    std::uint64_t generation = 0;
    std::vector<Evaluated> items;
    while (state.evaluations() < config.eval_budget) {
        // A chunk never wraps past the end of a round, so its tasks are distinct.
        const std::uint64_t base = state.evaluations();
        const std::size_t first_task = static_cast<std::size_t>(base % n);
        const std::size_t b = static_cast<std::size_t>(std::min<std::uint64_t>(
            {config.batch_size, n - first_task, config.eval_budget - base}));
        items.assign(b, Evaluated{});
        exec.for_each(b, [&](std::size_t j) {
            const std::size_t t = first_task + j;
            auto& inst = es[t];
            auto& it = items[j];
            it.task = t;
            if (!inst.has_parent) {
                it.genome = random_unit_vector(config.d_genome, inst.rng);
            } else {
                std::normal_distribution<double> normal(0.0, 1.0);
                it.genome = inst.parent;
                for (double& v : it.genome) v += inst.step * normal(inst.rng);
                clip_unit(it.genome);
            }
            it.fitness = domain.evaluate(it.genome, tasks[t]);
            if (!std::isfinite(it.fitness)) {
                if (inst.has_parent) inst.step *= shrink;
            } else if (!inst.has_parent) {
                inst.parent = it.genome;
                inst.parent_fitness = it.fitness;
                inst.has_parent = true;
            } else if (it.fitness > inst.parent_fitness) {
                inst.parent = it.genome;
                inst.parent_fitness = it.fitness;
                inst.step *= grow;
            } else {
                inst.step *= shrink;
            }
        });
        std::uint64_t successes = 0;
        for (auto& it : items) successes += state.apply(std::move(it));
        state.result().counters.candidates += b;
        state.record(++generation, 0, successes);
    }
    return state.finish();
}

RunResult run(const RunConfig& config, const TaskSet& tasks, const Domain& domain, const RunHooks& hooks) {
    switch (config.method) {
        case Method::mtme: return run_mtme(config, tasks, domain, hooks);
        case Method::me_random_task: return run_me_random_task(config, tasks, domain, hooks);
        case Method::me_all_tasks: return run_me_all_tasks(config, tasks, domain, hooks);
        case Method::random_sampling: return run_random_sampling(config, tasks, domain, hooks);
        case Method::es_per_task: return run_es_per_task(config, tasks, domain, hooks);
    }
    throw std::invalid_argument("unknown method");
}

// --- CSV -------------------------------------------------------------------

namespace {

const std::vector<std::string> kLogHeader{"generation", "evaluations", "coverage", "mean_fitness",
                                          "max_fitness", "tournament_size", "successes"};

std::vector<std::string> log_fields(const BatchRecord& r) {
    return {std::to_string(r.generation), std::to_string(r.evaluations), csv::format_double(r.coverage),
            csv::format_optional(r.mean_fitness), csv::format_optional(r.max_fitness),
            std::to_string(r.tournament_size), std::to_string(r.successes)};
}

}  // namespace

LogCsvWriter::LogCsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    csv::write_row(out_, kLogHeader);
    out_.flush();
}

void LogCsvWriter::write(const BatchRecord& record) {
    csv::write_row(out_, log_fields(record));
    out_.flush();
}

void write_log_csv(const std::filesystem::path& path, const std::vector<BatchRecord>& log) {
    LogCsvWriter w(path);
    for (const auto& r : log) w.write(r);
}

std::vector<BatchRecord> read_log_csv(const std::filesystem::path& path) {
    const auto t = csv::read_table(path);
    if (t.header != kLogHeader) throw std::runtime_error(path.string() + ": unexpected run log header");
    std::vector<BatchRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        BatchRecord r;
        r.generation = csv::parse_uint(row[0]);
        r.evaluations = csv::parse_uint(row[1]);
        r.coverage = csv::parse_double(row[2]);
        r.mean_fitness = csv::parse_optional(row[3]);
        r.max_fitness = csv::parse_optional(row[4]);
        r.tournament_size = csv::parse_uint(row[5]);
        r.successes = csv::parse_uint(row[6]);
        out.push_back(r);
    }
    return out;
}

void write_archive_csv(const std::filesystem::path& path, const Archive& archive, const TaskSet& tasks) {
    if (archive.size() != tasks.size()) throw std::invalid_argument("archive and task set sizes differ");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    std::size_t d_genome = 0;
    for (std::size_t id = 0; id < archive.size() && d_genome == 0; ++id) {
        if (archive[id]) d_genome = archive[id]->genome.size();
    }
    std::vector<std::string> row{"task_id"};
    for (std::size_t k = 0; k < tasks.dim(); ++k) row.push_back("t" + std::to_string(k));
    row.push_back("fitness");
    for (std::size_t k = 0; k < d_genome; ++k) row.push_back("g" + std::to_string(k));
    csv::write_row(out, row);

    for (std::size_t id = 0; id < archive.size(); ++id) {
        const auto& e = archive[id];
        if (!e) continue;
        row.assign(1, std::to_string(id));
        for (double p : tasks[id].params) row.push_back(csv::format_double(p));
        row.push_back(csv::format_double(e->fitness));
        for (double g : e->genome) row.push_back(csv::format_double(g));
        csv::write_row(out, row);
    }
}

Archive read_archive_csv(const std::filesystem::path& path, const TaskSet& tasks) {
    const auto t = csv::read_table(path);
    const std::size_t fit_col = t.column("fitness");
    if (t.header.front() != "task_id" || fit_col != tasks.dim() + 1) {
        throw std::runtime_error(path.string() + ": archive columns do not match the task set");
    }
    Archive archive(tasks.size());
    for (const auto& row : t.rows) {
        const auto id = csv::parse_uint(row[0]);
        if (id >= tasks.size()) throw std::runtime_error(path.string() + ": task id out of range");
        Genome g;
        for (std::size_t k = fit_col + 1; k < row.size(); ++k) g.push_back(csv::parse_double(row[k]));
        archive.insert(id, std::move(g), csv::parse_double(row[fit_col]));
    }
    return archive;
}

}  // namespace mtme
