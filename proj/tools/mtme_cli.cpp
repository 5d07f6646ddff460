// mtme: command-line front end.
//
//   mtme run        one run, writes tasks.csv, log.csv and archive.csv
//   mtme experiment run every (method, replicate) of a spec file
//   mtme stats      summary / U-tests / curves for an experiment directory
//   mtme export     heatmap, genome or cross-eval tables from an archive

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtme/csv.hpp"
#include "mtme/harness.hpp"
#include "mtme/stats.hpp"

namespace fs = std::filesystem;
using namespace mtme;

namespace {

constexpr int kExitNonFinite = 3;

struct DomainOptions {
    std::string domain = "arm";
    std::size_t dim = 0;       // 0: 10 for the arm, 36 for the synthetic domain
    std::size_t task_dim = 0;  // 0: 2 for the arm, 12 for the synthetic domain
    std::vector<double> target{1.0, 1.0};
    std::uint64_t constants_seed = SyntheticConfig{}.constants_seed;

    void add_to(CLI::App& app) {
        app.add_option("--domain", domain, "arm or synthetic")->check(CLI::IsMember({"arm", "synthetic"}));
        app.add_option("--dim", dim, "genome dimension (arm: number of joints)");
        app.add_option("--task-dim", task_dim, "task dimension (synthetic only)");
        app.add_option("--target", target, "arm target x y")->expected(2);
        app.add_option("--constants-seed", constants_seed, "seed of the synthetic weights and phases");
    }

    DomainSpec spec() const {
        DomainSpec d;
        d.name = domain;
        const bool arm = domain == "arm";
        d.genome_dim = dim ? dim : (arm ? 10 : 36);
        d.task_dim = task_dim ? task_dim : (arm ? 2 : 12);
        d.target = {target.at(0), target.at(1)};
        d.constants_seed = constants_seed;
        return d;
    }
};

void print_file(const fs::path& p) {
    std::ifstream in(p);
    std::cout << in.rdbuf();
}

int cmd_run(const DomainOptions& dopt, RunConfig cfg, const std::string& method_name, std::size_t n_tasks,
            const std::string& task_mode, const std::string& tasks_file, std::uint64_t task_seed,
            std::optional<std::size_t> fixed, bool raw_ucb, const fs::path& out) {
    const DomainSpec dspec = dopt.spec();
    const auto domain = make_domain(dspec);

    TaskSpec tspec;
    tspec.count = n_tasks;
    tspec.seed = task_seed;
    if (!tasks_file.empty()) {
        tspec.mode = TaskGeneration::external;
        tspec.file = tasks_file;
    } else if (task_mode == "uniform" || (task_mode.empty() && dspec.name == "synthetic")) {
        tspec.mode = TaskGeneration::uniform_random;
    }
    const TaskSet tasks = make_tasks(tspec, dspec.task_dim);

    const MethodSpec m = MethodSpec::parse(method_name);
    cfg.method = m.method;
    cfg.fixed_tournament = fixed ? fixed : m.fixed_tournament;
    cfg.n_tasks = tasks.size();
    cfg.d_task = tasks.dim();
    cfg.d_genome = domain->genome_dim();
    if (raw_ucb) cfg.ucb_reward = UcbReward::raw;

    fs::create_directories(out);
    write_task_csv(out / "tasks.csv", tasks);
    LogCsvWriter log(out / "log.csv");
    RunHooks hooks;
    hooks.on_record = [&log](const BatchRecord& r) { log.write(r); };
    const RunResult result = run(cfg, tasks, *domain, hooks);
    write_archive_csv(out / "archive.csv", result.archive, tasks);

    const auto st = result.archive.stats();
    std::cout << "method          " << to_string(cfg.method) << "\n"
              << "evaluations     " << result.counters.evaluations << "\n"
              << "coverage        " << csv::format_double(st.coverage) << "\n"
              << "mean fitness    " << csv::format_optional(st.mean_fitness) << "\n"
              << "max fitness     " << csv::format_optional(st.max_fitness) << "\n"
              << "wall seconds    " << result.wall_seconds << "\n"
              << "output          " << out.string() << "\n";
    if (result.counters.nonfinite * 100 > result.counters.evaluations) {
        std::cerr << "error: " << result.counters.nonfinite << " of " << result.counters.evaluations
                  << " evaluations were non-finite\n";
        return kExitNonFinite;
    }
    return 0;
}

int cmd_experiment(const fs::path& spec_path, const std::optional<std::string>& out,
                   std::optional<std::size_t> jobs) {
    ExperimentSpec spec = load_experiment_spec(spec_path);
    if (out) spec.output_dir = *out;
    if (jobs) spec.jobs = *jobs;
    const auto rows = run_experiment(spec);
    print_file(spec.output_dir / "aggregate.csv");
    int failed = 0;
    for (const auto& r : rows) {
        if (r.status != "ok") {
            std::cerr << r.method << " rep " << r.replicate << ": " << r.status << "\n";
            ++failed;
        }
    }
    return failed ? kExitNonFinite : 0;
}

int cmd_stats(const fs::path& dir) {
    write_experiment_stats(dir);
    print_file(dir / "summary.csv");
    std::cout << "\n";
    print_file(dir / "utests.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task MAP-Elites runs, experiments and exports"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "single run");
    DomainOptions run_dom;
    run_dom.add_to(*run_cmd);
    RunConfig cfg;
    std::string method = "mtme";
    std::size_t n_tasks = 500;
    std::string task_mode;
    std::string tasks_file;
    std::uint64_t task_seed = 0;
    std::optional<std::size_t> fixed;
    bool raw_ucb = false;
    std::string run_out = "run";
    run_cmd->add_option("--method", method, "mtme, me_random_task, me_all_tasks, random_sampling, es_per_task");
    run_cmd->add_option("--tasks", n_tasks, "number of tasks");
    run_cmd->add_option("--task-mode", task_mode, "cvt (arm default) or uniform (synthetic default)")
        ->check(CLI::IsMember({"cvt", "uniform"}));
    run_cmd->add_option("--tasks-file", tasks_file, "read task descriptors from a tasks CSV");
    run_cmd->add_option("--task-seed", task_seed, "seed for task generation");
    run_cmd->add_option("--evals", cfg.eval_budget, "evaluation budget");
    run_cmd->add_option("--batch", cfg.batch_size, "batch size");
    run_cmd->add_option("--init", cfg.init_count, "random initial evaluations");
    run_cmd->add_option("--seed", cfg.seed, "run seed");
    run_cmd->add_option("--fixed-tournament", fixed, "fixed tournament size instead of the bandit");
    run_cmd->add_option("--sigma1", cfg.sigma_iso, "isotropic variation strength");
    run_cmd->add_option("--sigma2", cfg.sigma_line, "line variation strength");
    run_cmd->add_option("--workers", cfg.workers, "threads per run (results do not depend on it)");
    run_cmd->add_flag("--raw-ucb", raw_ucb, "bandit reward without division by the batch size");
    run_cmd->add_option("--out", run_out, "output directory");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run an experiment spec file");
    std::string spec_path;
    std::optional<std::string> exp_out;
    std::optional<std::size_t> jobs;
    exp_cmd->add_option("spec", spec_path, "experiment file")->required()->check(CLI::ExistingFile);
    exp_cmd->add_option("--out", exp_out, "override output_dir");
    exp_cmd->add_option("--jobs", jobs, "concurrent runs");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "aggregate statistics for an experiment directory");
    std::string stats_dir;
    stats_cmd->add_option("dir", stats_dir, "experiment output directory")->required()->check(CLI::ExistingDirectory);

    // export
    auto* export_cmd = app.add_subcommand("export", "plot-ready tables from an archive");
    std::string kind;
    std::string archive_path;
    std::string export_tasks;
    std::string export_out = ".";
    double top_fraction = 0.05;
    DomainOptions export_dom;
    export_cmd->add_option("kind", kind, "heatmap, genome or cross-eval")
        ->required()
        ->check(CLI::IsMember({"heatmap", "genome", "cross-eval"}));
    export_cmd->add_option("--archive", archive_path, "archive CSV")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--tasks-file", export_tasks, "tasks CSV the archive was built on")
        ->required()
        ->check(CLI::ExistingFile);
    export_cmd->add_option("--top", top_fraction, "fraction of elites for cross-eval");
    export_cmd->add_option("--out", export_out, "output directory");
    export_dom.add_to(*export_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run_dom, cfg, method, n_tasks, task_mode, tasks_file, task_seed, fixed, raw_ucb, run_out);
        }
        if (exp_cmd->parsed()) return cmd_experiment(spec_path, exp_out, jobs);
        if (stats_cmd->parsed()) return cmd_stats(stats_dir);

        const TaskSet tasks = read_task_csv(export_tasks);
        const Archive archive = read_archive_csv(archive_path, tasks);
        const fs::path out = export_out;
        fs::create_directories(out);
        if (kind == "heatmap") {
            const bool svg = export_heatmap(archive, tasks, out / "heatmap.svg", out / "heatmap.csv");
            std::cout << "wrote " << (out / "heatmap.csv").string();
            if (svg) std::cout << " and " << (out / "heatmap.svg").string();
            std::cout << "\n";
        } else if (kind == "genome") {
            export_genome_plot(archive, out / "genomes.csv");
            std::cout << "wrote " << (out / "genomes.csv").string() << "\n";
        } else {
            const auto domain = make_domain(export_dom.spec());
            const auto rows = cross_evaluate_top_elites(archive, tasks, *domain, top_fraction);
            write_cross_eval_csv(out / "cross_eval.csv", rows);
            std::vector<double> deltas;
            for (const auto& r : rows) deltas.push_back(r.delta);
            std::cout << "wrote " << (out / "cross_eval.csv").string() << " (" << rows.size()
                      << " rows, median delta " << csv::format_double(median(deltas)) << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
