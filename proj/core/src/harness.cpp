#include "mtme/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "mtme/csv.hpp"
#include "mtme/stats.hpp"

namespace mtme {

namespace fs = std::filesystem;

std::unique_ptr<Domain> make_domain(const DomainSpec& spec) {
    if (spec.name == "arm") {
        if (spec.task_dim != 2) throw std::invalid_argument("arm domain has a 2-D task space");
        return std::make_unique<ArmDomain>(ArmDomainConfig{spec.genome_dim, spec.target});
    }
    if (spec.name == "synthetic") {
        return std::make_unique<SyntheticDomain>(
            SyntheticConfig{spec.genome_dim, spec.task_dim, spec.constants_seed});
    }
    throw std::invalid_argument("unknown domain '" + spec.name + "'");
}

TaskSet make_tasks(const TaskSpec& spec, std::size_t d_task) {
    switch (spec.mode) {
        case TaskGeneration::cvt: {
            const std::size_t samples = spec.cvt_samples ? spec.cvt_samples : default_cvt_samples(spec.count);
            return generate_cvt(spec.count, d_task, samples, spec.cvt_iterations, spec.seed);
        }
        case TaskGeneration::uniform_random:
            return generate_uniform(spec.count, d_task, spec.seed);
        case TaskGeneration::external: {
            TaskSet t = read_task_csv(spec.file);
            if (t.dim() != d_task) throw std::invalid_argument("task file dimension does not match the domain");
            return t;
        }
    }
    throw std::invalid_argument("unknown task generation mode");
}

std::string MethodSpec::label() const {
    std::string s(to_string(method));
    if (fixed_tournament) s += "@" + std::to_string(*fixed_tournament);
    return s;
}

MethodSpec MethodSpec::parse(std::string_view text) {
    MethodSpec m;
    const auto at = text.find('@');
    const auto name = text.substr(0, at);
    const auto method = parse_method(name);
    if (!method) throw std::invalid_argument("unknown method '" + std::string(name) + "'");
    m.method = *method;
    if (at != std::string_view::npos) {
        if (m.method != Method::mtme) throw std::invalid_argument("only mtme takes a fixed tournament size");
        try {
            m.fixed_tournament = csv::parse_uint(text.substr(at + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad tournament size in '" + std::string(text) + "'");
        }
    }
    return m;
}

void ExperimentSpec::validate() const {
    if (methods.empty()) throw std::invalid_argument("experiment: no methods");
    if (n_replicates == 0) throw std::invalid_argument("experiment: replicates must be >= 1");
    if (jobs == 0) throw std::invalid_argument("experiment: jobs must be >= 1");
    if (tasks.count == 0) throw std::invalid_argument("experiment: tasks must be >= 1");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    for (auto& item : csv::split_line(s)) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    try {
        return csv::parse_uint(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("experiment: '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return csv::parse_double(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("experiment: '" + key + "' expects a number, got '" + v + "'");
    }
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    bool dim_set = false;
    bool task_dim_set = false;
    bool task_mode_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("experiment line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(std::string_view(body).substr(0, eq));
        const auto value = trim(std::string_view(body).substr(eq + 1));
        auto& cfg = spec.base;

        if (key == "domain") {
            spec.domain.name = value;
            if (value != "arm" && value != "synthetic") throw std::invalid_argument("experiment: unknown domain '" + value + "'");
        } else if (key == "dim") {
            spec.domain.genome_dim = to_uint(key, value);
            dim_set = true;
        } else if (key == "task_dim") {
            spec.domain.task_dim = to_uint(key, value);
            task_dim_set = true;
        } else if (key == "constants_seed") {
            spec.domain.constants_seed = to_uint(key, value);
        } else if (key == "target") {
            const auto parts = split_list(value);
            if (parts.size() != 2) throw std::invalid_argument("experiment: target expects x,y");
            spec.domain.target = {to_double(key, parts[0]), to_double(key, parts[1])};
        } else if (key == "tasks") {
            spec.tasks.count = to_uint(key, value);
        } else if (key == "task_mode") {
            task_mode_set = true;
            if (value == "cvt") spec.tasks.mode = TaskGeneration::cvt;
            else if (value == "uniform") spec.tasks.mode = TaskGeneration::uniform_random;
            else throw std::invalid_argument("experiment: task_mode must be cvt or uniform");
        } else if (key == "task_seed") {
            spec.tasks.seed = to_uint(key, value);
        } else if (key == "tasks_file") {
            spec.tasks.mode = TaskGeneration::external;
            spec.tasks.file = value;
            task_mode_set = true;
        } else if (key == "cvt_samples") {
            spec.tasks.cvt_samples = to_uint(key, value);
        } else if (key == "cvt_iterations") {
            spec.tasks.cvt_iterations = to_uint(key, value);
        } else if (key == "evals") {
            cfg.eval_budget = to_uint(key, value);
        } else if (key == "batch") {
            cfg.batch_size = to_uint(key, value);
        } else if (key == "init") {
            cfg.init_count = to_uint(key, value);
        } else if (key == "sigma1") {
            cfg.sigma_iso = to_double(key, value);
        } else if (key == "sigma2") {
            cfg.sigma_line = to_double(key, value);
        } else if (key == "tournament_sizes") {
            cfg.tournament_sizes.clear();
            for (const auto& s : split_list(value)) cfg.tournament_sizes.push_back(to_uint(key, s));
        } else if (key == "ucb_reward") {
            if (value == "normalized") cfg.ucb_reward = UcbReward::normalized;
            else if (value == "raw") cfg.ucb_reward = UcbReward::raw;
            else throw std::invalid_argument("experiment: ucb_reward must be normalized or raw");
        } else if (key == "es_step") {
            cfg.es_initial_step = to_double(key, value);
        } else if (key == "workers") {
            cfg.workers = to_uint(key, value);
        } else if (key == "methods") {
            spec.methods.clear();
            for (const auto& m : split_list(value)) spec.methods.push_back(MethodSpec::parse(m));
        } else if (key == "replicates") {
            spec.n_replicates = to_uint(key, value);
        } else if (key == "seed_base") {
            spec.seed_base = to_uint(key, value);
        } else if (key == "output_dir") {
            spec.output_dir = value;
        } else if (key == "jobs") {
            spec.jobs = to_uint(key, value);
        } else {
            throw std::invalid_argument("experiment line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (spec.domain.name == "synthetic") {
        if (!dim_set) spec.domain.genome_dim = SyntheticConfig{}.genome_dim;
        if (!task_dim_set) spec.domain.task_dim = SyntheticConfig{}.task_dim;
        if (!task_mode_set) spec.tasks.mode = TaskGeneration::uniform_random;
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_experiment_spec(in);
}

RunConfig replicate_config(const ExperimentSpec& spec, const MethodSpec& method, std::size_t replicate,
                           const TaskSet& tasks, const Domain& domain) {
    RunConfig cfg = spec.base;
    cfg.method = method.method;
    cfg.fixed_tournament = method.fixed_tournament;
    cfg.seed = spec.seed_base + replicate;
    cfg.n_tasks = tasks.size();
    cfg.d_task = tasks.dim();
    cfg.d_genome = domain.genome_dim();
    return cfg;
}

std::vector<AggregateRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto domain = make_domain(spec.domain);
    const TaskSet tasks = make_tasks(spec.tasks, spec.domain.task_dim);
    fs::create_directories(spec.output_dir);
    write_task_csv(spec.output_dir / "tasks.csv", tasks);

    const std::size_t n_runs = spec.methods.size() * spec.n_replicates;
    std::vector<AggregateRow> rows(n_runs);
    auto run_one = [&](std::size_t k) {
        const auto& method = spec.methods[k / spec.n_replicates];
        const std::size_t rep = k % spec.n_replicates;
        auto& row = rows[k];
        row.method = method.label();
        row.replicate = rep;
        row.seed = spec.seed_base + rep;
        try {
            const RunConfig cfg = replicate_config(spec, method, rep, tasks, *domain);
            const fs::path dir = spec.output_dir / row.method / ("rep_" + std::to_string(rep));
            fs::create_directories(dir);
            LogCsvWriter log(dir / "log.csv");
            RunHooks hooks;
            hooks.on_record = [&log](const BatchRecord& r) { log.write(r); };
            const RunResult result = run(cfg, tasks, *domain, hooks);
            write_archive_csv(dir / "archive.csv", result.archive, tasks);
            const auto st = result.archive.stats();
            row.final_mean_fitness = st.mean_fitness;
            row.final_coverage = st.coverage;
            row.evaluations = result.counters.evaluations;
            if (result.counters.nonfinite * 100 > result.counters.evaluations) {
                row.status = "failed: more than 1% non-finite evaluations";
            }
        } catch (const std::exception& e) {
            row.status = std::string("failed: ") + e.what();
            row.final_mean_fitness.reset();
        }
    };

    tbb::task_arena arena(static_cast<int>(spec.jobs));
    arena.execute([&] {
        tbb::parallel_for(std::size_t{0}, n_runs, run_one);
    });

    write_aggregate_csv(spec.output_dir / "aggregate.csv", rows);
    return rows;
}

void write_aggregate_csv(const fs::path& path, const std::vector<AggregateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    csv::write_row(out, {"method", "replicate", "seed", "final_mean_fitness", "final_coverage", "evaluations", "status"});
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        csv::write_row(out, {r.method, std::to_string(r.replicate), std::to_string(r.seed),
                             csv::format_optional(r.final_mean_fitness), csv::format_optional(r.final_coverage),
                             std::to_string(r.evaluations), status});
    }
}

std::vector<AggregateRow> read_aggregate_csv(const fs::path& path) {
    const auto t = csv::read_table(path);
    const auto c_method = t.column("method");
    const auto c_rep = t.column("replicate");
    const auto c_seed = t.column("seed");
    const auto c_fit = t.column("final_mean_fitness");
    const auto c_cov = t.column("final_coverage");
    const auto c_evals = t.column("evaluations");
    const auto c_status = t.column("status");
    std::vector<AggregateRow> rows;
    for (const auto& r : t.rows) {
        AggregateRow a;
        a.method = r[c_method];
        a.replicate = csv::parse_uint(r[c_rep]);
        a.seed = csv::parse_uint(r[c_seed]);
        a.final_mean_fitness = csv::parse_optional(r[c_fit]);
        a.final_coverage = csv::parse_optional(r[c_cov]);
        a.evaluations = csv::parse_uint(r[c_evals]);
        a.status = r[c_status];
        rows.push_back(std::move(a));
    }
    return rows;
}

void write_experiment_stats(const fs::path& dir) {
    const auto rows = read_aggregate_csv(dir / "aggregate.csv");

    // Methods in first-appearance order.
    std::vector<std::string> methods;
    std::map<std::string, std::vector<double>> finals;
    std::map<std::string, std::vector<std::size_t>> reps;
    for (const auto& r : rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        if (r.status == "ok" && r.final_mean_fitness) {
            finals[r.method].push_back(*r.final_mean_fitness);
            reps[r.method].push_back(r.replicate);
        }
    }

    {
        std::ofstream out(dir / "summary.csv");
        csv::write_row(out, {"method", "n", "median", "q25", "q75"});
        for (const auto& m : methods) {
            const auto& v = finals[m];
            if (v.empty()) {
                csv::write_row(out, {m, "0", "NA", "NA", "NA"});
                continue;
            }
            const auto s = summarize(v);
            csv::write_row(out, {m, std::to_string(s.n), csv::format_double(s.median),
                                 csv::format_double(s.q25), csv::format_double(s.q75)});
        }
    }
    {
        std::ofstream out(dir / "utests.csv");
        csv::write_row(out, {"method_a", "method_b", "median_a", "median_b", "U", "p_two_sided"});
        for (std::size_t i = 0; i < methods.size(); ++i) {
            for (std::size_t j = i + 1; j < methods.size(); ++j) {
                const auto& a = finals[methods[i]];
                const auto& b = finals[methods[j]];
                if (a.empty() || b.empty()) continue;
                const auto t = mann_whitney_u(a, b);
                csv::write_row(out, {methods[i], methods[j], csv::format_double(median(a)),
                                     csv::format_double(median(b)), csv::format_double(t.u),
                                     csv::format_double(t.p_two_sided)});
            }
        }
    }
    {
        std::ofstream out(dir / "curves.csv");
        csv::write_row(out, {"method", "evaluations", "n", "median", "q25", "q75"});
        for (const auto& m : methods) {
            std::vector<std::vector<BatchRecord>> logs;
            for (std::size_t rep : reps[m]) {
                logs.push_back(read_log_csv(dir / m / ("rep_" + std::to_string(rep)) / "log.csv"));
            }
            if (logs.empty()) continue;
            std::size_t len = logs.front().size();
            for (const auto& l : logs) len = std::min(len, l.size());
            for (std::size_t i = 0; i < len; ++i) {
                std::vector<double> vals;
                for (const auto& l : logs) {
                    if (l[i].mean_fitness) vals.push_back(*l[i].mean_fitness);
                }
                if (vals.empty()) continue;
                const auto s = summarize(vals);
                csv::write_row(out, {m, std::to_string(logs.front()[i].evaluations), std::to_string(s.n),
                                     csv::format_double(s.median), csv::format_double(s.q25),
                                     csv::format_double(s.q75)});
            }
        }
    }
}

// --- exports -----------------------------------------------------------------

namespace {

// Piecewise-linear approximation of the viridis colormap.
std::string colormap(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) {
        rgb[c] = static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    }
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace

bool export_heatmap(const Archive& archive, const TaskSet& tasks, const fs::path& svg_path,
                    const fs::path& csv_path) {
    if (archive.size() != tasks.size()) throw std::invalid_argument("archive and task set sizes differ");
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path.string());
        csv::write_row(out, {"task_id", "x", "y", "fitness"});
        for (std::size_t id = 0; id < archive.size(); ++id) {
            if (!archive[id]) continue;
            const auto& p = tasks[id].params;
            csv::write_row(out, {std::to_string(id), p.size() >= 1 ? csv::format_double(p[0]) : "",
                                 p.size() >= 2 ? csv::format_double(p[1]) : "",
                                 csv::format_double(archive[id]->fitness)});
        }
    }
    if (tasks.dim() != 2) {
        std::clog << "warning: heatmap image needs a 2-D task space (got " << tasks.dim()
                  << "); wrote CSV only\n";
        return false;
    }

    const auto st = archive.stats();
    double lo = 0.0;
    double hi = 0.0;
    if (!archive.empty()) {
        lo = hi = archive[archive.filled_ids().front()]->fitness;
        for (std::size_t id : archive.filled_ids()) {
            lo = std::min(lo, archive[id]->fitness);
            hi = std::max(hi, archive[id]->fitness);
        }
    }
    constexpr double kSize = 600.0;
    constexpr double kMargin = 40.0;
    const double cell = std::max(2.0, 0.9 * kSize / std::sqrt(static_cast<double>(tasks.size())));

    std::ofstream out(svg_path);
    if (!out) throw std::runtime_error("cannot write " + svg_path.string());
    out << std::fixed << std::setprecision(2);
    const double full = kSize + 2 * kMargin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full << "\" height=\"" << full + 30
        << "\" viewBox=\"0 0 " << full << ' ' << full + 30 << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << full << "\" height=\"" << full + 30 << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t id = 0; id < tasks.size(); ++id) {
        const auto& p = tasks[id].params;
        const double x = kMargin + p[0] * kSize;
        const double y = kMargin + (1.0 - p[1]) * kSize;
        std::string fill = "#d9d9d9";
        if (archive[id]) fill = colormap(hi > lo ? (archive[id]->fitness - lo) / (hi - lo) : 0.5);
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << cell / 2 << "\" fill=\"" << fill << "\"/>\n";
    }
    out << std::setprecision(4);
    out << "<text x=\"" << kMargin << "\" y=\"" << full + 10 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << "coverage " << st.coverage << "  fitness [" << lo << ", " << hi << "]</text>\n";
    out << "</svg>\n";
    return true;
}

void export_genome_plot(const Archive& archive, const fs::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    csv::write_row(out, {"elite_id", "param_index", "param_value", "fitness"});
    for (std::size_t id = 0; id < archive.size(); ++id) {
        const auto& e = archive[id];
        if (!e) continue;
        const auto fit = csv::format_double(e->fitness);
        for (std::size_t k = 0; k < e->genome.size(); ++k) {
            csv::write_row(out, {std::to_string(id), std::to_string(k), csv::format_double(e->genome[k]), fit});
        }
    }
}

std::vector<CrossEvalRow> cross_evaluate_top_elites(const Archive& archive, const TaskSet& tasks,
                                                    const Domain& domain, double top_fraction) {
    if (archive.empty()) throw std::invalid_argument("cross_evaluate_top_elites: empty archive");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
        throw std::invalid_argument("cross_evaluate_top_elites: top_fraction must be in (0, 1]");
    }
    std::vector<std::size_t> ranked(archive.filled_ids().begin(), archive.filled_ids().end());
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        const double fa = archive[a]->fitness;
        const double fb = archive[b]->fitness;
        return fa != fb ? fa > fb : a < b;
    });
    const auto n_top = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(ranked.size()) - 1e-9));
    ranked.resize(std::max<std::size_t>(1, std::min(n_top, ranked.size())));

    std::vector<std::size_t> filled(archive.filled_ids().begin(), archive.filled_ids().end());
    std::sort(filled.begin(), filled.end());

    std::vector<CrossEvalRow> rows;
    rows.reserve(ranked.size() * filled.size());
    for (std::size_t top : ranked) {
        const auto& genome = archive[top]->genome;
        for (std::size_t t : filled) {
            CrossEvalRow r;
            r.top_elite = top;
            r.task = t;
            r.fitness_top = domain.evaluate(genome, tasks[t]);
            r.fitness_elite = archive[t]->fitness;
            r.delta = r.fitness_top - r.fitness_elite;
            rows.push_back(r);
        }
    }
    return rows;
}

void write_cross_eval_csv(const fs::path& path, const std::vector<CrossEvalRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    csv::write_row(out, {"top_elite", "task_id", "fitness_top", "fitness_elite", "delta"});
    for (const auto& r : rows) {
        csv::write_row(out, {std::to_string(r.top_elite), std::to_string(r.task), csv::format_double(r.fitness_top),
                             csv::format_double(r.fitness_elite), csv::format_double(r.delta)});
    }
}

}  // namespace mtme
