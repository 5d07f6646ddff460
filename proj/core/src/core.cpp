#include "mtme/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "mtme/check.hpp"

namespace mtme {

namespace detail {

void check_failed(const char* expr, const char* msg, const char* file, int line) {
    std::fprintf(stderr, "%s:%d: check failed: %s (%s)\n", file, line, expr, msg);
    std::abort();
}

}  // namespace detail

std::string_view to_string(Method m) {
    switch (m) {
        case Method::mtme: return "mtme";
        case Method::me_random_task: return "me_random_task";
        case Method::me_all_tasks: return "me_all_tasks";
        case Method::random_sampling: return "random_sampling";
        case Method::es_per_task: return "es_per_task";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : all_methods()) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::vector<Method> all_methods() {
    return {Method::mtme, Method::me_random_task, Method::me_all_tasks,
            Method::random_sampling, Method::es_per_task};
}

std::vector<std::size_t> RunConfig::effective_tournament_sizes() const {
    if (!tournament_sizes.empty()) return tournament_sizes;
    std::vector<std::size_t> sizes;
    for (std::size_t s : {1, 5, 10, 50, 100, 500, 1000}) {
        std::size_t capped = std::min(s, n_tasks);
        if (capped >= 1 && (sizes.empty() || sizes.back() < capped)) sizes.push_back(capped);
    }
    return sizes;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("RunConfig: " + what); };
    if (n_tasks == 0) fail("n_tasks must be >= 1");
    if (d_genome == 0) fail("d_genome must be >= 1");
    if (d_task == 0) fail("d_task must be >= 1");
    if (batch_size == 0) fail("batch_size must be >= 1");
    if (init_count == 0) fail("init_count must be >= 1");
    if (eval_budget < init_count) fail("eval_budget must be >= init_count");
    if (workers == 0) fail("workers must be >= 1");
    if (!std::isfinite(sigma_iso) || sigma_iso < 0.0) fail("sigma_iso must be finite and >= 0");
    if (!std::isfinite(sigma_line) || sigma_line < 0.0) fail("sigma_line must be finite and >= 0");
    if (!(es_initial_step > 0.0) || !(es_step_factor > 1.0)) fail("invalid ES step settings");

    if (method == Method::mtme) {
        const auto sizes = effective_tournament_sizes();
        if (sizes.empty()) fail("tournament size list is empty");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (sizes[i] < 1 || sizes[i] > n_tasks) fail("tournament sizes must lie in [1, n_tasks]");
            if (i > 0 && sizes[i] <= sizes[i - 1]) fail("tournament sizes must be strictly increasing");
        }
        if (fixed_tournament && (*fixed_tournament < 1 || *fixed_tournament > n_tasks)) {
            fail("fixed tournament size must lie in [1, n_tasks]");
        }
    } else if (fixed_tournament) {
        fail("a fixed tournament size only applies to mtme");
    }
    if (method == Method::me_all_tasks &&
        eval_budget - init_count < static_cast<std::uint64_t>(batch_size) * n_tasks) {
        fail("me_all_tasks needs eval_budget - init_count >= batch_size * n_tasks");
    }
}

Archive::Archive(std::size_t n_tasks) : slots_(n_tasks) {}

bool Archive::would_accept(std::size_t task_id, double fitness) const {
    MTME_CHECK(task_id < slots_.size(), "task id out of range");
    const auto& slot = slots_[task_id];
    return !slot || fitness > slot->fitness;
}

bool Archive::insert(std::size_t task_id, Genome genome, double fitness, std::uint64_t eval_count) {
    MTME_CHECK(task_id < slots_.size(), "task id out of range");
    if (!std::isfinite(fitness)) {
        throw std::invalid_argument("Archive::insert: non-finite fitness");
    }
    auto& slot = slots_[task_id];
    if (slot && !(fitness > slot->fitness)) return false;

    if (slot) {
        add_to_sum(-slot->fitness);
    } else {
        filled_ids_.push_back(task_id);
    }
    add_to_sum(fitness);
    if (!max_ || fitness > *max_) max_ = fitness;
    slot = Elite{std::move(genome), fitness, eval_count};
    return true;
}

void Archive::add_to_sum(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        sum_compensation_ += (sum_ - t) + v;
    } else {
        sum_compensation_ += (v - t) + sum_;
    }
    sum_ = t;
}

const std::optional<Elite>& Archive::at(std::size_t task_id) const {
    MTME_CHECK(task_id < slots_.size(), "task id out of range");
    return slots_[task_id];
}

ArchiveStats Archive::stats() const {
    ArchiveStats s;
    if (slots_.empty()) return s;
    s.coverage = static_cast<double>(filled_ids_.size()) / static_cast<double>(slots_.size());
    if (!filled_ids_.empty()) {
        s.mean_fitness = (sum_ + sum_compensation_) / static_cast<double>(filled_ids_.size());
        s.max_fitness = max_;
    }
    return s;
}

bool operator==(const Elite& a, const Elite& b) {
    return a.fitness == b.fitness && a.genome == b.genome &&
           a.eval_count_at_insert == b.eval_count_at_insert;
}

bool operator==(const Archive& a, const Archive& b) {
    return a.slots_ == b.slots_;
}

}  // namespace mtme
