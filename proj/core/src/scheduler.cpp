#include "mtme/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtme/check.hpp"

namespace mtme {

std::size_t tournament_select_task(const TaskDescriptor& parent_task, const TaskSet& tasks,
                                   std::size_t s, Rng& rng) {
    const std::size_t n = tasks.size();
    MTME_CHECK(s >= 1 && s <= n, "tournament size outside [1, |T|]");

    // Floyd's sampling of s distinct ids from [0, n). The mark buffer is
    // returned to all-zero before leaving so that results never depend on
    // which thread ran the previous call.
    thread_local std::vector<std::uint8_t> marks;
    thread_local std::vector<std::size_t> drawn;
    if (marks.size() < n) marks.assign(n, 0);
    drawn.clear();

    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    auto consider = [&](std::size_t id) {
        marks[id] = 1;
        drawn.push_back(id);
        const double d = task_distance(tasks[id], parent_task);
        if (d < best_d || (d == best_d && id < best)) {
            best_d = d;
            best = id;
        }
    };

    for (std::size_t j = n - s; j < n; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        consider(marks[t] ? j : t);
    }
    for (std::size_t id : drawn) marks[id] = 0;
    return best;
}

std::size_t count_batch_successes(std::span<const std::uint8_t> inserted) {
    return static_cast<std::size_t>(std::count_if(inserted.begin(), inserted.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

std::size_t count_batch_successes(const std::vector<bool>& inserted) {
    return static_cast<std::size_t>(std::count(inserted.begin(), inserted.end(), true));
}

BanditState BanditState::for_sizes(std::vector<std::size_t> sizes) {
    if (sizes.empty()) throw std::invalid_argument("BanditState: no arms");
    BanditState st;
    st.selected.assign(sizes.size(), 0);
    st.successes.assign(sizes.size(), 0);
    st.sizes = std::move(sizes);
    return st;
}

std::size_t ucb1_select(const BanditState& state, std::size_t batch_size, UcbReward reward) {
    MTME_CHECK(!state.sizes.empty(), "bandit has no arms");
    MTME_CHECK(batch_size >= 1, "batch size must be >= 1");
    for (std::size_t i = 0; i < state.selected.size(); ++i) {
        if (state.selected[i] == 0) return i;
    }
    const double log_g = std::log(static_cast<double>(std::max<std::uint64_t>(state.generation, 1)));
    const double scale = reward == UcbReward::normalized ? static_cast<double>(batch_size) : 1.0;

    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.selected.size(); ++i) {
        const double n_i = static_cast<double>(state.selected[i]);
        const double mean = static_cast<double>(state.successes[i]) / (n_i * scale);
        const double score = mean + std::sqrt(2.0 * log_g / n_i);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

BanditState bandit_update(BanditState state, std::size_t arm, std::uint64_t batch_successes,
                          std::size_t batch_size) {
    MTME_CHECK(arm < state.sizes.size(), "arm index out of range");
    MTME_CHECK(batch_successes <= batch_size, "more successes than batch items");
    ++state.selected[arm];
    state.successes[arm] += batch_successes;
    ++state.generation;
    state.current_arm = arm;
    return state;
}

}  // namespace mtme
