#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mtme/core.hpp"
#include "mtme/random.hpp"
#include "mtme/tasks.hpp"

namespace mtme {

/// Draws `s` distinct task ids uniformly from the whole task set (filled and
/// empty niches alike) and returns the one closest to `parent_task`, ties to
/// the lowest id. s = 1 is a uniform task choice; s = |T| is the global
/// nearest task.
std::size_t tournament_select_task(const TaskDescriptor& parent_task, const TaskSet& tasks,
                                   std::size_t s, Rng& rng);

/// Number of candidates in a batch that entered the archive.
std::size_t count_batch_successes(std::span<const std::uint8_t> inserted);
std::size_t count_batch_successes(const std::vector<bool>& inserted);

/// UCB1 state over a list of tournament sizes (the arms).
struct BanditState {
    std::vector<std::size_t> sizes;
    std::vector<std::uint64_t> selected;
    std::vector<std::uint64_t> successes;
    std::uint64_t generation = 0;
    std::size_t current_arm = 0;

    static BanditState for_sizes(std::vector<std::size_t> sizes);

    friend bool operator==(const BanditState&, const BanditState&) = default;
};

/// Untried arms first (lowest index); otherwise argmax of
/// mean_reward_i + sqrt(2 ln g / n_i), ties to the lowest index. With
/// UcbReward::normalized the mean reward is successes_i / (n_i * batch_size).
std::size_t ucb1_select(const BanditState& state, std::size_t batch_size,
                        UcbReward reward = UcbReward::normalized);

/// One completed generation on `arm` with `batch_successes` niche invasions.
BanditState bandit_update(BanditState state, std::size_t arm, std::uint64_t batch_successes,
                          std::size_t batch_size);

}  // namespace mtme
