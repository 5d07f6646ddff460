#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "mtme/random.hpp"
#include "mtme/scheduler.hpp"
#include "mtme/tasks.hpp"

namespace mtme {
namespace {

std::size_t brute_force_nearest(const TaskDescriptor& ref, const TaskSet& tasks) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < tasks.dim(); ++k) {
            const double d = tasks[i].params[k] - ref.params[k];
            s += d * d;
        }
        if (std::sqrt(s) < best_d) {
            best_d = std::sqrt(s);
            best = i;
        }
    }
    return best;
}

TEST(Tournament, SizeOneIsUniform) {
    const TaskSet t = generate_uniform(20, 2, 1);
    Rng rng(4);
    std::map<std::size_t, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[tournament_select_task(t[0], t, 1, rng)];
    ASSERT_EQ(counts.size(), 20u);
    for (const auto& [id, c] : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.05, 0.005);
}

TEST(Tournament, SizeOneConsumesOneUniformDraw) {
    const TaskSet t = generate_uniform(37, 2, 1);
    Rng a(8);
    Rng b(8);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(tournament_select_task(t[3], t, 1, a), uniform_index(b, t.size()));
}

TEST(Tournament, FullSizeReturnsParentTask) {
    const TaskSet t = generate_uniform(100, 3, 2);
    Rng rng(5);
    for (std::size_t id = 0; id < t.size(); ++id) EXPECT_EQ(tournament_select_task(t[id], t, t.size(), rng), id);
}

TEST(TournamentProperty, FullSizeEqualsBruteForceArgmin) {
    const TaskSet t = generate_uniform(200, 2, 9);
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        const TaskDescriptor ref{0, random_unit_vector(2, rng)};
        EXPECT_EQ(tournament_select_task(ref, t, t.size(), rng), brute_force_nearest(ref, t));
    }
}

TEST(TournamentProperty, MeanDistanceNonIncreasingInSize) {
    const TaskSet t = generate_uniform(500, 2, 12);
    Rng rng(13);
    double previous = INFINITY;
    for (std::size_t s : {1, 2, 5, 10, 50, 100, 500}) {
        double mean = 0.0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            const std::size_t parent = uniform_index(rng, t.size());
            mean += task_distance(t[parent], t[tournament_select_task(t[parent], t, s, rng)]) / trials;
        }
        EXPECT_LE(mean, previous + 1e-3) << "s = " << s;
        previous = mean;
    }
}

TEST(Tournament, DrawsDistinctTasks) {
    // With s = |T| - 1 exactly one task is left out, so the parent's own task
    // is returned unless it was the one excluded.
    const TaskSet t = generate_uniform(10, 2, 3);
    Rng rng(17);
    int self = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) self += tournament_select_task(t[4], t, 9, rng) == 4;
    EXPECT_NEAR(static_cast<double>(self) / trials, 0.9, 0.01);
}

TEST(BatchSuccesses, Counts) {
    EXPECT_EQ(count_batch_successes(std::vector<bool>(5, false)), 0u);
    EXPECT_EQ(count_batch_successes(std::vector<bool>{true, false, true}), 2u);
    EXPECT_EQ(count_batch_successes(std::vector<bool>(64, true)), 64u);
}

TEST(Ucb1, UntriedArmsFirstInOrder) {
    auto st = BanditState::for_sizes({1, 10, 100});
    const std::size_t B = 64;
    EXPECT_EQ(ucb1_select(st, B), 0u);
    st = bandit_update(st, 0, 64, B);
    EXPECT_EQ(ucb1_select(st, B), 1u);
    st = bandit_update(st, 1, 0, B);
    EXPECT_EQ(ucb1_select(st, B), 2u);
}

// Hand-evaluated: 0.5 + sqrt(2 ln 8 / 4) = 1.5197 > 0.25 + 1.0197 = 1.2697.
TEST(Ucb1, ExploitsHigherMeanAtEqualCounts) {
    const std::size_t B = 10;
    BanditState st = BanditState::for_sizes({1, 10});
    st.selected = {4, 4};
    st.successes = {20, 10};  // means 20 / (4 * 10) = 0.5 and 0.25
    st.generation = 8;
    EXPECT_EQ(ucb1_select(st, B), 0u);
}

// Hand-evaluated: arm 1 scores 0.25 + sqrt(2 ln 101) = 3.288 vs 0.804 for arm 0.
TEST(Ucb1, ExplorationBonusDominatesRareArm) {
    const std::size_t B = 4;
    BanditState st = BanditState::for_sizes({1, 10});
    st.selected = {100, 1};
    st.successes = {200, 1};  // means 0.5 and 0.25
    st.generation = 101;
    EXPECT_EQ(ucb1_select(st, B), 1u);
}

TEST(Ucb1, RawRewardUsesUnscaledMeans) {
    BanditState st = BanditState::for_sizes({1, 10});
    st.selected = {10, 10};
    st.successes = {30, 35};
    st.generation = 20;
    EXPECT_EQ(ucb1_select(st, 64, UcbReward::raw), 1u);
}

TEST(Ucb1, SingleArmAlwaysChosen) {
    auto st = BanditState::for_sizes({7});
    Rng rng(1);
    for (int g = 0; g < 100; ++g) {
        EXPECT_EQ(ucb1_select(st, 8), 0u);
        st = bandit_update(st, 0, uniform_index(rng, 9), 8);
    }
}

TEST(Ucb1, TiesGoToLowestIndex) {
    BanditState st = BanditState::for_sizes({1, 2, 3});
    st.selected = {5, 5, 5};
    st.successes = {2, 2, 2};
    st.generation = 15;
    EXPECT_EQ(ucb1_select(st, 1), 0u);
}

// Stationary two-armed Bernoulli bandit (p = 0.8 vs 0.2, one pull per
// generation): arm 0 dominates the last 100 of 1000 generations.
TEST(Ucb1Property, ConvergesOnStationaryBernoulliBandit) {
    double share = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        auto st = BanditState::for_sizes({1, 2});
        int late_best = 0;
        for (int g = 0; g < 1000; ++g) {
            const std::size_t arm = ucb1_select(st, 1);
            const double p = arm == 0 ? 0.8 : 0.2;
            st = bandit_update(st, arm, uniform01(rng) < p ? 1 : 0, 1);
            if (g >= 900) late_best += arm == 0;
        }
        share += late_best / 100.0 / 20.0;
    }
    EXPECT_GE(share, 0.9);
}

TEST(BanditUpdate, CountersAreAdditiveAndIsolated) {
    auto st = BanditState::for_sizes({1, 5, 10});
    st = bandit_update(st, 0, 5, 64);
    EXPECT_EQ(st.selected, (std::vector<std::uint64_t>{1, 0, 0}));
    EXPECT_EQ(st.successes, (std::vector<std::uint64_t>{5, 0, 0}));
    EXPECT_EQ(st.generation, 1u);
    st = bandit_update(st, 0, 7, 64);
    EXPECT_EQ(st.selected[0], 2u);
    EXPECT_EQ(st.successes[0], 12u);
    const auto before = st;
    st = bandit_update(st, 2, 3, 64);
    EXPECT_EQ(st.selected[0], before.selected[0]);
    EXPECT_EQ(st.successes[1], before.successes[1]);
    EXPECT_EQ(st.generation, 3u);
}

TEST(BanditUpdateProperty, InvariantsHoldUnderRandomUpdates) {
    Rng rng(77);
    const std::size_t B = 16;
    auto st = BanditState::for_sizes({1, 5, 10, 50});
    for (int g = 0; g < 2000; ++g) {
        st = bandit_update(st, ucb1_select(st, B), uniform_index(rng, B + 1), B);
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < st.sizes.size(); ++i) {
            total += st.selected[i];
            EXPECT_LE(st.successes[i], st.selected[i] * B);
        }
        EXPECT_EQ(total, st.generation);
    }
}

}  // namespace
}  // namespace mtme
