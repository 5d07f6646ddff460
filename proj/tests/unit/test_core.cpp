#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "mtme/core.hpp"
#include "mtme/engine.hpp"
#include "mtme/random.hpp"
#include "mtme/tasks.hpp"

namespace mtme {
namespace {

TEST(Archive, InsertIntoEmptySlot) {
    Archive a(10);
    EXPECT_TRUE(a.insert(7, {0.1, 0.2}, -0.5));
    ASSERT_TRUE(a[7].has_value());
    EXPECT_EQ(a[7]->fitness, -0.5);
    EXPECT_EQ(a.filled_count(), 1u);
}

TEST(Archive, EqualFitnessDoesNotReplace) {
    Archive a(10);
    ASSERT_TRUE(a.insert(3, {0.1}, -0.3));
    EXPECT_FALSE(a.insert(3, {0.9}, -0.3));
    EXPECT_EQ(a[3]->genome, Genome{0.1});
}

TEST(Archive, StrictImprovementReplaces) {
    Archive a(10);
    ASSERT_TRUE(a.insert(3, {0.1}, -0.3));
    EXPECT_TRUE(a.insert(3, {0.9}, -0.1));
    EXPECT_EQ(a[3]->fitness, -0.1);
    EXPECT_EQ(a.filled_count(), 1u);
}

TEST(Archive, RejectsNonFiniteFitness) {
    Archive a(4);
    EXPECT_THROW(a.insert(0, {0.5}, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    EXPECT_THROW(a.insert(0, {0.5}, std::numeric_limits<double>::infinity()), std::invalid_argument);
    EXPECT_TRUE(a.empty());
}

TEST(ArchiveDeathTest, OutOfRangeTaskAborts) {
    Archive a(4);
    EXPECT_DEATH(a.insert(4, {0.5}, -1.0), "task id out of range");
}

TEST(ArchiveStats, EmptyArchiveHasUndefinedMean) {
    Archive a(5);
    const auto s = a.stats();
    EXPECT_EQ(s.coverage, 0.0);
    EXPECT_FALSE(s.mean_fitness.has_value());
    EXPECT_FALSE(s.max_fitness.has_value());
}

TEST(ArchiveStats, PartialArchive) {
    Archive a(4);
    a.insert(0, {0.0}, -1.0);
    a.insert(2, {0.0}, -3.0);
    const auto s = a.stats();
    EXPECT_EQ(s.coverage, 0.5);
    EXPECT_DOUBLE_EQ(*s.mean_fitness, -2.0);
    EXPECT_EQ(*s.max_fitness, -1.0);
}

TEST(ArchiveStats, ConstantFitness) {
    Archive a(6);
    for (std::size_t i = 0; i < 6; ++i) a.insert(i, {0.0}, -0.25);
    const auto s = a.stats();
    EXPECT_EQ(s.coverage, 1.0);
    EXPECT_EQ(*s.mean_fitness, -0.25);
    EXPECT_EQ(*s.max_fitness, -0.25);
}

// Random insert sequences: per-slot fitness and filled count never decrease,
// and the tracked mean matches a brute-force recomputation.
TEST(ArchiveProperty, MonotoneAndMeanMatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = 1 + uniform_index(rng, 50);
        Archive a(n);
        std::vector<double> best(n, -std::numeric_limits<double>::infinity());
        std::size_t filled = 0;
        for (int step = 0; step < 5000; ++step) {
            const std::size_t id = uniform_index(rng, n);
            const double f = -100.0 * uniform01(rng) + (uniform01(rng) < 0.1 ? 1e6 : 0.0);
            const bool was_filled = a[id].has_value();
            const double before = was_filled ? a[id]->fitness : -std::numeric_limits<double>::infinity();
            const bool ok = a.insert(id, {f}, f);
            EXPECT_EQ(ok, !was_filled || f > before);
            EXPECT_GE(a[id]->fitness, before);
            EXPECT_GE(a.filled_count(), filled);
            filled = a.filled_count();
            best[id] = std::max(best[id], f);
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i]) {
                EXPECT_EQ(a[i]->fitness, best[i]);
                sum += a[i]->fitness;
                ++count;
            }
        }
        ASSERT_EQ(count, a.filled_count());
        const double brute = sum / static_cast<double>(count);
        EXPECT_LE(std::abs(*a.stats().mean_fitness - brute), 1e-12 * std::abs(brute));
    }
}

TEST(RunConfig, DefaultTournamentSizesAreCappedAtTaskCount) {
    RunConfig c;
    c.n_tasks = 500;
    EXPECT_EQ(c.effective_tournament_sizes(), (std::vector<std::size_t>{1, 5, 10, 50, 100, 500}));
    c.n_tasks = 3;
    EXPECT_EQ(c.effective_tournament_sizes(), (std::vector<std::size_t>{1, 3}));
    c.n_tasks = 5000;
    EXPECT_EQ(c.effective_tournament_sizes(), (std::vector<std::size_t>{1, 5, 10, 50, 100, 500, 1000}));
}

TEST(RunConfig, ValidationRejectsBadValues) {
    RunConfig c;
    c.n_tasks = 10;
    c.d_genome = 3;
    c.d_task = 2;
    c.eval_budget = 1000;
    EXPECT_NO_THROW(c.validate());

    auto bad = c;
    bad.tournament_sizes = {1, 5, 5};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.tournament_sizes = {1, 11};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.batch_size = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.eval_budget = 10;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.fixed_tournament = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Method, NamesRoundTrip) {
    for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_FALSE(parse_method("cma_es").has_value());
}

TEST(ArchiveCsv, RoundTripIsBitExact) {
    const TaskSet tasks = generate_uniform(40, 3, 5);
    Rng rng(99);
    Archive a(tasks.size());
    for (int i = 0; i < 60; ++i) {
        const std::size_t id = uniform_index(rng, tasks.size());
        Genome g = random_unit_vector(4, rng);
        const double f = -std::exp(uniform01(rng)) / 3.0;
        a.insert(id, g, f);
    }
    const auto path = std::filesystem::temp_directory_path() / "mtme_archive_roundtrip.csv";
    write_archive_csv(path, a, tasks);
    const Archive back = read_archive_csv(path, tasks);
    ASSERT_EQ(back.filled_count(), a.filled_count());
    for (std::size_t id = 0; id < a.size(); ++id) {
        ASSERT_EQ(a[id].has_value(), back[id].has_value());
        if (!a[id]) continue;
        EXPECT_EQ(a[id]->fitness, back[id]->fitness);
        EXPECT_EQ(a[id]->genome, back[id]->genome);
    }
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace mtme
