#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "mtme/domains.hpp"
#include "mtme/random.hpp"

namespace mtme {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(ArmNormalize, CenterGenomeIsStraight) {
    const Genome g(10, 0.5);
    const auto pose = arm_normalize(g, {1.0, 1.0}, 10);
    for (double a : pose.angles) EXPECT_EQ(a, 0.0);
}

TEST(ArmNormalize, FullComponentGivesTenthOfHalfTurn) {
    Genome g(10, 0.5);
    g[3] = 1.0;
    const auto pose = arm_normalize(g, {1.0, 1.0}, 10);
    EXPECT_DOUBLE_EQ(pose.angles[3], kPi / 10.0);
}

TEST(ArmNormalize, LinkLengthScalesWithJointCount) {
    const auto pose = arm_normalize(Genome(10, 0.2), {1.0, 0.5}, 10);
    EXPECT_DOUBLE_EQ(pose.link_length, 0.1);
}

TEST(ArmKinematics, StraightChain) {
    const std::vector<double> zeros(7, 0.0);
    const auto tip = arm_forward_kinematics(zeros, 0.25);
    EXPECT_DOUBLE_EQ(tip[0], 1.75);
    EXPECT_EQ(tip[1], 0.0);
}

// Hand product for d = 2: Rz(a1) Tx(l) Rz(a2) Tx(l) (0,0,0,1)^T
//   = l (cos a1 + cos(a1 + a2), sin a1 + sin(a1 + a2)).
// So the first joint already rotates the first link; (pi/2, 0) with l = 0.5
// points straight up.
TEST(ArmKinematics, TwoLinkHandProduct) {
    const std::vector<double> angles{kPi / 2.0, 0.0};
    const auto tip = arm_forward_kinematics(angles, 0.5);
    EXPECT_NEAR(tip[0], 0.0, 1e-15);
    EXPECT_NEAR(tip[1], 1.0, 1e-15);
    const auto chain = oracle::arm_tip_matrix_chain(angles, 0.5);
    EXPECT_NEAR(chain[0], 0.0, 1e-15);
    EXPECT_NEAR(chain[1], 1.0, 1e-15);
}

TEST(ArmKinematicsProperty, AgreesWithMatrixChainAndComplexSum) {
    Rng rng(2024);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t d = std::array<std::size_t, 4>{2, 5, 10, 20}[trial % 4];
        const Genome g = random_unit_vector(d, rng);
        const ArmTask task{uniform01(rng), uniform01(rng)};
        const auto pose = arm_normalize(g, task, d);
        const auto tip = arm_forward_kinematics(pose.angles, pose.link_length);
        const auto chain = oracle::arm_tip_matrix_chain(pose.angles, pose.link_length);
        const auto sum = oracle::arm_tip_complex_sum(pose.angles, pose.link_length);
        ASSERT_NEAR(tip[0], chain[0], 1e-12);
        ASSERT_NEAR(tip[1], chain[1], 1e-12);
        ASSERT_NEAR(tip[0], sum[0], 1e-12);
        ASSERT_NEAR(tip[1], sum[1], 1e-12);
    }
}

TEST(ArmFitness, StraightArmMissesTargetByOne) {
    EXPECT_NEAR(arm_fitness(Genome(10, 0.5), {1.0, 1.0}, {}), -1.0, 1e-15);
}

TEST(ArmFitness, ZeroLengthArm) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i)
        EXPECT_DOUBLE_EQ(arm_fitness(random_unit_vector(10, rng), {0.0, uniform01(rng)}, {}), -std::sqrt(2.0));
}

TEST(ArmFitnessProperty, TriangleInequalityBound) {
    Rng rng(4);
    for (int i = 0; i < 10000; ++i) {
        const double f = arm_fitness(random_unit_vector(10, rng), {uniform01(rng), uniform01(rng)}, {});
        EXPECT_LE(f, 0.0);
        EXPECT_GE(f, -(1.0 + std::sqrt(2.0)));
    }
}

TEST(ArmFitnessProperty, StraightArmTipIndependentOfJointCount) {
    for (std::size_t d : {1u, 2u, 3u, 5u, 10u, 20u, 100u}) {
        for (double L : {0.0, 0.3, 1.0}) {
            const auto pose = arm_normalize(Genome(d, 0.5), {L, 0.7}, d);
            const auto tip = arm_forward_kinematics(pose.angles, pose.link_length);
            EXPECT_NEAR(tip[0], L, 1e-13);
            EXPECT_EQ(tip[1], 0.0);
        }
    }
}

TEST(ArmDomain, EvaluateUsesTaskParams) {
    const ArmDomain dom({10, {1.0, 1.0}});
    const TaskDescriptor t{0, {1.0, 0.4}};
    EXPECT_NEAR(dom.evaluate(Genome(10, 0.5), t), -1.0, 1e-15);
    EXPECT_EQ(dom.genome_dim(), 10u);
    EXPECT_EQ(dom.task_dim(), 2u);
}

TEST(Synthetic, OptimumHasZeroFitness) {
    const SyntheticDomain dom;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const TaskDescriptor t{0, random_unit_vector(12, rng)};
        EXPECT_NEAR(dom.evaluate(dom.optimum(t.params), t), 0.0, 1e-15);
    }
}

TEST(Synthetic, OneCoordinateOffBySixth) {
    const SyntheticDomain dom;
    const TaskDescriptor t{0, std::vector<double>(12, 0.25)};
    auto x = dom.optimum(t.params);
    x[7] += 1.0 / 6.0;
    EXPECT_NEAR(dom.evaluate(x, t), -0.05077160493827161, 1e-14);
    EXPECT_NEAR(synthetic_term(1.0 / 6.0), 1.827777777777778, 1e-14);
}

TEST(Synthetic, DimensionMismatchThrows) {
    const SyntheticDomain dom;
    const TaskDescriptor t{0, std::vector<double>(12, 0.5)};
    EXPECT_THROW(dom.evaluate(Genome(35, 0.5), t), std::invalid_argument);
    EXPECT_THROW(dom.evaluate(Genome(36, 0.5), TaskDescriptor{0, {0.5}}), std::invalid_argument);
}

TEST(Synthetic, ConstantsFollowSeed) {
    const SyntheticDomain a;
    const SyntheticDomain b;
    const SyntheticDomain c({36, 12, 1});
    for (std::size_t i = 0; i < 36; ++i) {
        EXPECT_EQ(a.phase(i), b.phase(i));
        EXPECT_GE(a.phase(i), 0.0);
        EXPECT_LT(a.phase(i), 2.0 * kPi);
        for (double w : a.weights(i)) EXPECT_LE(std::abs(w), SyntheticDomain::kWeightRange);
    }
    EXPECT_NE(a.phase(0), c.phase(0));
}

// u^2 - 0.9 cos(6 pi u) + 0.9 >= 0 with equality only at 0.
TEST(SyntheticProperty, TermIsNonNegativeOnDenseScan) {
    const int n = 2000001;
    for (int i = 0; i < n; ++i) {
        const double u = -1.0 + 2.0 * i / (n - 1);
        const double v = synthetic_term(u);
        if (i == (n - 1) / 2) {
            EXPECT_EQ(v, 0.0);
        } else {
            ASSERT_GT(v, 0.0) << "u = " << u;
        }
    }
}

TEST(SyntheticProperty, FitnessIsNonPositive) {
    const SyntheticDomain dom;
    Rng rng(6);
    for (int i = 0; i < 5000; ++i) {
        const TaskDescriptor t{0, random_unit_vector(12, rng)};
        EXPECT_LE(dom.evaluate(random_unit_vector(36, rng), t), 0.0);
    }
}

// |o_i(t1) - o_i(t2)| <= 0.3 * 2 pi * |w_i| * |t1 - t2| per coordinate, so the
// max-norm obeys the bound with max_i |w_i| and the Euclidean norm obeys it
// up to a factor sqrt(genome_dim).
TEST(SyntheticProperty, OptimumIsLipschitzInTask) {
    const SyntheticDomain dom;
    double max_w = 0.0;
    for (std::size_t i = 0; i < 36; ++i) {
        double s = 0.0;
        for (double w : dom.weights(i)) s += w * w;
        max_w = std::max(max_w, std::sqrt(s));
    }
    const double lip = SyntheticDomain::kOptimumSwing * 2.0 * kPi * max_w;
    Rng rng(7);
    for (int trial = 0; trial < 5000; ++trial) {
        const auto t1 = random_unit_vector(12, rng);
        auto t2 = t1;
        const double scale = std::pow(10.0, -4.0 * uniform01(rng));
        for (auto& v : t2) v = std::clamp(v + scale * (uniform01(rng) - 0.5), 0.0, 1.0);
        double dt = 0.0;
        for (std::size_t k = 0; k < 12; ++k) dt += (t1[k] - t2[k]) * (t1[k] - t2[k]);
        dt = std::sqrt(dt);
        const auto o1 = dom.optimum(t1);
        const auto o2 = dom.optimum(t2);
        double linf = 0.0, l2 = 0.0;
        for (std::size_t i = 0; i < 36; ++i) {
            linf = std::max(linf, std::abs(o1[i] - o2[i]));
            l2 += (o1[i] - o2[i]) * (o1[i] - o2[i]);
        }
        EXPECT_LE(linf, lip * dt + 1e-15);
        EXPECT_LE(std::sqrt(l2), std::sqrt(36.0) * lip * dt + 1e-15);
    }
}

TEST(Domains, PureAndDeterministic) {
    const SyntheticDomain syn;
    const ArmDomain arm({10, {1.0, 1.0}});
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto g = random_unit_vector(36, rng);
        const TaskDescriptor t{0, random_unit_vector(12, rng)};
        EXPECT_EQ(syn.evaluate(g, t), syn.evaluate(g, t));
        const auto ga = random_unit_vector(10, rng);
        const TaskDescriptor ta{0, random_unit_vector(2, rng)};
        EXPECT_EQ(arm.evaluate(ga, ta), arm.evaluate(ga, ta));
    }
}

}  // namespace
}  // namespace mtme
