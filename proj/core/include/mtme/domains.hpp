#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mtme/core.hpp"

namespace mtme {

/// Task-parameterized fitness f(genome, task); higher is better. Must be pure
/// so that evaluations can run concurrently.
class Domain {
public:
    virtual ~Domain() = default;
    virtual std::string name() const = 0;
    virtual std::size_t genome_dim() const = 0;
    virtual std::size_t task_dim() const = 0;
    virtual double evaluate(std::span<const double> genome, const TaskDescriptor& task) const = 0;
};

/// Adapts a callable; handy for tests and quick experiments.
class FunctionDomain final : public Domain {
public:
    using Fn = std::function<double(std::span<const double>, const TaskDescriptor&)>;
    FunctionDomain(std::string name, std::size_t genome_dim, std::size_t task_dim, Fn fn)
        : name_(std::move(name)), genome_dim_(genome_dim), task_dim_(task_dim), fn_(std::move(fn)) {}

    std::string name() const override { return name_; }
    std::size_t genome_dim() const override { return genome_dim_; }
    std::size_t task_dim() const override { return task_dim_; }
    double evaluate(std::span<const double> genome, const TaskDescriptor& task) const override {
        return fn_(genome, task);
    }

private:
    std::string name_;
    std::size_t genome_dim_;
    std::size_t task_dim_;
    Fn fn_;
};

// ---------------------------------------------------------------------------
// Planar arm with variable morphology.
//
// A task is (L, alpha_max) in [0,1]^2. Genome component g_i maps to the joint
// angle (g_i - 0.5) * alpha_max * 2 pi / d and every link has length L / d, so
// the total length is L whatever the number of joints. Joint i rotates link i
// and everything after it.

struct ArmTask {
    double length = 1.0;     // L
    double alpha_max = 1.0;  // fraction of a full turn

    static ArmTask from_params(std::span<const double> params);
};

struct ArmDomainConfig {
    std::size_t d = 10;
    std::array<double, 2> target{1.0, 1.0};
};

struct ArmPose {
    std::vector<double> angles;  // radians
    double link_length = 0.0;    // meters
};

using Point2 = std::array<double, 2>;

ArmPose arm_normalize(std::span<const double> genome, const ArmTask& task, std::size_t d);
Point2 arm_forward_kinematics(std::span<const double> angles, double link_length);
double arm_fitness(std::span<const double> genome, const ArmTask& task, const ArmDomainConfig& cfg);

class ArmDomain final : public Domain {
public:
    explicit ArmDomain(ArmDomainConfig cfg);
    std::string name() const override { return "arm"; }
    std::size_t genome_dim() const override { return cfg_.d; }
    std::size_t task_dim() const override { return 2; }
    double evaluate(std::span<const double> genome, const TaskDescriptor& task) const override;
    const ArmDomainConfig& config() const noexcept { return cfg_; }

private:
    ArmDomainConfig cfg_;
};

// ---------------------------------------------------------------------------
// Synthetic multi-task family (rugged, task-shifted optimum).
//
//   f(x, t) = -(1/n) sum_i [ u_i^2 - A cos(2 pi k u_i) + A ],  u_i = x_i - o_i(t)
//   o_i(t)  = 0.5 + 0.3 sin(2 pi <w_i, t> + phi_i)
//
// with A = 0.9 and k = 3. The weights w_i and phases phi_i are fixed by the
// constants seed.

struct SyntheticConfig {
    std::size_t genome_dim = 36;
    std::size_t task_dim = 12;
    std::uint64_t constants_seed = 20200707;
};

class SyntheticDomain final : public Domain {
public:
    static constexpr double kAmplitude = 0.9;
    static constexpr double kFrequency = 3.0;  // cycles per unit offset
    static constexpr double kOptimumSwing = 0.3;
    static constexpr double kWeightRange = 0.075;  // w_ij uniform in [-range, range]

    explicit SyntheticDomain(SyntheticConfig cfg = {});
    std::string name() const override { return "synthetic"; }
    std::size_t genome_dim() const override { return cfg_.genome_dim; }
    std::size_t task_dim() const override { return cfg_.task_dim; }
    double evaluate(std::span<const double> genome, const TaskDescriptor& task) const override;

    /// Task-dependent optimum o(t); f(o(t), t) = 0.
    std::vector<double> optimum(std::span<const double> task_params) const;

    /// Row i holds w_i (task_dim entries).
    std::span<const double> weights(std::size_t i) const;
    double phase(std::size_t i) const { return phases_.at(i); }
    const SyntheticConfig& config() const noexcept { return cfg_; }

private:
    SyntheticConfig cfg_;
    std::vector<double> weights_;
    std::vector<double> phases_;
};

/// Per-coordinate penalty u^2 - A cos(2 pi k u) + A; zero only at u = 0.
double synthetic_term(double offset);

}  // namespace mtme
