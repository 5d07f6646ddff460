#include "mtme/domains.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtme/check.hpp"
#include "mtme/random.hpp"

namespace mtme {

ArmTask ArmTask::from_params(std::span<const double> params) {
    MTME_CHECK(params.size() == 2, "arm tasks have two parameters");
    return ArmTask{params[0], params[1]};
}

ArmPose arm_normalize(std::span<const double> genome, const ArmTask& task, std::size_t d) {
    MTME_CHECK(genome.size() == d, "genome length differs from joint count");
    ArmPose pose;
    pose.angles.resize(d);
    const double scale = task.alpha_max * 2.0 * std::numbers::pi / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) pose.angles[i] = (genome[i] - 0.5) * scale;
    pose.link_length = task.length / static_cast<double>(d);
    return pose;
}

Point2 arm_forward_kinematics(std::span<const double> angles, double link_length) {
    // Accumulated planar rotation of the current link frame.
    double c = 1.0;
    double s = 0.0;
    double x = 0.0;
    double y = 0.0;
    for (double a : angles) {
        const double ca = std::cos(a);
        const double sa = std::sin(a);
        const double nc = c * ca - s * sa;
        const double ns = s * ca + c * sa;
        c = nc;
        s = ns;
        x += link_length * c;
        y += link_length * s;
    }
    return {x, y};
}

double arm_fitness(std::span<const double> genome, const ArmTask& task, const ArmDomainConfig& cfg) {
    const ArmPose pose = arm_normalize(genome, task, cfg.d);
    const Point2 tip = arm_forward_kinematics(pose.angles, pose.link_length);
    return -std::hypot(tip[0] - cfg.target[0], tip[1] - cfg.target[1]);
}

ArmDomain::ArmDomain(ArmDomainConfig cfg) : cfg_(cfg) {
    if (cfg_.d == 0) throw std::invalid_argument("ArmDomain: need at least one joint");
}

double ArmDomain::evaluate(std::span<const double> genome, const TaskDescriptor& task) const {
    return arm_fitness(genome, ArmTask::from_params(task.params), cfg_);
}

double synthetic_term(double offset) {
    using SD = SyntheticDomain;
    return offset * offset -
           SD::kAmplitude * std::cos(2.0 * std::numbers::pi * SD::kFrequency * offset) +
           SD::kAmplitude;
}

SyntheticDomain::SyntheticDomain(SyntheticConfig cfg) : cfg_(cfg) {
    if (cfg_.genome_dim == 0 || cfg_.task_dim == 0) {
        throw std::invalid_argument("SyntheticDomain: dimensions must be >= 1");
    }
    // Constants come from a splitmix64 sequence so they are identical on every
    // platform (unlike std:: distributions).
    std::uint64_t state = cfg_.constants_seed;
    auto next_unit = [&state] {
        state = splitmix64(state);
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    weights_.resize(cfg_.genome_dim * cfg_.task_dim);
    for (auto& w : weights_) w = kWeightRange * (2.0 * next_unit() - 1.0);
    phases_.resize(cfg_.genome_dim);
    for (auto& p : phases_) p = 2.0 * std::numbers::pi * next_unit();
}

std::span<const double> SyntheticDomain::weights(std::size_t i) const {
    MTME_CHECK(i < cfg_.genome_dim, "weight row out of range");
    return std::span<const double>(weights_).subspan(i * cfg_.task_dim, cfg_.task_dim);
}

std::vector<double> SyntheticDomain::optimum(std::span<const double> task_params) const {
    if (task_params.size() != cfg_.task_dim) {
        throw std::invalid_argument("SyntheticDomain: task dimension mismatch");
    }
    std::vector<double> o(cfg_.genome_dim);
    for (std::size_t i = 0; i < cfg_.genome_dim; ++i) {
        const auto w = weights(i);
        double dot = 0.0;
        for (std::size_t k = 0; k < cfg_.task_dim; ++k) dot += w[k] * task_params[k];
        o[i] = 0.5 + kOptimumSwing * std::sin(2.0 * std::numbers::pi * dot + phases_[i]);
    }
    return o;
}

double SyntheticDomain::evaluate(std::span<const double> genome, const TaskDescriptor& task) const {
    if (genome.size() != cfg_.genome_dim) {
        throw std::invalid_argument("SyntheticDomain: genome dimension mismatch");
    }
    const auto o = optimum(task.params);
    double total = 0.0;
    for (std::size_t i = 0; i < genome.size(); ++i) total += synthetic_term(genome[i] - o[i]);
    return -total / static_cast<double>(genome.size());
}

}  // namespace mtme
