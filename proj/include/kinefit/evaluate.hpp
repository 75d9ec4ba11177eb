#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "kinefit/motiongen.hpp"
#include "kinefit/solver.hpp"

namespace kinefit {

// Mean per-joint angular separation, rad/joint: the screw angle between the
// predicted and ground-truth global joint orientations, averaged over the
// given joints and then over frames. `joint_subset` holds joint indices and
// must be reorientable joints; empty means all reorientable joints.
double mpjas(std::span<const VecX> pred, std::span<const VecX> gt, const BodyModel& body,
             std::span<const int> joint_subset = {});

// Per reorientable joint, in body.reorientable() order.
std::vector<double> mpjas_per_joint(std::span<const VecX> pred, std::span<const VecX> gt,
                                    const BodyModel& body);

// Retargeting strategy applied to a sequence.
enum class AlgorithmKind { frame, frame_warm, temporal };

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind = AlgorithmKind::frame;
    int patch_len = 0;  // temporal only
};

// The benchmarked set: independent frames, warm-started frames, and the
// temporal solver with patches of 3 and 5.
std::vector<AlgorithmSpec> default_algorithms();

// Temporal weight per motion speed; slower motion takes a higher weight.
std::map<Speed, double> default_lambda_table();

struct RunRecord {
    std::string algorithm;
    int sequence = 0;
    Speed speed = Speed::fast;
    LimbMode mode = LimbMode::bent_only;
    int frames = 0;
    double mpjas14 = 0.0;
    std::vector<double> per_joint;
    double seconds = 0.0;
    double fps = 0.0;
    int iterations = 0;
    bool all_converged = true;
    bool monotone = true;   // final loss <= initial loss for every unit
    bool feasible = true;   // every parameter inside its box
};

struct EvalReport {
    std::vector<RunRecord> runs;
    std::vector<std::string> joint_names;  // reorientable joints
    std::uint64_t seed = 0;

    // aggregate helpers; empty selectors mean "any"
    double mean_mpjas(const std::string& algorithm, const Speed* speed = nullptr,
                      const LimbMode* mode = nullptr) const;
    double mean_fps(const std::string& algorithm, const Speed* speed = nullptr) const;
    long total_iterations(const std::string& algorithm, const Speed* speed = nullptr) const;
    std::vector<double> mean_per_joint(const std::string& algorithm, const LimbMode* mode) const;

    // pass/fail flags summarizing the expected orderings, emitted in the
    // report footer
    std::map<std::string, bool> ordering_flags() const;
};

// Runs every algorithm over every sequence with ground-truth orientations
// hidden, recording accuracy, timing and solver health. Per-run failures are
// recorded, not fatal. `jobs` > 1 distributes sequences across threads; the
// metric values do not depend on it.
EvalReport run_experiment(std::span<const GroundTruthSequence> suite, const BodyModel& body,
                          std::span<const AlgorithmSpec> algorithms,
                          const std::map<Speed, double>& lambda_table,
                          const OptimizerSettings& settings = {}, int jobs = 1);

// Runs one algorithm on one sequence; exposed for the CLI retarget path.
IKResult run_algorithm(const AlgorithmSpec& alg, const BodyModel& body, const PoseSequence& seq,
                       double lambda, const OptimizerSettings& settings = {});

}  // namespace kinefit
