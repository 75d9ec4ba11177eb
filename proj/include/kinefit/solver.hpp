#pragma once

#include <functional>

#include "kinefit/losses.hpp"

namespace kinefit {

struct OptimizerSettings {
    int max_iterations = 200;
    double tolerance = 1e-8;   // objective decrease per accepted step
    double fd_step = 1e-6;     // forward-difference step, radians
};

struct MinimizeResult {
    VecX x;
    double loss = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const VecX&)>;

// Box-constrained minimization: sequential quadratic steps on a damped BFGS
// model, each step solved as a bounded least-squares subproblem on the
// model's Cholesky factor, globalized by a backtracking line search. Every
// iterate (and the result) is feasible; the final loss never exceeds the
// loss at the (projected) start. Deterministic for identical inputs.
// Raises NonFiniteObjective when the objective is not finite at the start.
MinimizeResult minimize(const Objective& f, VecX x0, const VecX& lo, const VecX& hi,
                        const OptimizerSettings& settings = {});

// Per-unit optimization record. A unit is one frame for the frame-by-frame
// drivers, one patch for the temporal driver.
struct IkUnitStats {
    int frame_begin = 0;
    int frame_end = 0;  // exclusive
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct IKResult {
    std::vector<VecX> thetas;          // one parameter vector per frame
    std::vector<double> frame_losses;  // frame_loss at the final parameters
    std::vector<IkUnitStats> units;
    double seconds = 0.0;
    int total_iterations = 0;
    bool all_converged = true;
};

// Single-frame inverse kinematics from a given start.
IKResult ik_frame(const BodyModel& body, const PoseFrame& frame, const VecX& theta0,
                  const OptimizerSettings& settings = {});

// Frame-by-frame inverse kinematics over a sequence. Without warm start every
// frame begins at the rest parameters; with warm start frame m begins at the
// optimized parameters of frame m-1. Per-frame non-convergence is flagged,
// never fatal.
IKResult ik_sequence_frame_by_frame(const BodyModel& body, const PoseSequence& seq,
                                    bool warm_start, const OptimizerSettings& settings = {});

// Temporal inverse kinematics: warm-started frame-by-frame pre-optimization,
// then joint optimization of consecutive patches of `patch_len` frames with
// the temporal term weighted by lambda. Consecutive patches are stitched
// through the boundary parameter difference. A trailing single frame joins
// the previous patch; a trailing patch of >= 2 frames stands alone.
IKResult ik_sequence_temporal(const BodyModel& body, const PoseSequence& seq, int patch_len,
                              double lambda, const OptimizerSettings& settings = {},
                              JointNorm norm = JointNorm::L1);

}  // namespace kinefit
