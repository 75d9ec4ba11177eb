#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kinefit/body.hpp"

namespace kinefit {

// One frame of 3D keypoint targets, indexed in the body's keypoint order.
struct PoseFrame {
    std::vector<Vec3> keypoints;
};

struct PoseSequence {
    std::vector<PoseFrame> frames;
    std::optional<double> fps;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

// Raises ValidationError / DegenerateTarget when a frame misses keypoints,
// carries non-finite values, or has coincident link endpoints.
void validate_frame(const PoseFrame& frame, const BodyModel& body, int frame_index = -1);

// Norm applied to one joint's parameter differences in the temporal term.
enum class JointNorm { L1, L2 };

// Scratch buffers reused across objective evaluations.
struct LossWorkspace {
    std::vector<Mat3> deltas;
    GlobalPose pose;
};

// Mean angular difference between chain link directions and the matching
// keypoint link directions, radians. Links without keypoints on both ends
// (clavicles, lower spine) do not participate.
double local_pose_error(const GlobalPose& gp, const PoseFrame& frame, const BodyModel& body);

// Mean angular difference of root-to-arm-joint directions, radians.
double global_pose_error(const GlobalPose& gp, const PoseFrame& frame, const BodyModel& body);

// Mean over frames of the per-joint parameter velocity magnitudes, using a
// forward difference at the first frame, central differences inside, and a
// backward difference at the last. Raises SequenceTooShort for fewer than
// two frames.
double temporal_error(std::span<const VecX> thetas, const BodyModel& body,
                      JointNorm norm = JointNorm::L1);

// Pose error of one frame: local + global terms at apply_params(theta).
double frame_loss(const VecX& theta, const PoseFrame& frame, const BodyModel& body);
double frame_loss_ws(const VecX& theta, const PoseFrame& frame, const BodyModel& body,
                     LossWorkspace& ws);

// Patch objective: mean frame loss plus lambda times the temporal term. When
// `stitch_prev` is given (the final parameters of the previous patch), its
// difference against the first frame joins the temporal component.
double temporal_loss(std::span<const VecX> thetas, std::span<const PoseFrame> frames,
                     const BodyModel& body, double lambda,
                     const VecX* stitch_prev = nullptr, JointNorm norm = JointNorm::L1);
double temporal_loss_ws(std::span<const VecX> thetas, std::span<const PoseFrame> frames,
                        const BodyModel& body, double lambda, const VecX* stitch_prev,
                        JointNorm norm, LossWorkspace& ws);

}  // namespace kinefit
