#include "kinefit/losses.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace kinefit {

namespace {

// The angle arccos(clamp(u.v, -1, 1)) for unit vectors, evaluated through
// atan2 so nearly parallel inputs do not lose half the significand.
double angle_between(const Vec3& u, const Vec3& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

Vec3 normalized_or_throw(const Vec3& v, const char* what) {
    const double n = v.norm();
    if (n <= 1e-6) throw DegenerateTarget(what);
    return v / n;
}

double joint_norm(const VecX& diff, int begin, int end, JointNorm norm) {
    double acc = 0.0;
    if (norm == JointNorm::L1) {
        for (int i = begin; i < end; ++i) acc += std::abs(diff[i]);
    } else {
        for (int i = begin; i < end; ++i) acc += diff[i] * diff[i];
        acc = std::sqrt(acc);
    }
    return acc;
}

double all_joints_norm(const VecX& diff, const BodyModel& body, JointNorm norm) {
    double acc = 0.0;
    for (const auto& [begin, end] : body.param_spans()) {
        acc += joint_norm(diff, begin, end, norm);
    }
    return acc;
}

}  // namespace

void validate_frame(const PoseFrame& frame, const BodyModel& body, int frame_index) {
    const std::string where =
        frame_index >= 0 ? "frame " + std::to_string(frame_index) : std::string("frame");
    if (frame.keypoints.size() != body.keypoint_names().size()) {
        throw ValidationError(where, "has " + std::to_string(frame.keypoints.size()) +
                                         " keypoints, body expects " +
                                         std::to_string(body.keypoint_names().size()));
    }
    for (size_t k = 0; k < frame.keypoints.size(); ++k) {
        if (!frame.keypoints[k].allFinite()) {
            throw ValidationError(where + ", keypoint '" + body.keypoint_names()[k] + "'",
                                  "non-finite value");
        }
    }
    for (const auto& link : body.local_links()) {
        const Vec3 d = frame.keypoints[static_cast<size_t>(link.kp)] -
                       frame.keypoints[static_cast<size_t>(link.kp_parent)];
        if (d.norm() <= 1e-6) {
            throw ValidationError(where, "coincident keypoints '" +
                                             body.keypoint_names()[static_cast<size_t>(link.kp)] +
                                             "' and '" +
                                             body.keypoint_names()[static_cast<size_t>(link.kp_parent)] +
                                             "'");
        }
    }
}

double local_pose_error(const GlobalPose& gp, const PoseFrame& frame, const BodyModel& body) {
    const auto& links = body.local_links();
    double acc = 0.0;
    for (const auto& link : links) {
        const Vec3 r = normalized_or_throw(
            gp.position(link.joint) - gp.position(link.parent), "zero-length chain link");
        const Vec3 p = normalized_or_throw(
            frame.keypoints[static_cast<size_t>(link.kp)] -
                frame.keypoints[static_cast<size_t>(link.kp_parent)],
            "coincident target keypoints");
        acc += angle_between(r, p);
    }
    return acc / static_cast<double>(links.size());
}

double global_pose_error(const GlobalPose& gp, const PoseFrame& frame, const BodyModel& body) {
    const auto& targets = body.arm_targets();
    const int root_joint = body.hierarchy().root();
    const Vec3& root_kp = frame.keypoints[static_cast<size_t>(body.root_keypoint())];
    double acc = 0.0;
    for (const auto& t : targets) {
        const Vec3 r = normalized_or_throw(gp.position(t.joint) - gp.position(root_joint),
                                           "arm joint coincides with root");
        const Vec3 p = normalized_or_throw(
            frame.keypoints[static_cast<size_t>(t.kp)] - root_kp,
            "arm keypoint coincides with root keypoint");
        acc += angle_between(r, p);
    }
    return acc / static_cast<double>(targets.size());
}

double temporal_error(std::span<const VecX> thetas, const BodyModel& body, JointNorm norm) {
    const int m_count = static_cast<int>(thetas.size());
    if (m_count < 2) throw SequenceTooShort("temporal term needs at least 2 frames");
    double acc = 0.0;
    VecX diff;
    for (int m = 0; m < m_count; ++m) {
        if (m == 0) {
            diff = thetas[1] - thetas[0];
        } else if (m == m_count - 1) {
            diff = thetas[static_cast<size_t>(m)] - thetas[static_cast<size_t>(m - 1)];
        } else {
            diff = (thetas[static_cast<size_t>(m + 1)] - thetas[static_cast<size_t>(m - 1)]) / 2.0;
        }
        acc += all_joints_norm(diff, body, norm);
    }
    return acc / static_cast<double>(m_count);
}

double frame_loss(const VecX& theta, const PoseFrame& frame, const BodyModel& body) {
    LossWorkspace ws;
    return frame_loss_ws(theta, frame, body, ws);
}

double frame_loss_ws(const VecX& theta, const PoseFrame& frame, const BodyModel& body,
                     LossWorkspace& ws) {
    body.apply_params_into(theta, ws.deltas, ws.pose);
    return local_pose_error(ws.pose, frame, body) + global_pose_error(ws.pose, frame, body);
}

double temporal_loss(std::span<const VecX> thetas, std::span<const PoseFrame> frames,
                     const BodyModel& body, double lambda, const VecX* stitch_prev,
                     JointNorm norm) {
    LossWorkspace ws;
    return temporal_loss_ws(thetas, frames, body, lambda, stitch_prev, norm, ws);
}

double temporal_loss_ws(std::span<const VecX> thetas, std::span<const PoseFrame> frames,
                        const BodyModel& body, double lambda, const VecX* stitch_prev,
                        JointNorm norm, LossWorkspace& ws) {
    const int m_count = static_cast<int>(thetas.size());
    if (m_count < 2) throw SequenceTooShort("patch needs at least 2 frames");
    if (frames.size() != thetas.size()) {
        throw LengthMismatch("patch has " + std::to_string(thetas.size()) +
                             " parameter vectors for " + std::to_string(frames.size()) + " frames");
    }
    double pose_acc = 0.0;
    for (int m = 0; m < m_count; ++m) {
        pose_acc += frame_loss_ws(thetas[static_cast<size_t>(m)],
                                  frames[static_cast<size_t>(m)], body, ws);
    }
    double temporal = temporal_error(thetas, body, norm);
    if (stitch_prev != nullptr) {
        // Patch boundary term, scaled like one more entry of the frame mean.
        const VecX diff = thetas[0] - *stitch_prev;
        temporal += all_joints_norm(diff, body, norm) / static_cast<double>(m_count);
    }
    return pose_acc / static_cast<double>(m_count) + lambda * temporal;
}

}  // namespace kinefit
