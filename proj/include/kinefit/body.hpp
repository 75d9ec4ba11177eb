#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kinefit/chain.hpp"

namespace kinefit {

using VecX = Eigen::VectorXd;

enum class Axis { X = 0, Y = 1, Z = 2 };

// One rotational degree of freedom with its range-of-motion interval.
struct Dof {
    Axis axis;
    double lo;
    double hi;
};

struct BodyJoint {
    std::string name;
    int parent = -1;                      // index into the joint list, -1 for root
    Vec3 offset = Vec3::Zero();           // rest position in the parent frame, meters
    bool root_axis_angle = false;         // root orientation uses axis-angle, full range
    std::vector<Dof> dofs;                // Euler DOFs in X,Y,Z order (root: empty)
    std::optional<std::string> keypoint;  // pose keypoint bound to this joint, if any
    bool global_link = false;             // member of the root-anchored arm error term
};

// Segment lengths of the default skeleton, meters. All user-overridable; the
// values are conventional, not measured.
struct LimbLengths {
    double pelvis_width = 0.24;
    double thigh = 0.42;
    double shank = 0.42;
    double spine_segment = 0.25;
    double chest_rise = 0.10;
    double clavicle = 0.17;
    double upper_arm = 0.28;
    double forearm = 0.25;
    double neck = 0.12;
    double head = 0.15;
};

// The retargetable human chain: rest pose, hierarchy, DOF/ROM table and the
// layout of the optimizer's parameter vector. Immutable after construction.
//
// Parameter vector layout: [n_x, n_y, n_z, phi] for the root (axis-angle,
// axis components in [-1,1], phi in [-pi,pi]), then the Euler angles of each
// reorientable joint in chain order, each joint's present axes in X,Y,Z
// order. 29 scalars encoding 28 rotational DOFs.
class BodyModel {
public:
    static BodyModel default_body(const LimbLengths& lengths = {});
    static BodyModel from_joints(std::vector<BodyJoint> joints);

    const Hierarchy& hierarchy() const { return hierarchy_; }
    const KinematicChain& rest_chain() const { return rest_; }
    const std::vector<BodyJoint>& joints() const { return joints_; }

    int joint_count() const { return static_cast<int>(joints_.size()); }
    const std::vector<int>& reorientable() const { return reorientable_; }
    int reorientable_count() const { return static_cast<int>(reorientable_.size()); }
    int dof_count() const { return dof_count_; }
    int param_count() const { return param_count_; }
    const std::vector<std::string>& param_names() const { return param_names_; }

    // Per-parameter [lo, hi] box.
    std::pair<VecX, VecX> bounds() const;

    // Rest parameters: conventional root axis (1,0,0), all angles zero.
    VecX rest_params() const;

    // Parameter slice [begin, end) of each reorientable joint, used by the
    // per-joint temporal norm.
    const std::vector<std::pair<int, int>>& param_spans() const { return param_spans_; }

    // Delta rotation per joint from a parameter vector. Raises OutOfBounds
    // with the offending index when a parameter leaves its box.
    void deltas_from_params(const VecX& theta, std::vector<Mat3>& out) const;

    GlobalPose apply_params(const VecX& theta) const;
    void apply_params_into(const VecX& theta, std::vector<Mat3>& delta_buf,
                           GlobalPose& out) const;

    // Keypoint bindings, in joint order.
    const std::vector<std::string>& keypoint_names() const { return keypoint_names_; }
    const std::vector<int>& keypoint_joints() const { return keypoint_joints_; }
    int keypoint_index(const std::string& name) const;  // -1 if absent

    // Chain links whose both endpoints carry keypoints: (joint, parent) pairs
    // paired with (keypoint, parent keypoint) indices. These are the terms of
    // the link-direction pose error.
    struct BoundLink {
        int joint, parent;        // joint indices
        int kp, kp_parent;        // keypoint indices
    };
    const std::vector<BoundLink>& local_links() const { return local_links_; }

    // Arm joints measured from the root in the global pose error term.
    struct ArmTarget {
        int joint;
        int kp;
    };
    const std::vector<ArmTarget>& arm_targets() const { return arm_targets_; }
    int root_keypoint() const { return root_keypoint_; }

    // Parameter indices of the knee/elbow flexion channels (present on the
    // default body; used by the phased motion generator).
    std::vector<int> limb_flexion_params() const;

private:
    BodyModel(std::vector<BodyJoint> joints, Hierarchy h, KinematicChain rest);

    std::vector<BodyJoint> joints_;
    Hierarchy hierarchy_;
    KinematicChain rest_;
    std::vector<int> reorientable_;
    std::vector<std::pair<int, int>> param_spans_;
    std::vector<std::string> param_names_;
    std::vector<std::string> keypoint_names_;
    std::vector<int> keypoint_joints_;
    std::vector<BoundLink> local_links_;
    std::vector<ArmTarget> arm_targets_;
    VecX lo_, hi_;
    int root_keypoint_ = -1;
    int dof_count_ = 0;
    int param_count_ = 0;
};

}  // namespace kinefit
