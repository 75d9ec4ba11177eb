#pragma once

#include <span>
#include <vector>

#include "kinefit/rotations.hpp"

namespace kinefit {

// Rigid parent-child transform. The homogeneous bottom row is implicit.
struct Transform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Transform identity() { return {}; }

    Transform operator*(const Transform& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

// Parent index per joint, -1 for the single root. Joints are stored in
// topological order: every parent index is smaller than its child's index.
class Hierarchy {
public:
    explicit Hierarchy(std::vector<int> parents);

    int joint_count() const { return static_cast<int>(parents_.size()); }
    int parent(int j) const { return parents_[static_cast<size_t>(j)]; }
    int root() const { return root_; }
    std::span<const int> parents() const { return parents_; }

private:
    std::vector<int> parents_;
    int root_ = 0;
};

// Local transforms, one per joint, each expressing a joint in its parent's
// frame. Link lengths of non-root joints must be strictly positive.
struct KinematicChain {
    std::vector<Transform> locals;
};

// Checks the chain invariants against a hierarchy (sizes, positive link
// lengths). Raises InconsistentChain / ZeroLengthLink.
void validate_chain(const KinematicChain& chain, const Hierarchy& h);

// Per-joint global transforms (frame 0).
struct GlobalPose {
    std::vector<Transform> world;

    const Vec3& position(int j) const { return world[static_cast<size_t>(j)].translation; }
    const Mat3& orientation(int j) const { return world[static_cast<size_t>(j)].rotation; }
};

// Forward kinematics by parent-first traversal. O(N) per call.
GlobalPose fk(const KinematicChain& chain, const Hierarchy& h);

// Forward kinematics with a reorienting rotation per joint, composed to the
// right of each local transform so that every down-chain joint is carried
// along. One delta per joint; identity deltas reduce to plain fk.
GlobalPose fk_reoriented(const KinematicChain& chain, const Hierarchy& h,
                         std::span<const Mat3> deltas);

// Allocation-free variant used on the optimizer's hot path.
void fk_reoriented_into(const KinematicChain& chain, const Hierarchy& h,
                        std::span<const Mat3> deltas, GlobalPose& out);

// Unit vectors from each joint's parent to the joint, in frame 0. The root
// entry is left as zero; it has no link.
std::vector<Vec3> link_directions(const GlobalPose& gp, const Hierarchy& h);

}  // namespace kinefit
