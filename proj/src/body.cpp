#include "kinefit/body.hpp"

#include <algorithm>
#include <cmath>

namespace kinefit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kBoundSlack = 1e-9;

const char* axis_letter(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

}  // namespace

BodyModel BodyModel::default_body(const LimbLengths& L) {
    const double* fields[] = {&L.pelvis_width, &L.thigh,     &L.shank,  &L.spine_segment,
                              &L.chest_rise,   &L.clavicle,  &L.upper_arm,
                              &L.forearm,      &L.neck,      &L.head};
    for (const double* f : fields) {
        if (!(*f > 0.0) || !std::isfinite(*f)) {
            throw InvalidLength("limb lengths must be positive and finite");
        }
    }

    // Frame: X = subject's left, Y = anterior, Z = up. Local joint frames are
    // world-aligned in the rest pose, so X is the flexion axis throughout.
    const double hip = L.pelvis_width / 2.0;
    const std::vector<Dof> hip_dofs = {{Axis::X, -0.5, 2.1}, {Axis::Y, -0.8, 0.8}, {Axis::Z, -0.7, 0.7}};
    const std::vector<Dof> knee_dofs = {{Axis::X, 0.0, 2.4}};
    const std::vector<Dof> spine_dofs = {{Axis::X, -0.4, 0.6}, {Axis::Z, -0.4, 0.4}};
    const std::vector<Dof> clav_dofs = {{Axis::Y, -0.3, 0.3}, {Axis::Z, -0.3, 0.3}};
    const std::vector<Dof> shoulder_dofs = {{Axis::X, -1.0, 1.5}, {Axis::Y, -1.4, 1.4}, {Axis::Z, -1.2, 1.2}};
    const std::vector<Dof> elbow_dofs = {{Axis::X, 0.0, 2.5}};
    const std::vector<Dof> neck_dofs = {{Axis::X, -0.7, 0.9}};

    std::vector<BodyJoint> j;
    auto add = [&](const std::string& name, int parent, Vec3 offset, std::vector<Dof> dofs,
                   std::optional<std::string> kp, bool arm = false) {
        j.push_back({name, parent, std::move(offset), false, std::move(dofs), std::move(kp), arm});
        return static_cast<int>(j.size()) - 1;
    };

    const int root = add("mid_pelvis", -1, Vec3::Zero(), {}, "mid_pelvis");
    j[static_cast<size_t>(root)].root_axis_angle = true;

    const int l_hip = add("l_hip", root, {hip, 0, 0}, hip_dofs, "l_hip");
    const int l_knee = add("l_knee", l_hip, {0, 0, -L.thigh}, knee_dofs, "l_knee");
    add("l_ankle", l_knee, {0, 0, -L.shank}, {}, "l_ankle");
    const int r_hip = add("r_hip", root, {-hip, 0, 0}, hip_dofs, "r_hip");
    const int r_knee = add("r_knee", r_hip, {0, 0, -L.thigh}, knee_dofs, "r_knee");
    add("r_ankle", r_knee, {0, 0, -L.shank}, {}, "r_ankle");

    const int lower_spine = add("lower_spine", root, {0, 0, L.spine_segment}, spine_dofs, std::nullopt);
    const int mid_spine = add("mid_spine", lower_spine, {0, 0, L.spine_segment}, spine_dofs, "mid_spine");
    const int neck = add("neck", mid_spine, {0, 0, L.neck}, neck_dofs, "neck");
    add("head", neck, {0, 0, L.head}, {}, "head");

    const int l_clav = add("l_clavicle", mid_spine, {0, 0, L.chest_rise}, clav_dofs, std::nullopt);
    const int l_shoulder = add("l_shoulder", l_clav, {L.clavicle, 0, 0}, shoulder_dofs, "l_shoulder", true);
    const int l_elbow = add("l_elbow", l_shoulder, {0, 0, -L.upper_arm}, elbow_dofs, "l_elbow", true);
    add("l_wrist", l_elbow, {0, 0, -L.forearm}, {}, "l_wrist", true);

    const int r_clav = add("r_clavicle", mid_spine, {0, 0, L.chest_rise}, clav_dofs, std::nullopt);
    const int r_shoulder = add("r_shoulder", r_clav, {-L.clavicle, 0, 0}, shoulder_dofs, "r_shoulder", true);
    const int r_elbow = add("r_elbow", r_shoulder, {0, 0, -L.upper_arm}, elbow_dofs, "r_elbow", true);
    add("r_wrist", r_elbow, {0, 0, -L.forearm}, {}, "r_wrist", true);

    return from_joints(std::move(j));
}

BodyModel BodyModel::from_joints(std::vector<BodyJoint> joints) {
    std::vector<int> parents;
    parents.reserve(joints.size());
    KinematicChain rest;
    for (const BodyJoint& bj : joints) {
        parents.push_back(bj.parent);
        rest.locals.push_back({Mat3::Identity(), bj.offset});
        if (bj.parent >= 0 && !(bj.offset.norm() > 0.0)) {
            throw InvalidLength("joint '" + bj.name + "' has a zero rest offset");
        }
        if (bj.root_axis_angle && !bj.dofs.empty()) {
            throw InconsistentChain("joint '" + bj.name + "' mixes axis-angle and Euler DOFs");
        }
        Axis prev = Axis::X;
        bool first = true;
        for (const Dof& d : bj.dofs) {
            if (!(d.lo < d.hi)) {
                throw InconsistentChain("joint '" + bj.name + "': empty ROM interval");
            }
            if (d.axis == Axis::Y && !(d.lo > -kHalfPi && d.hi < kHalfPi)) {
                throw InconsistentChain("joint '" + bj.name +
                                        "': Y-axis ROM must stay strictly inside (-pi/2, pi/2)");
            }
            if (!first && static_cast<int>(d.axis) <= static_cast<int>(prev)) {
                throw InconsistentChain("joint '" + bj.name + "': DOF axes must be in X,Y,Z order");
            }
            prev = d.axis;
            first = false;
        }
    }
    Hierarchy h(std::move(parents));
    validate_chain(rest, h);
    return BodyModel(std::move(joints), std::move(h), std::move(rest));
}

BodyModel::BodyModel(std::vector<BodyJoint> joints, Hierarchy h, KinematicChain rest)
    : joints_(std::move(joints)), hierarchy_(std::move(h)), rest_(std::move(rest)) {
    int cursor = 0;
    for (size_t i = 0; i < joints_.size(); ++i) {
        const BodyJoint& bj = joints_[i];
        if (!bj.root_axis_angle && bj.dofs.empty()) continue;
        reorientable_.push_back(static_cast<int>(i));
        const int begin = cursor;
        if (bj.root_axis_angle) {
            if (bj.parent >= 0) {
                throw InconsistentChain("axis-angle parameterization is reserved for the root");
            }
            for (const char* s : {".nx", ".ny", ".nz", ".phi"}) {
                param_names_.push_back(bj.name + s);
            }
            cursor += 4;
            dof_count_ += 3;
        } else {
            for (const Dof& d : bj.dofs) {
                param_names_.push_back(bj.name + "." + axis_letter(d.axis));
            }
            cursor += static_cast<int>(bj.dofs.size());
            dof_count_ += static_cast<int>(bj.dofs.size());
        }
        param_spans_.emplace_back(begin, cursor);
    }
    param_count_ = cursor;

    if (reorientable_.size() != 14) {
        throw InconsistentChain("body must have exactly 14 reorientable joints, found " +
                                std::to_string(reorientable_.size()));
    }
    if (dof_count_ != 28) {
        throw InconsistentChain("body must have 28 rotational DOFs, found " +
                                std::to_string(dof_count_));
    }

    // Equal spine ROMs: the two spine joints split one anatomical range.
    const auto find = [&](const std::string& n) -> const BodyJoint* {
        for (const BodyJoint& bj : joints_)
            if (bj.name == n) return &bj;
        return nullptr;
    };
    const BodyJoint* lo_spine = find("lower_spine");
    const BodyJoint* mid_spine = find("mid_spine");
    if (lo_spine && mid_spine) {
        bool equal = lo_spine->dofs.size() == mid_spine->dofs.size();
        for (size_t k = 0; equal && k < lo_spine->dofs.size(); ++k) {
            equal = lo_spine->dofs[k].axis == mid_spine->dofs[k].axis &&
                    lo_spine->dofs[k].lo == mid_spine->dofs[k].lo &&
                    lo_spine->dofs[k].hi == mid_spine->dofs[k].hi;
        }
        if (!equal) {
            throw InconsistentChain("lower_spine and mid_spine must carry equal ROMs");
        }
    }

    for (size_t i = 0; i < joints_.size(); ++i) {
        if (!joints_[i].keypoint) continue;
        keypoint_names_.push_back(*joints_[i].keypoint);
        keypoint_joints_.push_back(static_cast<int>(i));
        if (joints_[i].parent < 0) root_keypoint_ = static_cast<int>(keypoint_names_.size()) - 1;
    }
    if (root_keypoint_ < 0) {
        throw InconsistentChain("the root joint must carry a keypoint binding");
    }

    std::vector<int> kp_of_joint(joints_.size(), -1);
    for (size_t k = 0; k < keypoint_joints_.size(); ++k) {
        kp_of_joint[static_cast<size_t>(keypoint_joints_[k])] = static_cast<int>(k);
    }
    for (size_t i = 0; i < joints_.size(); ++i) {
        const int p = joints_[i].parent;
        if (p < 0) continue;
        if (kp_of_joint[i] >= 0 && kp_of_joint[static_cast<size_t>(p)] >= 0) {
            local_links_.push_back({static_cast<int>(i), p, kp_of_joint[i],
                                    kp_of_joint[static_cast<size_t>(p)]});
        }
        if (joints_[i].global_link) {
            if (kp_of_joint[i] < 0) {
                throw InconsistentChain("joint '" + joints_[i].name +
                                        "' is in the global term but has no keypoint");
            }
            arm_targets_.push_back({static_cast<int>(i), kp_of_joint[i]});
        }
    }

    lo_.resize(param_count_);
    hi_.resize(param_count_);
    int cursor2 = 0;
    for (int ji : reorientable_) {
        const BodyJoint& bj = joints_[static_cast<size_t>(ji)];
        if (bj.root_axis_angle) {
            for (int k = 0; k < 3; ++k) {
                lo_[cursor2] = -1.0;
                hi_[cursor2] = 1.0;
                ++cursor2;
            }
            lo_[cursor2] = -kPi;
            hi_[cursor2] = kPi;
            ++cursor2;
        } else {
            for (const Dof& d : bj.dofs) {
                lo_[cursor2] = d.lo;
                hi_[cursor2] = d.hi;
                ++cursor2;
            }
        }
    }
}

std::pair<VecX, VecX> BodyModel::bounds() const { return {lo_, hi_}; }

VecX BodyModel::rest_params() const {
    VecX theta = VecX::Zero(param_count_);
    theta[0] = 1.0;  // conventional root axis; phi = 0 makes it inert
    return theta;
}

void BodyModel::deltas_from_params(const VecX& theta, std::vector<Mat3>& out) const {
    if (theta.size() != param_count_) {
        throw OutOfBounds("parameter vector has length " + std::to_string(theta.size()) +
                          ", expected " + std::to_string(param_count_), -1);
    }
    for (int i = 0; i < param_count_; ++i) {
        if (!std::isfinite(theta[i]) || theta[i] < lo_[i] - kBoundSlack ||
            theta[i] > hi_[i] + kBoundSlack) {
            throw OutOfBounds("parameter '" + param_names_[static_cast<size_t>(i)] +
                              "' = " + std::to_string(theta[i]) + " is outside its bounds", i);
        }
    }

    out.assign(joints_.size(), Mat3::Identity());
    int cursor = 0;
    for (int ji : reorientable_) {
        const BodyJoint& bj = joints_[static_cast<size_t>(ji)];
        Mat3& delta = out[static_cast<size_t>(ji)];
        if (bj.root_axis_angle) {
            const Vec3 n(theta[cursor], theta[cursor + 1], theta[cursor + 2]);
            const double phi = theta[cursor + 3];
            cursor += 4;
            const double norm = n.norm();
            if (norm <= 1e-6) {
                if (std::abs(phi) > 1e-9) {
                    throw NonUnitAxis("root axis has vanishing norm with nonzero angle");
                }
                continue;  // zero rotation
            }
            delta = axis_angle_to_matrix({n / norm, phi});
        } else {
            EulerXyz e;
            for (const Dof& d : bj.dofs) {
                const double v = theta[cursor++];
                switch (d.axis) {
                    case Axis::X: e.x = v; break;
                    case Axis::Y: e.y = v; break;
                    case Axis::Z: e.z = v; break;
                }
            }
            delta = euler_xyz_to_matrix(e);
        }
    }
}

GlobalPose BodyModel::apply_params(const VecX& theta) const {
    std::vector<Mat3> deltas;
    GlobalPose gp;
    apply_params_into(theta, deltas, gp);
    return gp;
}

void BodyModel::apply_params_into(const VecX& theta, std::vector<Mat3>& delta_buf,
                                  GlobalPose& out) const {
    deltas_from_params(theta, delta_buf);
    fk_reoriented_into(rest_, hierarchy_, delta_buf, out);
}

int BodyModel::keypoint_index(const std::string& name) const {
    for (size_t k = 0; k < keypoint_names_.size(); ++k) {
        if (keypoint_names_[k] == name) return static_cast<int>(k);
    }
    return -1;
}

std::vector<int> BodyModel::limb_flexion_params() const {
    std::vector<int> idx;
    for (size_t i = 0; i < param_names_.size(); ++i) {
        const std::string& n = param_names_[i];
        if (n == "l_knee.x" || n == "r_knee.x" || n == "l_elbow.x" || n == "r_elbow.x") {
            idx.push_back(static_cast<int>(i));
        }
    }
    return idx;
}

}  // namespace kinefit
