#include "kinefit/chain.hpp"

#include <string>

namespace kinefit {

Hierarchy::Hierarchy(std::vector<int> parents) : parents_(std::move(parents)) {
    int roots = 0;
    for (size_t j = 0; j < parents_.size(); ++j) {
        const int p = parents_[j];
        if (p < 0) {
            roots++;
            root_ = static_cast<int>(j);
        } else if (p >= static_cast<int>(j)) {
            throw InconsistentChain("joint " + std::to_string(j) +
                                    " has parent " + std::to_string(p) +
                                    "; joints must be in topological order");
        }
    }
    if (roots != 1) {
        throw InconsistentChain("hierarchy must have exactly one root, found " +
                                std::to_string(roots));
    }
}

void validate_chain(const KinematicChain& chain, const Hierarchy& h) {
    if (static_cast<int>(chain.locals.size()) != h.joint_count()) {
        throw InconsistentChain("chain has " + std::to_string(chain.locals.size()) +
                                " transforms for " + std::to_string(h.joint_count()) + " joints");
    }
    for (int j = 0; j < h.joint_count(); ++j) {
        if (h.parent(j) >= 0 && chain.locals[static_cast<size_t>(j)].translation.norm() <= 0.0) {
            throw ZeroLengthLink("joint " + std::to_string(j) + " has zero link length");
        }
    }
}

GlobalPose fk(const KinematicChain& chain, const Hierarchy& h) {
    return fk_reoriented(chain, h, {});
}

GlobalPose fk_reoriented(const KinematicChain& chain, const Hierarchy& h,
                         std::span<const Mat3> deltas) {
    GlobalPose out;
    fk_reoriented_into(chain, h, deltas, out);
    return out;
}

void fk_reoriented_into(const KinematicChain& chain, const Hierarchy& h,
                        std::span<const Mat3> deltas, GlobalPose& out) {
    const int n = h.joint_count();
    if (static_cast<int>(chain.locals.size()) != n) {
        throw InconsistentChain("chain/hierarchy size mismatch");
    }
    if (!deltas.empty() && static_cast<int>(deltas.size()) != n) {
        throw InconsistentChain("expected one delta rotation per joint");
    }
    out.world.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Transform& local = chain.locals[static_cast<size_t>(j)];
        Transform step = local;
        if (!deltas.empty()) step.rotation = local.rotation * deltas[static_cast<size_t>(j)];
        const int p = h.parent(j);
        out.world[static_cast<size_t>(j)] =
            p < 0 ? step : out.world[static_cast<size_t>(p)] * step;
    }
}

std::vector<Vec3> link_directions(const GlobalPose& gp, const Hierarchy& h) {
    std::vector<Vec3> dirs(static_cast<size_t>(h.joint_count()), Vec3::Zero());
    for (int j = 0; j < h.joint_count(); ++j) {
        const int p = h.parent(j);
        if (p < 0) continue;
        const Vec3 d = gp.position(j) - gp.position(p);
        const double len = d.norm();
        if (len < 1e-12) {
            throw ZeroLengthLink("coincident joint positions at joint " + std::to_string(j));
        }
        dirs[static_cast<size_t>(j)] = d / len;
    }
    return dirs;
}

}  // namespace kinefit
