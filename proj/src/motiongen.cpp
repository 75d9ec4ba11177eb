#include "kinefit/motiongen.hpp"

#include <algorithm>
#include <cmath>

namespace kinefit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// splitmix64: cheap, well-mixed stream derivation for paired sequences.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// xoshiro-free portable uniform in [0,1): fixed mapping from the top 53 bits
// so generated files are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x8f1b'bcdc'b52a'4ef5ull)) {}

    double uniform() {
        state_ = splitmix64(state_);
        return static_cast<double>(state_ >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

double reflect_into(double v, double lo, double hi) {
    // interval width always exceeds the step size here, so one fold suffices,
    // but loop for safety
    for (int guard = 0; guard < 8 && (v < lo || v > hi); ++guard) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return std::clamp(v, lo, hi);
}

}  // namespace

double speed_cap(Speed s) {
    switch (s) {
        case Speed::slow: return kPi / 500.0;
        case Speed::medium: return kPi / 200.0;
        default: return kPi / 70.0;
    }
}

std::string speed_name(Speed s) {
    switch (s) {
        case Speed::slow: return "a";
        case Speed::medium: return "b";
        default: return "c";
    }
}

Speed speed_from_string(const std::string& s) {
    if (s == "a" || s == "slow") return Speed::slow;
    if (s == "b" || s == "medium") return Speed::medium;
    if (s == "c" || s == "fast") return Speed::fast;
    throw ValidationError("--speed", "unknown speed '" + s + "' (use a|b|c)");
}

std::string limb_mode_name(LimbMode m) {
    return m == LimbMode::bent_only ? "bent" : "phased";
}

LimbMode limb_mode_from_string(const std::string& s) {
    if (s == "bent" || s == "bent-only" || s == "bent_only") return LimbMode::bent_only;
    if (s == "phased") return LimbMode::phased;
    throw ValidationError("--mode", "unknown limb mode '" + s + "' (use bent|phased)");
}

bool phase_extended(int frame) {
    int edge = 0;
    bool extended = true;
    for (int span : kPhaseSchedule) {
        edge += span;
        if (frame < edge) return extended;
        extended = !extended;
    }
    return extended;
}

GroundTruthSequence generate(const MotionSpec& spec, const BodyModel& body) {
    if (spec.frames < 1) throw InfeasibleSchedule("frame count must be at least 1");
    int schedule_total = 0;
    for (int span : kPhaseSchedule) schedule_total += span;
    if (spec.mode == LimbMode::phased && spec.frames != schedule_total) {
        throw InfeasibleSchedule("the phased schedule covers exactly " +
                                 std::to_string(schedule_total) + " frames, got " +
                                 std::to_string(spec.frames));
    }

    const auto [lo, hi] = body.bounds();
    const int dim = body.param_count();
    VecX walk_lo = lo, walk_hi = hi;
    std::vector<char> is_flexion(static_cast<size_t>(dim), 0);
    for (int i : body.limb_flexion_params()) {
        is_flexion[static_cast<size_t>(i)] = 1;
        walk_lo[i] = std::max(lo[i], kBentFlexionMin);
        if (!(walk_lo[i] < hi[i])) {
            throw InfeasibleSchedule("flexion floor " + std::to_string(kBentFlexionMin) +
                                     " exceeds the ROM of parameter '" +
                                     body.param_names()[static_cast<size_t>(i)] + "'");
        }
    }

    Rng rng(spec.seed);
    const double cap = speed_cap(spec.speed);

    // Start point: random axis of healthy norm for the root, the rest of the
    // walk starts at its domain's projection of the rest pose so sequences
    // begin from plausible stances yet still roam the ROM box.
    VecX v(dim);
    {
        Vec3 n;
        do {
            n = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        } while (n.norm() < 0.5);
        v[0] = n.x();
        v[1] = n.y();
        v[2] = n.z();
        v[3] = rng.uniform(-kPi, kPi);
        for (int i = 4; i < dim; ++i) v[i] = rng.uniform(walk_lo[i], walk_hi[i]);
    }

    GroundTruthSequence out;
    out.spec = spec;
    out.thetas.reserve(static_cast<size_t>(spec.frames));

    std::vector<Mat3> deltas;
    GlobalPose gp;
    const auto& kp_joints = body.keypoint_joints();

    for (int f = 0; f < spec.frames; ++f) {
        if (f > 0) {
            // Axis components step together so the norm floor can reject the
            // whole move by flipping it.
            Vec3 dn(rng.uniform(-cap, cap), rng.uniform(-cap, cap), rng.uniform(-cap, cap));
            Vec3 n(v[0], v[1], v[2]);
            Vec3 cand = n + dn;
            for (int k = 0; k < 3; ++k) cand[k] = reflect_into(cand[k], -1.0, 1.0);
            if (cand.norm() < 0.3) {
                cand = n - dn;
                for (int k = 0; k < 3; ++k) cand[k] = reflect_into(cand[k], -1.0, 1.0);
                if (cand.norm() < 0.3) cand = n;  // hold
            }
            v[0] = cand.x();
            v[1] = cand.y();
            v[2] = cand.z();
            for (int i = 3; i < dim; ++i) {
                v[i] = reflect_into(v[i] + rng.uniform(-cap, cap), walk_lo[i], walk_hi[i]);
            }
        }

        VecX theta = v;
        if (spec.mode == LimbMode::phased && phase_extended(f)) {
            for (int i = 0; i < dim; ++i) {
                if (is_flexion[static_cast<size_t>(i)]) theta[i] = 0.0;
            }
        }
        out.thetas.push_back(std::move(theta));
    }

    out.poses.frames.reserve(out.thetas.size());
    for (const VecX& theta : out.thetas) {
        body.apply_params_into(theta, deltas, gp);
        PoseFrame frame;
        frame.keypoints.reserve(kp_joints.size());
        for (int j : kp_joints) frame.keypoints.push_back(gp.position(j));
        out.poses.frames.push_back(std::move(frame));
    }
    return out;
}

std::vector<GroundTruthSequence> generate_suite(std::uint64_t seed, const BodyModel& body,
                                                int pairs_per_tier) {
    int schedule_total = 0;
    for (int span : kPhaseSchedule) schedule_total += span;
    std::vector<GroundTruthSequence> suite;
    suite.reserve(static_cast<size_t>(6 * pairs_per_tier));
    int tier_index = 0;
    for (Speed speed : {Speed::slow, Speed::medium, Speed::fast}) {
        for (int rep = 0; rep < pairs_per_tier; ++rep) {
            const std::uint64_t s =
                splitmix64(seed + 0x51edce1ull * static_cast<std::uint64_t>(tier_index * 97 + rep + 1));
            suite.push_back(generate({schedule_total, speed, LimbMode::bent_only, s}, body));
            suite.push_back(generate({schedule_total, speed, LimbMode::phased, s}, body));
        }
        ++tier_index;
    }
    return suite;
}

}  // namespace kinefit
