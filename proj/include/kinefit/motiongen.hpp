#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kinefit/losses.hpp"

namespace kinefit {

// Maximum per-parameter angle change between consecutive frames, radians.
enum class Speed { slow, medium, fast };
double speed_cap(Speed s);
std::string speed_name(Speed s);   // "a" (slow), "b" (medium), "c" (fast)
Speed speed_from_string(const std::string& s);

enum class LimbMode { bent_only, phased };
std::string limb_mode_name(LimbMode m);
LimbMode limb_mode_from_string(const std::string& s);

struct MotionSpec {
    int frames = 30;
    Speed speed = Speed::fast;
    LimbMode mode = LimbMode::bent_only;
    std::uint64_t seed = 0;
};

// Knee/elbow flexion floor that keeps adjacent links measurably non-colinear
// during bent phases.
inline constexpr double kBentFlexionMin = 0.3;

// The phased schedule, frame counts: extended / bent / extended / bent /
// extended. Applies to 30-frame sequences.
inline constexpr int kPhaseSchedule[5] = {3, 9, 6, 9, 3};

// True when `frame` (0-based) falls in an extended phase of the schedule.
bool phase_extended(int frame);

struct GroundTruthSequence {
    std::vector<VecX> thetas;  // one in-bounds parameter vector per frame
    PoseSequence poses;        // keypoint targets from forward kinematics
    MotionSpec spec;
};

// Bounded random walk within the ROM box: every parameter steps by at most
// the speed cap per frame and reflects at its bounds. Knee/elbow flexion is
// confined to [kBentFlexionMin, hi]. In phased mode the flexion channels are
// additionally gated by the schedule (zero while extended), which is the one
// place the per-frame cap is exceeded: the same seed yields identical
// trajectories for every other parameter in both modes.
// Raises InfeasibleSchedule when the flexion floor exceeds a ROM or when
// phased mode is requested for a frame count the schedule does not cover.
GroundTruthSequence generate(const MotionSpec& spec, const BodyModel& body);

// The assessment suite: per speed tier, `pairs_per_tier` paired sequences
// (bent-only and phased sharing a seed), 30 frames each; the default yields
// 24 sequences. Deterministic in `seed`.
std::vector<GroundTruthSequence> generate_suite(std::uint64_t seed, const BodyModel& body,
                                                int pairs_per_tier = 4);

}  // namespace kinefit
