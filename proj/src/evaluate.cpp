#include "kinefit/evaluate.hpp"

#include <algorithm>
#include <future>
#include <string>

namespace kinefit {

namespace {

void check_pair(std::span<const VecX> pred, std::span<const VecX> gt) {
    if (pred.size() != gt.size()) {
        throw LengthMismatch("prediction has " + std::to_string(pred.size()) +
                             " frames, ground truth has " + std::to_string(gt.size()));
    }
    if (pred.empty()) throw LengthMismatch("empty sequences");
}

}  // namespace

double mpjas(std::span<const VecX> pred, std::span<const VecX> gt, const BodyModel& body,
             std::span<const int> joint_subset) {
    check_pair(pred, gt);
    const std::vector<int>& all = body.reorientable();
    const std::span<const int> joints =
        joint_subset.empty() ? std::span<const int>(all) : joint_subset;
    if (joints.empty()) throw LengthMismatch("empty joint subset");

    std::vector<Mat3> deltas;
    GlobalPose gp_pred, gp_gt;
    double frame_acc = 0.0;
    for (size_t f = 0; f < pred.size(); ++f) {
        body.apply_params_into(pred[f], deltas, gp_pred);
        body.apply_params_into(gt[f], deltas, gp_gt);
        double joint_acc = 0.0;
        for (int j : joints) {
            joint_acc += relative_angle(gp_pred.orientation(j), gp_gt.orientation(j));
        }
        frame_acc += joint_acc / static_cast<double>(joints.size());
    }
    return frame_acc / static_cast<double>(pred.size());
}

std::vector<double> mpjas_per_joint(std::span<const VecX> pred, std::span<const VecX> gt,
                                    const BodyModel& body) {
    check_pair(pred, gt);
    std::vector<double> acc(body.reorientable().size(), 0.0);
    std::vector<Mat3> deltas;
    GlobalPose gp_pred, gp_gt;
    for (size_t f = 0; f < pred.size(); ++f) {
        body.apply_params_into(pred[f], deltas, gp_pred);
        body.apply_params_into(gt[f], deltas, gp_gt);
        for (size_t k = 0; k < acc.size(); ++k) {
            const int j = body.reorientable()[k];
            acc[k] += relative_angle(gp_pred.orientation(j), gp_gt.orientation(j));
        }
    }
    for (double& v : acc) v /= static_cast<double>(pred.size());
    return acc;
}

std::vector<AlgorithmSpec> default_algorithms() {
    return {{"frame", AlgorithmKind::frame, 0},
            {"frame_warm", AlgorithmKind::frame_warm, 0},
            {"temporal_m3", AlgorithmKind::temporal, 3},
            {"temporal_m5", AlgorithmKind::temporal, 5}};
}

std::map<Speed, double> default_lambda_table() {
    return {{Speed::slow, 0.7}, {Speed::medium, 0.5}, {Speed::fast, 0.3}};
}

IKResult run_algorithm(const AlgorithmSpec& alg, const BodyModel& body, const PoseSequence& seq,
                       double lambda, const OptimizerSettings& settings) {
    switch (alg.kind) {
        case AlgorithmKind::frame:
            return ik_sequence_frame_by_frame(body, seq, /*warm_start=*/false, settings);
        case AlgorithmKind::frame_warm:
            return ik_sequence_frame_by_frame(body, seq, /*warm_start=*/true, settings);
        default:
            return ik_sequence_temporal(body, seq, alg.patch_len, lambda, settings);
    }
}

EvalReport run_experiment(std::span<const GroundTruthSequence> suite, const BodyModel& body,
                          std::span<const AlgorithmSpec> algorithms,
                          const std::map<Speed, double>& lambda_table,
                          const OptimizerSettings& settings, int jobs) {
    EvalReport report;
    for (int j : body.reorientable()) {
        report.joint_names.push_back(body.joints()[static_cast<size_t>(j)].name);
    }
    report.runs.resize(suite.size() * algorithms.size());

    const auto [lo, hi] = body.bounds();
    auto run_one = [&](size_t si, size_t ai) {
        const GroundTruthSequence& gts = suite[si];
        const AlgorithmSpec& alg = algorithms[ai];
        const double lambda = lambda_table.at(gts.spec.speed);
        RunRecord rec;
        rec.algorithm = alg.name;
        rec.sequence = static_cast<int>(si);
        rec.speed = gts.spec.speed;
        rec.mode = gts.spec.mode;
        rec.frames = gts.poses.frame_count();

        IKResult ik = run_algorithm(alg, body, gts.poses, lambda, settings);
        rec.seconds = ik.seconds;
        rec.fps = ik.seconds > 0.0 ? rec.frames / ik.seconds : 0.0;
        rec.iterations = ik.total_iterations;
        rec.all_converged = ik.all_converged;
        for (const IkUnitStats& u : ik.units) {
            if (u.final_loss > u.initial_loss) rec.monotone = false;
        }
        for (const VecX& th : ik.thetas) {
            for (int i = 0; i < th.size(); ++i) {
                if (th[i] < lo[i] || th[i] > hi[i]) rec.feasible = false;
            }
        }
        rec.mpjas14 = mpjas(ik.thetas, gts.thetas, body);
        rec.per_joint = mpjas_per_joint(ik.thetas, gts.thetas, body);
        report.runs[si * algorithms.size() + ai] = std::move(rec);
    };

    if (jobs <= 1) {
        for (size_t si = 0; si < suite.size(); ++si) {
            for (size_t ai = 0; ai < algorithms.size(); ++ai) run_one(si, ai);
        }
    } else {
        // shard sequences across threads; each result lands in its own slot
        std::vector<std::future<void>> futures;
        const size_t shard = (suite.size() + static_cast<size_t>(jobs) - 1) /
                             static_cast<size_t>(jobs);
        for (size_t begin = 0; begin < suite.size(); begin += shard) {
            const size_t end = std::min(begin + shard, suite.size());
            futures.push_back(std::async(std::launch::async, [&, begin, end] {
                for (size_t si = begin; si < end; ++si) {
                    for (size_t ai = 0; ai < algorithms.size(); ++ai) run_one(si, ai);
                }
            }));
        }
        for (auto& f : futures) f.get();
    }
    return report;
}

double EvalReport::mean_mpjas(const std::string& algorithm, const Speed* speed,
                              const LimbMode* mode) const {
    double acc = 0.0;
    int n = 0;
    for (const RunRecord& r : runs) {
        if (r.algorithm != algorithm) continue;
        if (speed && r.speed != *speed) continue;
        if (mode && r.mode != *mode) continue;
        acc += r.mpjas14;
        ++n;
    }
    return n > 0 ? acc / n : 0.0;
}

double EvalReport::mean_fps(const std::string& algorithm, const Speed* speed) const {
    double acc = 0.0;
    int n = 0;
    for (const RunRecord& r : runs) {
        if (r.algorithm != algorithm) continue;
        if (speed && r.speed != *speed) continue;
        acc += r.fps;
        ++n;
    }
    return n > 0 ? acc / n : 0.0;
}

long EvalReport::total_iterations(const std::string& algorithm, const Speed* speed) const {
    long acc = 0;
    for (const RunRecord& r : runs) {
        if (r.algorithm != algorithm) continue;
        if (speed && r.speed != *speed) continue;
        acc += r.iterations;
    }
    return acc;
}

std::vector<double> EvalReport::mean_per_joint(const std::string& algorithm,
                                               const LimbMode* mode) const {
    std::vector<double> acc(joint_names.size(), 0.0);
    int n = 0;
    for (const RunRecord& r : runs) {
        if (r.algorithm != algorithm) continue;
        if (mode && r.mode != *mode) continue;
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += r.per_joint[k];
        ++n;
    }
    if (n > 0) {
        for (double& v : acc) v /= n;
    }
    return acc;
}

std::map<std::string, bool> EvalReport::ordering_flags() const {
    std::map<std::string, bool> flags;
    const LimbMode phased = LimbMode::phased;
    const LimbMode bent = LimbMode::bent_only;
    const Speed slow = Speed::slow;

    flags["temporal_m5_below_frame_on_phased"] =
        mean_mpjas("temporal_m5", nullptr, &phased) < mean_mpjas("frame", nullptr, &phased);
    flags["temporal_m5_below_m3_on_phased"] =
        mean_mpjas("temporal_m5", nullptr, &phased) < mean_mpjas("temporal_m3", nullptr, &phased);

    double lo_v = 1e300, hi_v = 0.0;
    for (const char* a : {"frame", "frame_warm", "temporal_m3", "temporal_m5"}) {
        const double v = mean_mpjas(a, nullptr, &bent);
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
    }
    flags["bent_cluster_within_2x"] = hi_v <= 2.0 * lo_v;

    flags["warm_start_fewer_iterations_slow"] =
        total_iterations("frame_warm", &slow) <= total_iterations("frame", &slow);

    // clavicles suffer from the missing keypoints; knees do not
    const std::vector<double> pj = mean_per_joint("frame", &phased);
    double clav = 0.0, knee = 0.0;
    int n_clav = 0, n_knee = 0;
    for (size_t k = 0; k < joint_names.size(); ++k) {
        if (joint_names[k].find("clavicle") != std::string::npos) {
            clav += pj[k];
            ++n_clav;
        }
        if (joint_names[k].find("knee") != std::string::npos) {
            knee += pj[k];
            ++n_knee;
        }
    }
    flags["clavicle_above_knee_frame_on_phased"] =
        n_clav > 0 && n_knee > 0 && clav / n_clav > knee / n_knee;
    return flags;
}

}  // namespace kinefit
