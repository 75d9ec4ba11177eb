#include "kinefit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "kinefit/io.hpp"

namespace kinefit {

namespace {

namespace fs = std::filesystem;

BodyModel load_body_or_default(const std::string& path) {
    if (path.empty()) return BodyModel::default_body();
    return load_body(path);
}

AlgorithmSpec algorithm_from_flag(const std::string& flag, int patch_len) {
    if (flag == "frame") return {"frame", AlgorithmKind::frame, 0};
    if (flag == "frame-warm" || flag == "frame_warm") {
        return {"frame_warm", AlgorithmKind::frame_warm, 0};
    }
    if (flag == "temporal") {
        return {"temporal_m" + std::to_string(patch_len), AlgorithmKind::temporal, patch_len};
    }
    throw ValidationError("--algorithm",
                          "unknown algorithm '" + flag + "' (use frame|frame-warm|temporal)");
}

std::string sequence_stem(int index, const MotionSpec& spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "seq%02d_%s_%s", index,
                  limb_mode_name(spec.mode).c_str(), speed_name(spec.speed).c_str());
    return buf;
}

void write_sequence_pair(const fs::path& dir, int index, const GroundTruthSequence& gts,
                         const BodyModel& body) {
    const std::string stem = sequence_stem(index, gts.spec);
    write_pose_file(dir / (stem + "_pose.json"), gts.poses, body.keypoint_names());
    AngleData angles;
    angles.frames = gts.thetas;
    angles.provenance = {{"algorithm", "motion-generator"},
                         {"seed", gts.spec.seed},
                         {"speed", speed_name(gts.spec.speed)},
                         {"mode", limb_mode_name(gts.spec.mode)},
                         {"frames", gts.spec.frames}};
    write_angle_file(dir / (stem + "_angles.json"), angles, body);
}

int cmd_retarget(const std::string& pose_path, const std::string& body_path,
                 const std::string& algorithm, int patch_len, double lambda, int max_iter,
                 bool strict, const std::string& out_path) {
    const BodyModel body = load_body_or_default(body_path);
    const PoseSequence seq = load_pose_file(pose_path, body);
    const AlgorithmSpec alg = algorithm_from_flag(algorithm, patch_len);
    OptimizerSettings settings;
    settings.max_iterations = max_iter;

    IKResult ik = run_algorithm(alg, body, seq, lambda, settings);

    AngleData out;
    out.frames = ik.thetas;
    out.provenance = {{"algorithm", algorithm}, {"source", fs::path(pose_path).filename().string()}};
    if (alg.kind == AlgorithmKind::temporal) {
        out.provenance["M"] = patch_len;
        out.provenance["lambda"] = lambda;
    }
    write_angle_file(out_path, out, body);

    if (!ik.all_converged) {
        int stalled = 0;
        for (const IkUnitStats& u : ik.units) stalled += u.converged ? 0 : 1;
        std::cerr << "warning: " << stalled << " of " << ik.units.size()
                  << " optimization units hit the iteration cap\n";
        if (strict) return kExitNonConvergence;
    }
    std::cout << "wrote " << out_path << " (" << ik.thetas.size() << " frames, "
              << ik.total_iterations << " iterations)\n";
    return kExitOk;
}

int cmd_generate(bool suite, const std::string& speed, const std::string& mode, int frames,
                 std::uint64_t seed, const std::string& body_path, const std::string& out_dir) {
    const BodyModel body = load_body_or_default(body_path);
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());

    if (suite) {
        const auto sequences = generate_suite(seed, body);
        for (size_t i = 0; i < sequences.size(); ++i) {
            write_sequence_pair(dir, static_cast<int>(i), sequences[i], body);
        }
        std::cout << "wrote " << sequences.size() << " sequence pairs to " << out_dir << "\n";
    } else {
        MotionSpec spec{frames, speed_from_string(speed), limb_mode_from_string(mode), seed};
        write_sequence_pair(dir, 0, generate(spec, body), body);
        std::cout << "wrote 1 sequence pair to " << out_dir << "\n";
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& body_path, const std::string& out_path) {
    const BodyModel body = load_body_or_default(body_path);
    const AngleData pred = load_angle_file(pred_path, body);
    const AngleData gt = load_angle_file(gt_path, body);

    const double overall = mpjas(pred.frames, gt.frames, body);
    const std::vector<double> per_joint = mpjas_per_joint(pred.frames, gt.frames, body);

    json per_joint_json = json::object();
    std::cout << "mpjas14: " << overall << " rad/joint\n";
    for (size_t k = 0; k < per_joint.size(); ++k) {
        const std::string& name =
            body.joints()[static_cast<size_t>(body.reorientable()[k])].name;
        per_joint_json[name] = per_joint[k];
        std::cout << "  " << name << ": " << per_joint[k] << "\n";
    }
    if (!out_path.empty()) {
        write_text_file(out_path, canonical_dump(json{{"schema", "kinefit-report/1"},
                                                      {"mpjas14", overall},
                                                      {"per_joint", per_joint_json}}));
    }
    return kExitOk;
}

int cmd_bench(std::uint64_t seed, int pairs_per_tier, int jobs, int max_iter,
              const std::string& body_path, const std::string& out_path) {
    const BodyModel body = load_body_or_default(body_path);
    OptimizerSettings settings;
    settings.max_iterations = max_iter;

    const auto suite = generate_suite(seed, body, pairs_per_tier);
    const auto algorithms = default_algorithms();
    EvalReport report =
        run_experiment(suite, body, algorithms, default_lambda_table(), settings, jobs);
    report.seed = seed;

    const std::string table = report_table(report);
    std::cout << table;
    write_text_file(out_path, canonical_dump(report_to_json(report, settings, jobs)));
    fs::path summary(out_path);
    summary.replace_extension(".txt");
    write_text_file(summary, table);
    std::cout << "wrote " << out_path << " and " << summary.string() << "\n";
    return kExitOk;
}

int cmd_body(const std::string& out_path) {
    write_body_file(out_path, BodyModel::default_body());
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"inverse-kinematics retargeting of 3D keypoint sequences onto a constrained "
                 "kinematic chain"};
    app.require_subcommand(1);

    // retarget
    auto* retarget = app.add_subcommand(
        "retarget", "solve joint angles for a pose sequence");
    std::string pose_path, out_path, body_path, algorithm = "temporal";
    int patch_len = 5, max_iter = 200;
    double lambda = 0.5;
    bool strict = false;
    retarget->add_option("--pose", pose_path, "pose sequence file")->required();
    retarget->add_option("--body", body_path, "body config file (default: built-in)");
    retarget->add_option("--algorithm", algorithm, "frame|frame-warm|temporal");
    retarget->add_option("--M", patch_len, "patch length for the temporal algorithm");
    retarget->add_option("--lambda", lambda, "temporal weight");
    retarget->add_option("--max-iter", max_iter, "iteration cap per optimization");
    retarget->add_flag("--strict", strict, "exit 2 when any unit fails to converge");
    retarget->add_option("--out", out_path, "output angle file")->required();

    // generate
    auto* generate_cmd =
        app.add_subcommand("generate", "emit synthetic ground-truth motion");
    bool suite = false;
    std::string speed = "c", mode = "bent", gen_out, gen_body;
    int frames = 30;
    std::uint64_t seed = 0;
    generate_cmd->add_flag("--suite", suite, "full 24-sequence assessment suite");
    generate_cmd->add_option("--speed", speed, "a|b|c (slow to fast)");
    generate_cmd->add_option("--mode", mode, "bent|phased");
    generate_cmd->add_option("--frames", frames, "sequence length");
    generate_cmd->add_option("--seed", seed, "random seed");
    generate_cmd->add_option("--body", gen_body, "body config file");
    generate_cmd->add_option("--out", gen_out, "output directory")->required();

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "angular separation of two angle files");
    std::string pred_path, gt_path, eval_body, eval_out;
    evaluate_cmd->add_option("--pred", pred_path, "predicted angle file")->required();
    evaluate_cmd->add_option("--gt", gt_path, "ground-truth angle file")->required();
    evaluate_cmd->add_option("--body", eval_body, "body config file");
    evaluate_cmd->add_option("--out", eval_out, "report file");

    // bench
    auto* bench = app.add_subcommand("bench", "generate a suite, run all algorithms, report");
    std::uint64_t bench_seed = 0;
    int pairs_per_tier = 4, jobs = 1, bench_iter = 200;
    std::string bench_body, bench_out = "report.json";
    bench->add_option("--seed", bench_seed, "suite seed");
    bench->add_option("--pairs-per-tier", pairs_per_tier, "sequence pairs per speed tier");
    bench->add_option("--jobs", jobs, "worker threads");
    bench->add_option("--max-iter", bench_iter, "iteration cap per optimization");
    bench->add_option("--body", bench_body, "body config file");
    bench->add_option("--out", bench_out, "report file");

    // body
    auto* body_cmd = app.add_subcommand("body", "write the default body config");
    std::string body_out;
    body_cmd->add_option("--out", body_out, "output file")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (retarget->parsed()) {
            return cmd_retarget(pose_path, body_path, algorithm, patch_len, lambda, max_iter,
                                strict, out_path);
        }
        if (generate_cmd->parsed()) {
            return cmd_generate(suite, speed, mode, frames, seed, gen_body, gen_out);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(pred_path, gt_path, eval_body, eval_out);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_seed, pairs_per_tier, jobs, bench_iter, bench_body, bench_out);
        }
        if (body_cmd->parsed()) {
            return cmd_body(body_out);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace kinefit
