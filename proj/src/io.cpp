#include "kinefit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <thread>

namespace kinefit {

namespace {

constexpr const char* kBodySchema = "kinefit-body/1";
constexpr const char* kPoseSchema = "kinefit-pose/1";
constexpr const char* kAngleSchema = "kinefit-angles/1";
constexpr const char* kReportSchema = "kinefit-report/1";

void require_schema(const json& j, const char* expected, const std::string& where) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
        throw ValidationError(where, "missing schema field");
    }
    const std::string got = j["schema"].get<std::string>();
    if (got != expected) {
        throw ValidationError(where, "schema '" + got + "', expected '" + expected + "'");
    }
}

double finite_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where, "expected a finite number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(where, "non-finite value");
    return d;
}

Axis axis_from_string(const std::string& s, const std::string& where) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw ValidationError(where, "unknown axis '" + s + "'");
}

const char* axis_to_string(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

}  // namespace

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string(), e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---- body ------------------------------------------------------------------

json body_to_json(const BodyModel& body) {
    json joints = json::array();
    for (const BodyJoint& bj : body.joints()) {
        json j;
        j["name"] = bj.name;
        j["parent"] = bj.parent < 0
                          ? json(nullptr)
                          : json(body.joints()[static_cast<size_t>(bj.parent)].name);
        j["offset"] = {bj.offset.x(), bj.offset.y(), bj.offset.z()};
        if (bj.root_axis_angle) j["root_axis_angle"] = true;
        json dofs = json::array();
        for (const Dof& d : bj.dofs) {
            dofs.push_back({{"axis", axis_to_string(d.axis)}, {"min", d.lo}, {"max", d.hi}});
        }
        j["dofs"] = dofs;
        if (bj.keypoint) j["keypoint"] = *bj.keypoint;
        if (bj.global_link) j["global_link"] = true;
        joints.push_back(std::move(j));
    }
    return json{{"schema", kBodySchema}, {"joints", joints}};
}

BodyModel body_from_json(const json& j, const std::string& where) {
    require_schema(j, kBodySchema, where);
    if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty()) {
        throw ValidationError(where, "missing joints array");
    }
    std::vector<BodyJoint> joints;
    std::vector<std::string> names;
    for (size_t i = 0; i < j["joints"].size(); ++i) {
        const json& ji = j["joints"][i];
        const std::string loc = where + ", joint " + std::to_string(i);
        BodyJoint bj;
        if (!ji.contains("name") || !ji["name"].is_string()) {
            throw ValidationError(loc, "missing name");
        }
        bj.name = ji["name"].get<std::string>();
        if (!ji.contains("parent")) throw ValidationError(loc, "missing parent");
        if (ji["parent"].is_null()) {
            bj.parent = -1;
        } else {
            const std::string pname = ji["parent"].get<std::string>();
            const auto it = std::find(names.begin(), names.end(), pname);
            if (it == names.end()) {
                throw ValidationError(loc, "parent '" + pname +
                                               "' not declared before joint '" + bj.name + "'");
            }
            bj.parent = static_cast<int>(it - names.begin());
        }
        if (!ji.contains("offset") || !ji["offset"].is_array() || ji["offset"].size() != 3) {
            throw ValidationError(loc, "offset must be [x, y, z]");
        }
        for (int k = 0; k < 3; ++k) {
            bj.offset[k] = finite_number(ji["offset"][static_cast<size_t>(k)],
                                         loc + ", offset[" + std::to_string(k) + "]");
        }
        bj.root_axis_angle = ji.value("root_axis_angle", false);
        if (ji.contains("dofs")) {
            for (size_t d = 0; d < ji["dofs"].size(); ++d) {
                const json& jd = ji["dofs"][d];
                const std::string dloc = loc + ", dof " + std::to_string(d);
                if (!jd.contains("axis") || !jd.contains("min") || !jd.contains("max")) {
                    throw ValidationError(dloc, "dof needs axis/min/max");
                }
                bj.dofs.push_back({axis_from_string(jd["axis"].get<std::string>(), dloc),
                                   finite_number(jd["min"], dloc + ", min"),
                                   finite_number(jd["max"], dloc + ", max")});
            }
        }
        if (ji.contains("keypoint")) bj.keypoint = ji["keypoint"].get<std::string>();
        bj.global_link = ji.value("global_link", false);
        names.push_back(bj.name);
        joints.push_back(std::move(bj));
    }
    try {
        return BodyModel::from_joints(std::move(joints));
    } catch (const Error& e) {
        throw ValidationError(where, e.what());
    }
}

BodyModel load_body(const std::filesystem::path& path) {
    return body_from_json(read_json_file(path), path.string());
}

void write_body_file(const std::filesystem::path& path, const BodyModel& body) {
    write_text_file(path, canonical_dump(body_to_json(body)));
}

std::string body_hash(const BodyModel& body) {
    const std::string text = canonical_dump(body_to_json(body));
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

// ---- poses -----------------------------------------------------------------

json pose_to_json(const PoseSequence& seq, const std::vector<std::string>& keypoints) {
    json frames = json::array();
    for (size_t f = 0; f < seq.frames.size(); ++f) {
        const PoseFrame& frame = seq.frames[f];
        if (frame.keypoints.size() != keypoints.size()) {
            throw ValidationError("frame " + std::to_string(f), "keypoint count mismatch");
        }
        json row = json::array();
        for (size_t k = 0; k < frame.keypoints.size(); ++k) {
            const Vec3& p = frame.keypoints[k];
            if (!p.allFinite()) {
                throw ValidationError("frame " + std::to_string(f) + ", keypoint '" +
                                          keypoints[k] + "'",
                                      "non-finite value");
            }
            row.push_back({p.x(), p.y(), p.z()});
        }
        frames.push_back(std::move(row));
    }
    json j{{"schema", kPoseSchema}, {"keypoints", keypoints}, {"frames", frames}};
    if (seq.fps) j["fps"] = *seq.fps;
    return j;
}

PoseSequence pose_from_json(const json& j, const BodyModel& body, const std::string& where) {
    require_schema(j, kPoseSchema, where);
    if (!j.contains("keypoints") || !j["keypoints"].is_array()) {
        throw ValidationError(where, "missing keypoints list");
    }
    std::vector<std::string> file_kps;
    for (const json& k : j["keypoints"]) file_kps.push_back(k.get<std::string>());

    // body keypoint -> column in the file
    std::vector<int> column(body.keypoint_names().size(), -1);
    for (size_t b = 0; b < body.keypoint_names().size(); ++b) {
        for (size_t c = 0; c < file_kps.size(); ++c) {
            if (file_kps[c] == body.keypoint_names()[b]) {
                column[b] = static_cast<int>(c);
                break;
            }
        }
        if (column[b] < 0) {
            throw ValidationError(where, "keypoint '" + body.keypoint_names()[b] +
                                             "' required by the body is missing");
        }
    }

    if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
        throw ValidationError(where, "missing frames");
    }
    PoseSequence seq;
    if (j.contains("fps")) seq.fps = finite_number(j["fps"], where + ", fps");
    for (size_t f = 0; f < j["frames"].size(); ++f) {
        const json& row = j["frames"][f];
        const std::string floc = where + ", frame " + std::to_string(f);
        if (!row.is_array() || row.size() != file_kps.size()) {
            const size_t got = row.is_array() ? row.size() : 0;
            std::string detail = "has " + std::to_string(got) + " keypoints, expected " +
                                 std::to_string(file_kps.size());
            if (got < file_kps.size()) detail += "; first missing: '" + file_kps[got] + "'";
            throw ValidationError(floc, detail);
        }
        PoseFrame frame;
        frame.keypoints.resize(column.size());
        for (size_t b = 0; b < column.size(); ++b) {
            const json& triple = row[static_cast<size_t>(column[b])];
            const std::string kloc = floc + ", keypoint '" + body.keypoint_names()[b] + "'";
            if (!triple.is_array() || triple.size() != 3) {
                throw ValidationError(kloc, "expected [x, y, z]");
            }
            for (int c = 0; c < 3; ++c) {
                frame.keypoints[b][c] = finite_number(triple[static_cast<size_t>(c)], kloc);
            }
        }
        validate_frame(frame, body, static_cast<int>(f));
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

PoseSequence load_pose_file(const std::filesystem::path& path, const BodyModel& body) {
    return pose_from_json(read_json_file(path), body, path.string());
}

void write_pose_file(const std::filesystem::path& path, const PoseSequence& seq,
                     const std::vector<std::string>& keypoints) {
    write_text_file(path, canonical_dump(pose_to_json(seq, keypoints)));
}

// ---- angles ----------------------------------------------------------------

json angles_to_json(const AngleData& data, const BodyModel& body) {
    json frames = json::array();
    for (size_t f = 0; f < data.frames.size(); ++f) {
        const VecX& row = data.frames[f];
        if (row.size() != body.param_count()) {
            throw ValidationError("frame " + std::to_string(f), "parameter count mismatch");
        }
        json jrow = json::array();
        for (int i = 0; i < row.size(); ++i) {
            if (!std::isfinite(row[i])) {
                throw ValidationError("frame " + std::to_string(f) + ", parameter '" +
                                          body.param_names()[static_cast<size_t>(i)] + "'",
                                      "non-finite value");
            }
            jrow.push_back(row[i]);
        }
        frames.push_back(std::move(jrow));
    }
    json provenance = data.provenance.is_null() ? json::object() : data.provenance;
    provenance["body_hash"] = body_hash(body);
    return json{{"schema", kAngleSchema},
                {"parameters", body.param_names()},
                {"provenance", provenance},
                {"frames", frames}};
}

AngleData angles_from_json(const json& j, const BodyModel& body, const std::string& where) {
    require_schema(j, kAngleSchema, where);
    if (!j.contains("parameters") || !j["parameters"].is_array() ||
        j["parameters"].size() != body.param_names().size()) {
        throw ValidationError(where, "parameter header does not match the body (" +
                                         std::to_string(body.param_names().size()) +
                                         " parameters expected)");
    }
    for (size_t i = 0; i < body.param_names().size(); ++i) {
        if (j["parameters"][i].get<std::string>() != body.param_names()[i]) {
            throw ValidationError(where, "parameter " + std::to_string(i) + " is '" +
                                             j["parameters"][i].get<std::string>() +
                                             "', body expects '" + body.param_names()[i] + "'");
        }
    }
    if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
        throw ValidationError(where, "missing frames");
    }
    const auto [lo, hi] = body.bounds();
    AngleData data;
    if (j.contains("provenance")) data.provenance = j["provenance"];
    for (size_t f = 0; f < j["frames"].size(); ++f) {
        const json& row = j["frames"][f];
        const std::string floc = where + ", frame " + std::to_string(f);
        if (!row.is_array() || static_cast<int>(row.size()) != body.param_count()) {
            throw ValidationError(floc, "row length " + std::to_string(row.size()) +
                                            ", expected " + std::to_string(body.param_count()));
        }
        VecX theta(body.param_count());
        for (int i = 0; i < body.param_count(); ++i) {
            const std::string ploc =
                floc + ", parameter '" + body.param_names()[static_cast<size_t>(i)] + "'";
            theta[i] = finite_number(row[static_cast<size_t>(i)], ploc);
            if (theta[i] < lo[i] - 1e-9 || theta[i] > hi[i] + 1e-9) {
                throw ValidationError(ploc, "value " + std::to_string(theta[i]) +
                                                " outside bounds [" + std::to_string(lo[i]) +
                                                ", " + std::to_string(hi[i]) + "]");
            }
        }
        data.frames.push_back(std::move(theta));
    }
    return data;
}

AngleData load_angle_file(const std::filesystem::path& path, const BodyModel& body) {
    return angles_from_json(read_json_file(path), body, path.string());
}

void write_angle_file(const std::filesystem::path& path, const AngleData& data,
                      const BodyModel& body) {
    write_text_file(path, canonical_dump(angles_to_json(data, body)));
}

// ---- reports ---------------------------------------------------------------

json report_to_json(const EvalReport& report, const OptimizerSettings& settings, int jobs) {
    json runs = json::array();
    for (const RunRecord& r : report.runs) {
        runs.push_back({{"algorithm", r.algorithm},
                        {"sequence", r.sequence},
                        {"speed", speed_name(r.speed)},
                        {"mode", limb_mode_name(r.mode)},
                        {"frames", r.frames},
                        {"mpjas14", r.mpjas14},
                        {"per_joint", r.per_joint},
                        {"seconds", r.seconds},
                        {"fps", r.fps},
                        {"iterations", r.iterations},
                        {"converged", r.all_converged},
                        {"monotone", r.monotone},
                        {"feasible", r.feasible}});
    }

    json per_algorithm = json::object();
    for (const char* a : {"frame", "frame_warm", "temporal_m3", "temporal_m5"}) {
        json tiers = json::object();
        for (Speed s : {Speed::slow, Speed::medium, Speed::fast}) {
            tiers[speed_name(s)] = {{"mpjas14", report.mean_mpjas(a, &s)},
                                    {"fps", report.mean_fps(a, &s)}};
        }
        const LimbMode bent = LimbMode::bent_only, phased = LimbMode::phased;
        json per_joint = json::object();
        const std::vector<double> pj = report.mean_per_joint(a, &phased);
        for (size_t k = 0; k < report.joint_names.size(); ++k) {
            per_joint[report.joint_names[k]] = pj[k];
        }
        per_algorithm[a] = {{"per_tier", tiers},
                            {"overall_mpjas14", report.mean_mpjas(a)},
                            {"overall_fps", report.mean_fps(a)},
                            {"bent_mpjas14", report.mean_mpjas(a, nullptr, &bent)},
                            {"phased_mpjas14", report.mean_mpjas(a, nullptr, &phased)},
                            {"per_joint_phased", per_joint}};
    }

    json flags = json::object();
    for (const auto& [name, ok] : report.ordering_flags()) flags[name] = ok;

    return json{{"schema", kReportSchema},
                {"seed", report.seed},
                {"settings",
                 {{"max_iterations", settings.max_iterations},
                  {"tolerance", settings.tolerance},
                  {"fd_step", settings.fd_step},
                  {"jobs", jobs}}},
                {"machine",
                 {{"compiler", __VERSION__},
                  {"threads", std::thread::hardware_concurrency()}}},
                {"runs", runs},
                {"per_algorithm", per_algorithm},
                {"orderings", flags}};
}

std::string report_table(const EvalReport& report) {
    std::ostringstream out;
    out.setf(std::ios::scientific);
    out.precision(2);
    out << "algorithm      ";
    for (Speed s : {Speed::slow, Speed::medium, Speed::fast}) {
        out << "| speed " << speed_name(s) << ": fps      E        ";
    }
    out << "| avg E\n";
    for (const char* a : {"frame", "frame_warm", "temporal_m3", "temporal_m5"}) {
        out.width(15);
        out.setf(std::ios::left, std::ios::adjustfield);
        out << a;
        for (Speed s : {Speed::slow, Speed::medium, Speed::fast}) {
            out << "| " << report.mean_fps(a, &s) << " " << report.mean_mpjas(a, &s) << " ";
        }
        out << "| " << report.mean_mpjas(a) << "\n";
    }
    out << "\nalgorithm      | bent only | extended & bent\n";
    for (const char* a : {"frame", "frame_warm", "temporal_m3", "temporal_m5"}) {
        const LimbMode bent = LimbMode::bent_only, phased = LimbMode::phased;
        out.width(15);
        out.setf(std::ios::left, std::ios::adjustfield);
        out << a << "| " << report.mean_mpjas(a, nullptr, &bent) << "  | "
            << report.mean_mpjas(a, nullptr, &phased) << "\n";
    }
    out << "\norderings:\n";
    for (const auto& [name, ok] : report.ordering_flags()) {
        out << "  [" << (ok ? "pass" : "FAIL") << "] " << name << "\n";
    }
    return out.str();
}

}  // namespace kinefit
