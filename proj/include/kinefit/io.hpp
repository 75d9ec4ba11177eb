#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinefit/evaluate.hpp"

namespace kinefit {

using json = nlohmann::json;

// All files share one canonical form: keys sorted, two-space indent, one
// trailing newline. Reading then writing any valid file is byte-stable.
std::string canonical_dump(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// ---- body configuration ("kinefit-body/1") --------------------------------
json body_to_json(const BodyModel& body);
BodyModel body_from_json(const json& j, const std::string& where = "body config");
BodyModel load_body(const std::filesystem::path& path);
void write_body_file(const std::filesystem::path& path, const BodyModel& body);

// FNV-1a hash of the canonical body config; ties angle files to the chain
// they were solved on.
std::string body_hash(const BodyModel& body);

// ---- pose sequences ("kinefit-pose/1") ------------------------------------
json pose_to_json(const PoseSequence& seq, const std::vector<std::string>& keypoints);
// Reorders the file's keypoints into the body's binding order; extra
// keypoints are ignored, missing ones are an error.
PoseSequence pose_from_json(const json& j, const BodyModel& body,
                            const std::string& where = "pose file");
PoseSequence load_pose_file(const std::filesystem::path& path, const BodyModel& body);
void write_pose_file(const std::filesystem::path& path, const PoseSequence& seq,
                     const std::vector<std::string>& keypoints);

// ---- joint-angle sequences ("kinefit-angles/1") ----------------------------
struct AngleData {
    std::vector<VecX> frames;
    json provenance;  // body hash, algorithm, lambda, patch length, seed, ...
};
json angles_to_json(const AngleData& data, const BodyModel& body);
AngleData angles_from_json(const json& j, const BodyModel& body,
                           const std::string& where = "angle file");
AngleData load_angle_file(const std::filesystem::path& path, const BodyModel& body);
void write_angle_file(const std::filesystem::path& path, const AngleData& data,
                      const BodyModel& body);

// ---- evaluation reports ("kinefit-report/1") -------------------------------
json report_to_json(const EvalReport& report, const OptimizerSettings& settings, int jobs);
// Fixed-width summary tables (per-tier accuracy/fps grid, per-mode accuracy,
// ordering flags).
std::string report_table(const EvalReport& report);

}  // namespace kinefit
