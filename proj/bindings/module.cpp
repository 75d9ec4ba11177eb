#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinefit/evaluate.hpp"
#include "kinefit/io.hpp"

namespace py = pybind11;
using namespace kinefit;

namespace {

PoseSequence sequence_from_array(const BodyModel& body,
                                 const std::vector<Eigen::MatrixXd>& frames) {
    PoseSequence seq;
    const size_t k_count = body.keypoint_names().size();
    for (size_t f = 0; f < frames.size(); ++f) {
        const Eigen::MatrixXd& m = frames[f];
        if (static_cast<size_t>(m.rows()) != k_count || m.cols() != 3) {
            throw ValidationError("frame " + std::to_string(f),
                                  "expected a (" + std::to_string(k_count) + ", 3) array");
        }
        PoseFrame frame;
        frame.keypoints.reserve(k_count);
        for (size_t k = 0; k < k_count; ++k) {
            frame.keypoints.push_back(m.row(static_cast<Eigen::Index>(k)).transpose());
        }
        validate_frame(frame, body, static_cast<int>(f));
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

py::dict ik_result_to_dict(const IKResult& res) {
    py::dict d;
    py::list thetas, losses;
    for (const VecX& t : res.thetas) thetas.append(t);
    for (double l : res.frame_losses) losses.append(l);
    d["thetas"] = thetas;
    d["frame_losses"] = losses;
    d["iterations"] = res.total_iterations;
    d["converged"] = res.all_converged;
    d["seconds"] = res.seconds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "inverse-kinematics retargeting of 3D keypoint sequences onto a "
              "biomechanically constrained kinematic chain";

    py::register_exception<Error>(m, "KinefitError");

    // rotations
    m.def("axis_angle_to_matrix",
          [](const Vec3& axis, double angle) { return axis_angle_to_matrix({axis, angle}); },
          py::arg("axis"), py::arg("angle"));
    m.def("matrix_to_axis_angle",
          [](const Mat3& R) {
              const AxisAngle aa = matrix_to_axis_angle(R);
              return py::make_tuple(aa.axis, aa.angle);
          },
          py::arg("R"));
    m.def("euler_xyz_to_matrix",
          [](double x, double y, double z) { return euler_xyz_to_matrix({x, y, z}); },
          py::arg("x"), py::arg("y"), py::arg("z"));
    m.def("matrix_to_euler_xyz",
          [](const Mat3& R) {
              const EulerXyz e = matrix_to_euler_xyz(R);
              return py::make_tuple(e.x, e.y, e.z);
          },
          py::arg("R"));
    m.def("solution_space",
          [](const Vec3& a, const Vec3& b, double alpha) {
              const SolutionSpaceSample s = solution_space(a, b, alpha);
              return py::make_tuple(s.axis, s.angle);
          },
          py::arg("a"), py::arg("b"), py::arg("alpha"),
          "Axis and angle mapping direction a onto direction b, sampled at plane angle alpha.");
    m.def("relative_angle", &relative_angle, py::arg("R_a"), py::arg("R_b"));

    // body
    py::class_<BodyModel>(m, "BodyModel")
        .def_static("default", [] { return BodyModel::default_body(); })
        .def_static("from_json", [](const std::string& text) {
            return body_from_json(json::parse(text));
        })
        .def("to_json", [](const BodyModel& b) { return canonical_dump(body_to_json(b)); })
        .def_property_readonly("param_count", &BodyModel::param_count)
        .def_property_readonly("dof_count", &BodyModel::dof_count)
        .def_property_readonly("param_names", &BodyModel::param_names)
        .def_property_readonly("keypoint_names", &BodyModel::keypoint_names)
        .def_property_readonly("joint_names",
                               [](const BodyModel& b) {
                                   std::vector<std::string> names;
                                   for (const BodyJoint& j : b.joints()) names.push_back(j.name);
                                   return names;
                               })
        .def_property_readonly("reorientable_joint_names",
                               [](const BodyModel& b) {
                                   std::vector<std::string> names;
                                   for (int j : b.reorientable()) {
                                       names.push_back(b.joints()[static_cast<size_t>(j)].name);
                                   }
                                   return names;
                               })
        .def("bounds", &BodyModel::bounds)
        .def("rest_params", &BodyModel::rest_params)
        .def("joint_positions",
             [](const BodyModel& b, const VecX& theta) {
                 const GlobalPose gp = b.apply_params(theta);
                 Eigen::MatrixXd out(b.joint_count(), 3);
                 for (int j = 0; j < b.joint_count(); ++j) {
                     out.row(j) = gp.position(j).transpose();
                 }
                 return out;
             },
             py::arg("theta"))
        .def("joint_orientations",
             [](const BodyModel& b, const VecX& theta) {
                 const GlobalPose gp = b.apply_params(theta);
                 std::vector<Mat3> out;
                 for (int j = 0; j < b.joint_count(); ++j) out.push_back(gp.orientation(j));
                 return out;
             },
             py::arg("theta"))
        .def("keypoint_positions",
             [](const BodyModel& b, const VecX& theta) {
                 const GlobalPose gp = b.apply_params(theta);
                 Eigen::MatrixXd out(static_cast<Eigen::Index>(b.keypoint_joints().size()), 3);
                 for (size_t k = 0; k < b.keypoint_joints().size(); ++k) {
                     out.row(static_cast<Eigen::Index>(k)) =
                         gp.position(b.keypoint_joints()[k]).transpose();
                 }
                 return out;
             },
             py::arg("theta"));

    // losses
    m.def("frame_loss",
          [](const BodyModel& body, const VecX& theta, const Eigen::MatrixXd& keypoints) {
              const PoseSequence seq = sequence_from_array(body, {keypoints});
              return frame_loss(theta, seq.frames[0], body);
          },
          py::arg("body"), py::arg("theta"), py::arg("keypoints"));
    m.def("temporal_error",
          [](const BodyModel& body, const std::vector<VecX>& thetas) {
              return temporal_error(thetas, body);
          },
          py::arg("body"), py::arg("thetas"));

    // solvers
    m.def("ik_frame",
          [](const BodyModel& body, const Eigen::MatrixXd& keypoints,
             std::optional<VecX> theta0, int max_iterations) {
              const PoseSequence seq = sequence_from_array(body, {keypoints});
              OptimizerSettings settings;
              settings.max_iterations = max_iterations;
              return ik_result_to_dict(ik_frame(
                  body, seq.frames[0], theta0 ? *theta0 : body.rest_params(), settings));
          },
          py::arg("body"), py::arg("keypoints"), py::arg("theta0") = std::nullopt,
          py::arg("max_iterations") = 200);
    m.def("ik_sequence",
          [](const BodyModel& body, const std::vector<Eigen::MatrixXd>& frames, bool warm_start,
             int max_iterations) {
              OptimizerSettings settings;
              settings.max_iterations = max_iterations;
              return ik_result_to_dict(ik_sequence_frame_by_frame(
                  body, sequence_from_array(body, frames), warm_start, settings));
          },
          py::arg("body"), py::arg("frames"), py::arg("warm_start") = true,
          py::arg("max_iterations") = 200);
    m.def("ik_temporal",
          [](const BodyModel& body, const std::vector<Eigen::MatrixXd>& frames, int patch_len,
             double lambda, int max_iterations) {
              OptimizerSettings settings;
              settings.max_iterations = max_iterations;
              return ik_result_to_dict(ik_sequence_temporal(
                  body, sequence_from_array(body, frames), patch_len, lambda, settings));
          },
          py::arg("body"), py::arg("frames"), py::arg("patch_len") = 5,
          py::arg("lambda_") = 0.5, py::arg("max_iterations") = 200);

    // synthetic motion + metrics
    m.def("generate",
          [](const BodyModel& body, int frames, const std::string& speed, const std::string& mode,
             std::uint64_t seed) {
              const GroundTruthSequence gts = generate(
                  {frames, speed_from_string(speed), limb_mode_from_string(mode), seed}, body);
              py::list thetas, keypoints;
              for (const VecX& t : gts.thetas) thetas.append(t);
              for (const PoseFrame& f : gts.poses.frames) {
                  Eigen::MatrixXd m(static_cast<Eigen::Index>(f.keypoints.size()), 3);
                  for (size_t k = 0; k < f.keypoints.size(); ++k) {
                      m.row(static_cast<Eigen::Index>(k)) = f.keypoints[k].transpose();
                  }
                  keypoints.append(m);
              }
              return py::make_tuple(thetas, keypoints);
          },
          py::arg("body"), py::arg("frames") = 30, py::arg("speed") = "c",
          py::arg("mode") = "bent", py::arg("seed") = 0);
    m.def("mpjas",
          [](const BodyModel& body, const std::vector<VecX>& pred, const std::vector<VecX>& gt,
             std::optional<std::vector<std::string>> joints) {
              std::vector<int> subset;
              if (joints) {
                  for (const std::string& name : *joints) {
                      bool found = false;
                      for (int j : body.reorientable()) {
                          if (body.joints()[static_cast<size_t>(j)].name == name) {
                              subset.push_back(j);
                              found = true;
                          }
                      }
                      if (!found) throw ValidationError("joints", "unknown joint '" + name + "'");
                  }
              }
              return mpjas(pred, gt, body, subset);
          },
          py::arg("body"), py::arg("pred"), py::arg("gt"), py::arg("joints") = std::nullopt);
}
