#include "kinefit/solver.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>

#include "kinefit/bvls.hpp"

namespace kinefit {

namespace {

VecX clamped(VecX x, const VecX& lo, const VecX& hi) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

// Forward differences, switching to backward at the upper bound so probes
// stay inside the box.
void fd_gradient(const Objective& f, const VecX& x, double fx, const VecX& hi, double h,
                 VecX& g, int& evals) {
    VecX xp = x;
    for (int i = 0; i < x.size(); ++i) {
        if (x[i] + h <= hi[i]) {
            xp[i] = x[i] + h;
            g[i] = (f(xp) - fx) / h;
        } else {
            xp[i] = x[i] - h;
            g[i] = (fx - f(xp)) / h;
        }
        xp[i] = x[i];
        ++evals;
    }
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

MinimizeResult minimize(const Objective& f, VecX x0, const VecX& lo, const VecX& hi,
                        const OptimizerSettings& settings) {
    const int n = static_cast<int>(x0.size());
    MinimizeResult res;
    VecX x = clamped(std::move(x0), lo, hi);
    double fx = f(x);
    res.evaluations = 1;
    if (!std::isfinite(fx)) {
        throw NonFiniteObjective("objective is not finite at the start point");
    }

    VecX g(n);
    fd_gradient(f, x, fx, hi, settings.fd_step, g, res.evaluations);
    MatX B = MatX::Identity(n, n);

    for (int it = 1; it <= settings.max_iterations; ++it) {
        // Quadratic subproblem min 1/2 d'Bd + g'd over the shifted box,
        // solved as bounded least squares on the Cholesky factor.
        Eigen::LLT<MatX> llt(B);
        if (llt.info() != Eigen::Success) {
            B = MatX::Identity(n, n);
            llt.compute(B);
        }
        const MatX U = llt.matrixU();
        const VecX rhs = -llt.matrixL().solve(g);
        VecX d = bvls(U, rhs, lo - x, hi - x);

        double gd = g.dot(d);
        if (d.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            res.converged = true;
            break;
        }
        if (gd >= 0.0) {
            // Not a descent direction (numerical); fall back to the projected
            // gradient step.
            d = clamped(x - g, lo, hi) - x;
            gd = g.dot(d);
            if (gd >= 0.0) {
                res.converged = true;
                break;
            }
        }

        double alpha = 1.0;
        double ft = fx;
        VecX xt;
        bool accepted = false;
        while (alpha >= 1e-13) {
            xt = clamped(x + alpha * d, lo, hi);
            ft = f(xt);
            ++res.evaluations;
            if (std::isfinite(ft) && ft <= fx + 1e-4 * alpha * gd) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        res.iterations = it;
        if (!accepted) {
            // No progress along a descent direction: we are at the noise
            // floor of the finite-difference model.
            res.converged = true;
            break;
        }

        const VecX s = xt - x;
        const double decrease = fx - ft;
        x = std::move(xt);
        fx = ft;

        VecX gn(n);
        fd_gradient(f, x, fx, hi, settings.fd_step, gn, res.evaluations);
        const VecX y = gn - g;
        g = gn;

        // Powell-damped BFGS update keeps the model positive definite.
        const VecX Bs = B * s;
        const double sBs = s.dot(Bs);
        const double sy = s.dot(y);
        if (sBs > 0.0) {
            VecX r;
            if (sy >= 0.2 * sBs) {
                r = y;
            } else {
                const double theta = 0.8 * sBs / (sBs - sy);
                r = theta * y + (1.0 - theta) * Bs;
            }
            const double sr = s.dot(r);
            if (sr > 1e-300) {
                B.noalias() += (r * r.transpose()) / sr - (Bs * Bs.transpose()) / sBs;
            }
        }

        if (decrease <= settings.tolerance * (1.0 + std::abs(fx))) {
            res.converged = true;
            break;
        }
    }

    res.x = clamped(std::move(x), lo, hi);
    res.loss = fx;
    return res;
}

IKResult ik_frame(const BodyModel& body, const PoseFrame& frame, const VecX& theta0,
                  const OptimizerSettings& settings) {
    validate_frame(frame, body);
    const auto t0 = std::chrono::steady_clock::now();
    const auto [lo, hi] = body.bounds();
    LossWorkspace ws;
    const Objective obj = [&](const VecX& th) { return frame_loss_ws(th, frame, body, ws); };

    IKResult res;
    const double initial = obj(clamped(theta0, lo, hi));
    MinimizeResult m = minimize(obj, theta0, lo, hi, settings);
    res.thetas.push_back(m.x);
    res.frame_losses.push_back(m.loss);
    res.units.push_back({0, 1, initial, m.loss, m.iterations, m.converged});
    res.total_iterations = m.iterations;
    res.all_converged = m.converged;
    res.seconds = elapsed_seconds(t0);
    return res;
}

IKResult ik_sequence_frame_by_frame(const BodyModel& body, const PoseSequence& seq,
                                    bool warm_start, const OptimizerSettings& settings) {
    if (seq.frames.empty()) throw SequenceTooShort("pose sequence is empty");
    const auto t0 = std::chrono::steady_clock::now();
    const auto [lo, hi] = body.bounds();
    LossWorkspace ws;

    IKResult res;
    VecX start = body.rest_params();
    for (int m = 0; m < seq.frame_count(); ++m) {
        const PoseFrame& frame = seq.frames[static_cast<size_t>(m)];
        validate_frame(frame, body, m);
        const Objective obj = [&](const VecX& th) { return frame_loss_ws(th, frame, body, ws); };
        const double initial = obj(clamped(start, lo, hi));
        MinimizeResult r = minimize(obj, start, lo, hi, settings);
        res.units.push_back({m, m + 1, initial, r.loss, r.iterations, r.converged});
        res.total_iterations += r.iterations;
        res.all_converged = res.all_converged && r.converged;
        res.frame_losses.push_back(r.loss);
        if (warm_start) start = r.x;
        res.thetas.push_back(std::move(r.x));
        if (!warm_start) start = body.rest_params();
    }
    res.seconds = elapsed_seconds(t0);
    return res;
}

IKResult ik_sequence_temporal(const BodyModel& body, const PoseSequence& seq, int patch_len,
                              double lambda, const OptimizerSettings& settings, JointNorm norm) {
    const int frame_count = seq.frame_count();
    if (patch_len < 2) throw SequenceTooShort("patch length must be at least 2");
    if (frame_count < patch_len) {
        throw SequenceTooShort("sequence of " + std::to_string(frame_count) +
                               " frames is shorter than the patch length");
    }
    if (lambda < 0.0) throw Error("temporal weight must be nonnegative");

    const auto t0 = std::chrono::steady_clock::now();
    IKResult res = ik_sequence_frame_by_frame(body, seq, /*warm_start=*/true, settings);

    const auto [lo1, hi1] = body.bounds();
    const int dim = body.param_count();
    LossWorkspace ws;

    // Patch boundaries: trailing remainder of one frame joins the last patch,
    // a remainder of >= 2 frames forms its own.
    std::vector<std::pair<int, int>> patches;
    int begin = 0;
    while (begin < frame_count) {
        int end = std::min(begin + patch_len, frame_count);
        if (frame_count - end == 1) end = frame_count;
        patches.emplace_back(begin, end);
        begin = end;
    }

    const VecX* stitch = nullptr;
    VecX stitch_value;
    for (const auto& [pb, pe] : patches) {
        const int m_count = pe - pb;
        const int n = m_count * dim;
        VecX x0(n), lo(n), hi(n);
        for (int m = 0; m < m_count; ++m) {
            x0.segment(m * dim, dim) = res.thetas[static_cast<size_t>(pb + m)];
            lo.segment(m * dim, dim) = lo1;
            hi.segment(m * dim, dim) = hi1;
        }

        std::vector<VecX> thetas(static_cast<size_t>(m_count), VecX(dim));
        const std::span<const PoseFrame> frames{seq.frames.data() + pb,
                                                static_cast<size_t>(m_count)};
        const Objective obj = [&](const VecX& x) {
            for (int m = 0; m < m_count; ++m) {
                thetas[static_cast<size_t>(m)] = x.segment(m * dim, dim);
            }
            return temporal_loss_ws(thetas, frames, body, lambda, stitch, norm, ws);
        };

        const double initial = obj(x0);
        MinimizeResult r = minimize(obj, std::move(x0), lo, hi, settings);
        for (int m = 0; m < m_count; ++m) {
            res.thetas[static_cast<size_t>(pb + m)] = r.x.segment(m * dim, dim);
            res.frame_losses[static_cast<size_t>(pb + m)] =
                frame_loss_ws(res.thetas[static_cast<size_t>(pb + m)],
                              seq.frames[static_cast<size_t>(pb + m)], body, ws);
        }
        res.units.push_back({pb, pe, initial, r.loss, r.iterations, r.converged});
        res.total_iterations += r.iterations;
        res.all_converged = res.all_converged && r.converged;

        stitch_value = res.thetas[static_cast<size_t>(pe - 1)];
        stitch = &stitch_value;
    }
    res.seconds = elapsed_seconds(t0);
    return res;
}

}  // namespace kinefit
