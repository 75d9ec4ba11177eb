#include "kinefit/bvls.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace kinefit {

namespace {

enum State : int8_t { kLower = -1, kFree = 0, kUpper = 1 };

}  // namespace

Eigen::VectorXd bvls(const MatX& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const int n = static_cast<int>(A.cols());
    Eigen::VectorXd x(n);
    std::vector<State> state(static_cast<size_t>(n));
    std::vector<char> blocked(static_cast<size_t>(n), 0);  // anti-cycling marker

    // Start with every variable at its bound nearest to zero.
    for (int i = 0; i < n; ++i) {
        if (std::abs(lo[i]) <= std::abs(hi[i])) {
            x[i] = lo[i];
            state[static_cast<size_t>(i)] = kLower;
        } else {
            x[i] = hi[i];
            state[static_cast<size_t>(i)] = kUpper;
        }
    }

    const double w_tol = 1e-11 * (1.0 + b.cwiseAbs().maxCoeff());
    const int max_outer = 10 * n + 20;
    std::vector<int> free_idx;
    free_idx.reserve(static_cast<size_t>(n));

    for (int outer = 0; outer < max_outer; ++outer) {
        // Gradient of 1/2||Ax-b||^2 is -w.
        const Eigen::VectorXd w = A.transpose() * (b - A * x);

        int candidate = -1;
        double worst = w_tol;
        for (int i = 0; i < n; ++i) {
            if (state[static_cast<size_t>(i)] == kFree || blocked[static_cast<size_t>(i)]) continue;
            const double v = state[static_cast<size_t>(i)] == kLower ? w[i] : -w[i];
            if (v > worst) {
                worst = v;
                candidate = i;
            }
        }
        if (candidate < 0) break;  // KKT satisfied
        state[static_cast<size_t>(candidate)] = kFree;

        // Re-solve the free subproblem, binding blockers until feasible.
        for (int inner = 0; inner <= n; ++inner) {
            free_idx.clear();
            for (int i = 0; i < n; ++i) {
                if (state[static_cast<size_t>(i)] == kFree) free_idx.push_back(i);
            }
            if (free_idx.empty()) break;

            const int nf = static_cast<int>(free_idx.size());
            Eigen::VectorXd resid = b;
            for (int i = 0; i < n; ++i) {
                if (state[static_cast<size_t>(i)] != kFree) resid -= A.col(i) * x[i];
            }
            MatX Af(A.rows(), nf);
            for (int k = 0; k < nf; ++k) Af.col(k) = A.col(free_idx[static_cast<size_t>(k)]);
            const Eigen::VectorXd z =
                (Af.transpose() * Af).ldlt().solve(Af.transpose() * resid);

            // Largest feasible step from x_F toward z.
            double t = 1.0;
            int blocker = -1;
            State blocker_side = kLower;
            for (int k = 0; k < nf; ++k) {
                const int i = free_idx[static_cast<size_t>(k)];
                const double step = z[k] - x[i];
                if (step > 0 && z[k] > hi[i]) {
                    const double tk = (hi[i] - x[i]) / step;
                    if (tk < t) {
                        t = tk;
                        blocker = i;
                        blocker_side = kUpper;
                    }
                } else if (step < 0 && z[k] < lo[i]) {
                    const double tk = (lo[i] - x[i]) / step;
                    if (tk < t) {
                        t = tk;
                        blocker = i;
                        blocker_side = kLower;
                    }
                }
            }

            if (blocker < 0) {
                for (int k = 0; k < nf; ++k) x[free_idx[static_cast<size_t>(k)]] = z[k];
                break;
            }
            for (int k = 0; k < nf; ++k) {
                const int i = free_idx[static_cast<size_t>(k)];
                x[i] += t * (z[k] - x[i]);
            }
            x[blocker] = blocker_side == kUpper ? hi[blocker] : lo[blocker];
            state[static_cast<size_t>(blocker)] = blocker_side;
            if (t <= 0.0 && blocker == candidate) {
                // Degenerate: the variable we just freed is immediately bound
                // again; skip it on the next pick to avoid cycling.
                blocked[static_cast<size_t>(candidate)] = 1;
                break;
            }
        }
        if (candidate >= 0 && !blocked[static_cast<size_t>(candidate)]) {
            std::fill(blocked.begin(), blocked.end(), 0);
        }
    }

    for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

}  // namespace kinefit
