#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dense_matrix.hpp"
#include "errors.hpp"

namespace fermispec {

struct JacobiOptions {
    /// Converged once the off-diagonal Frobenius norm drops below tolerance * ‖S‖_F.
    double tolerance = 1e-14;
    int max_sweeps = 30;
};

struct JacobiResult {
    std::vector<double> eigenvalues;  // ascending
    int sweeps = 0;
};

/**
 * Eigenvalues of a real symmetric matrix by the cyclic Jacobi method.
 *
 * Rotations sweep the strict upper triangle row by row. During the first
 * three sweeps small pivots are skipped (threshold 0.2·Σ|a_pq|/n²); later a
 * pivot that no longer changes either diagonal entry in floating point is set
 * to zero without rotating. Only the upper triangle of the input is read.
 *
 * Throws ConvergenceError when `max_sweeps` sweeps do not reach the tolerance.
 */
inline JacobiResult symmetric_eigenvalues(const DenseMatrix& input, const JacobiOptions& opts = {}) {
    const std::size_t n = input.size();
    // Working copy with a padded row stride; power-of-two strides alias badly
    // in cache during the column updates.
    const std::size_t ld = n + (n % 64 == 0 ? 8 : 0);
    std::vector<double> buf(n * ld, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return buf[i * ld + j]; };
    double scale_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = input(i, j);
            at(i, j) = v;
            at(j, i) = v;
            scale_sq += (i == j ? 1.0 : 2.0) * v * v;
        }
    }

    auto off_norm_sq = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += at(i, j) * at(i, j);
        return 2.0 * s;
    };

    JacobiResult result;
    const double target_sq = opts.tolerance * opts.tolerance * scale_sq;

    for (int sweep = 1;; ++sweep) {
        const double off_sq = off_norm_sq();
        if (off_sq <= target_sq || off_sq == 0.0) {
            result.sweeps = sweep - 1;
            break;
        }
        if (sweep > opts.max_sweeps) {
            throw ConvergenceError("Jacobi eigensolver: no convergence after " + std::to_string(opts.max_sweeps) +
                                   " sweeps (relative off-diagonal norm " +
                                   std::to_string(std::sqrt(off_sq / scale_sq)) + ")");
        }

        double threshold = 0.0;
        if (sweep < 4) {
            double sum_abs = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) sum_abs += std::abs(at(i, j));
            threshold = 0.2 * sum_abs / static_cast<double>(n * n);
        }

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                const double g = 100.0 * std::abs(apq);
                const double app = at(p, p);
                const double aqq = at(q, q);
                if (sweep > 4 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
                    at(p, q) = 0.0;
                    at(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= threshold || apq == 0.0) continue;

                const double h = aqq - app;
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;

                double* rp = &buf[p * ld];
                double* rq = &buf[q * ld];
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = rp[k];
                    const double akq = rq[k];
                    rp[k] = akp - s * (akq + tau * akp);
                    rq[k] = akq + s * (akp - tau * akq);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    at(k, p) = rp[k];
                    at(k, q) = rq[k];
                }
            }
        }
    }

    result.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.eigenvalues[i] = at(i, i);
    std::sort(result.eigenvalues.begin(), result.eigenvalues.end());
    return result;
}

}  // namespace fermispec
