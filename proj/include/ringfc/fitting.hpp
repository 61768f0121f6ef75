#ifndef RINGFC_FITTING_HPP
#define RINGFC_FITTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "ringfc/errors.hpp"

namespace ringfc {

// Small dense Levenberg-Marquardt for the handful-of-parameters fits used
// here. Residual callback fills r(p); Jacobian is forward-difference.
struct FitOptions {
    int max_iterations = 200;
    double tolerance = 1e-10;     // relative chi2 improvement
    int restarts = 8;             // bounded multi-start on top of the seed guess
    std::uint64_t seed = 1;       // generator for restart jitter
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> sigma;    // 1-sigma from the covariance estimate
    double chi2 = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// Solve (n x n) A x = b by Gaussian elimination with partial pivoting.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double s = b[row];
        for (std::size_t k = row + 1; k < n; ++k) s -= a[row][k] * x[k];
        x[row] = s / a[row][row];
    }
    return true;
}

inline double chi2_of(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

} // namespace detail

// One LM descent from a given start. bounds are inclusive [lo, hi] per
// parameter; steps are clamped.
inline FitResult lm_fit_single(const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
                               std::vector<double> p,
                               const std::vector<std::pair<double, double>>& bounds,
                               std::size_t n_residuals, const FitOptions& opt) {
    const std::size_t np = p.size();
    std::vector<double> r(n_residuals), r_try(n_residuals);
    std::vector<std::vector<double>> jac(n_residuals, std::vector<double>(np));

    auto clamp_params = [&](std::vector<double>& q) {
        for (std::size_t j = 0; j < np; ++j)
            q[j] = std::clamp(q[j], bounds[j].first, bounds[j].second);
    };
    clamp_params(p);
    residual(p, r);
    double chi2 = detail::chi2_of(r);

    double lambda = 1e-3;
    FitResult out;
    int it = 0;
    int small_steps = 0;
    for (; it < opt.max_iterations; ++it) {
        // Forward-difference Jacobian.
        for (std::size_t j = 0; j < np; ++j) {
            const double h = std::max(1e-8 * std::abs(p[j]), 1e-12);
            std::vector<double> q = p;
            q[j] = std::min(q[j] + h, bounds[j].second);
            const double dh = q[j] - p[j];
            if (dh == 0.0) {
                for (std::size_t i = 0; i < n_residuals; ++i) jac[i][j] = 0.0;
                continue;
            }
            residual(q, r_try);
            for (std::size_t i = 0; i < n_residuals; ++i) jac[i][j] = (r_try[i] - r[i]) / dh;
        }
        // Normal equations with damping.
        std::vector<std::vector<double>> jtj(np, std::vector<double>(np, 0.0));
        std::vector<double> jtr(np, 0.0);
        for (std::size_t i = 0; i < n_residuals; ++i)
            for (std::size_t j = 0; j < np; ++j) {
                jtr[j] += jac[i][j] * r[i];
                for (std::size_t k = j; k < np; ++k) jtj[j][k] += jac[i][j] * jac[i][k];
            }
        for (std::size_t j = 0; j < np; ++j)
            for (std::size_t k = 0; k < j; ++k) jtj[j][k] = jtj[k][j];

        bool improved = false;
        for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
            std::vector<std::vector<double>> a = jtj;
            for (std::size_t j = 0; j < np; ++j) a[j][j] += lambda * std::max(jtj[j][j], 1e-30);
            std::vector<double> delta;
            std::vector<double> rhs(np);
            for (std::size_t j = 0; j < np; ++j) rhs[j] = -jtr[j];
            if (detail::solve_dense(a, rhs, delta)) {
                std::vector<double> q = p;
                for (std::size_t j = 0; j < np; ++j) q[j] += delta[j];
                clamp_params(q);
                residual(q, r_try);
                const double chi2_try = detail::chi2_of(r_try);
                if (chi2_try < chi2) {
                    const double rel = (chi2 - chi2_try) / std::max(chi2, 1e-300);
                    p = q;
                    r = r_try;
                    chi2 = chi2_try;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    improved = true;
                    small_steps = rel < opt.tolerance ? small_steps + 1 : 0;
                    if (small_steps >= 2) {
                        out.converged = true;
                        it = opt.max_iterations; // done
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!improved) {
            out.converged = true; // stuck at a (local) minimum
            break;
        }
    }

    // Covariance estimate: (J^T J)^-1 * chi2 / (m - n).
    out.params = p;
    out.chi2 = chi2;
    out.iterations = it;
    out.sigma.assign(np, 0.0);
    residual(p, r);
    for (std::size_t j = 0; j < np; ++j) {
        const double h = std::max(1e-8 * std::abs(p[j]), 1e-12);
        std::vector<double> q = p;
        q[j] += h;
        residual(q, r_try);
        for (std::size_t i = 0; i < n_residuals; ++i) jac[i][j] = (r_try[i] - r[i]) / h;
    }
    std::vector<std::vector<double>> jtj(np, std::vector<double>(np, 0.0));
    for (std::size_t i = 0; i < n_residuals; ++i)
        for (std::size_t j = 0; j < np; ++j)
            for (std::size_t k = 0; k < np; ++k) jtj[j][k] += jac[i][j] * jac[i][k];
    const double dof = static_cast<double>(n_residuals > np ? n_residuals - np : 1);
    const double s2 = chi2 / dof;
    // Invert via column solves.
    for (std::size_t j = 0; j < np; ++j) {
        std::vector<double> e(np, 0.0), col;
        e[j] = 1.0;
        if (detail::solve_dense(jtj, e, col) && col[j] > 0.0)
            out.sigma[j] = std::sqrt(col[j] * s2);
    }
    return out;
}

// Multi-start wrapper: the seed guess plus `restarts` jittered starts; the
// best chi2 wins. Deterministic for a fixed options.seed.
inline FitResult lm_fit(const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
                        const std::vector<double>& p0,
                        const std::vector<std::pair<double, double>>& bounds,
                        std::size_t n_residuals, const FitOptions& opt = {}) {
    if (p0.size() != bounds.size()) throw ArgumentError("lm_fit: bounds must match parameter count");
    FitResult best = lm_fit_single(residual, p0, bounds, n_residuals, opt);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    for (int k = 0; k < opt.restarts; ++k) {
        std::vector<double> p = p0;
        for (double& v : p) v *= std::exp(jitter(rng));
        FitResult r = lm_fit_single(residual, p, bounds, n_residuals, opt);
        if (r.chi2 < best.chi2) best = r;
    }
    return best;
}

} // namespace ringfc

#endif // RINGFC_FITTING_HPP
