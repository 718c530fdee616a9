#pragma once

#include "mmmm/generator.hpp"
#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mmmm {

struct OracleConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 10'000'000;
};

class OracleError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dp54 {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between the 5th- and 4th-order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <typename Scalar>
std::string oracle_failure_message(const SystemParams<Scalar>& params, Scalar t) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "oracle step limit exceeded (lambda0=%g, alpha=%g, m=%d, t=%g)",
                  double(params.lambda0), double(params.alpha), params.m, double(t));
    return buf;
}

template <typename Scalar>
void advance_window(const DenseMatrix<Scalar>& a, DenseVector<Scalar>& y, Scalar span,
                    const OracleConfig& config, long& steps,
                    const SystemParams<Scalar>& params, Scalar horizon) {
    using D = Dp54;
    if (!(span > 0)) return;
    const Scalar a_norm = matrix_norm(a);
    Scalar t = 0;
    Scalar h = std::min(span, Scalar(0.5) / (a_norm + Scalar(1)));
    DenseVector<Scalar> k1 = a * y;
    DenseVector<Scalar> k2, k3, k4, k5, k6, k7, y5, err_vec;
    while (t < span) {
        if (steps >= config.max_steps) throw OracleError(oracle_failure_message(params, horizon));
        ++steps;
        h = std::min(h, span - t);
        k2 = a * (y + h * (Scalar(D::a21) * k1));
        k3 = a * (y + h * (Scalar(D::a31) * k1 + Scalar(D::a32) * k2));
        k4 = a * (y + h * (Scalar(D::a41) * k1 + Scalar(D::a42) * k2 + Scalar(D::a43) * k3));
        k5 = a * (y + h * (Scalar(D::a51) * k1 + Scalar(D::a52) * k2 + Scalar(D::a53) * k3 +
                           Scalar(D::a54) * k4));
        k6 = a * (y + h * (Scalar(D::a61) * k1 + Scalar(D::a62) * k2 + Scalar(D::a63) * k3 +
                           Scalar(D::a64) * k4 + Scalar(D::a65) * k5));
        y5 = y + h * (Scalar(D::b1) * k1 + Scalar(D::b3) * k3 + Scalar(D::b4) * k4 +
                      Scalar(D::b5) * k5 + Scalar(D::b6) * k6);
        k7 = a * y5;
        err_vec = h * (Scalar(D::e1) * k1 + Scalar(D::e3) * k3 + Scalar(D::e4) * k4 +
                       Scalar(D::e5) * k5 + Scalar(D::e6) * k6 + Scalar(D::e7) * k7);
        Scalar err_sq = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const Scalar scale = Scalar(config.abs_tol) +
                                 Scalar(config.rel_tol) * std::max(std::abs(y(i)), std::abs(y5(i)));
            const Scalar r = err_vec(i) / scale;
            err_sq += r * r;
        }
        const Scalar err = std::sqrt(err_sq / Scalar(y.size()));
        if (std::isfinite(err) && err <= 1) {
            t += h;
            y.swap(y5);
            k1.swap(k7);
            if (span - t <= Scalar(1e-14) * span) break;
        }
        Scalar factor;
        if (!std::isfinite(err))
            factor = Scalar(0.2);
        else if (err <= 0)
            factor = Scalar(5);
        else
            factor = std::clamp(Scalar(0.9) * std::pow(err, Scalar(-0.2)), Scalar(0.2), Scalar(5));
        h *= factor;
        if (!(h > 0)) throw OracleError(oracle_failure_message(params, horizon));
    }
}

}  // namespace detail

/// Integrate dP/dt = A P from an arbitrary start vector with an adaptive
/// Dormand-Prince 5(4) scheme. Long horizons are split into windows of
/// length alpha, renormalizing the sum at each boundary; the largest
/// deviation absorbed that way is reported through drift_out.
template <typename Scalar>
DenseVector<Scalar> oracle_solve(const SystemParams<Scalar>& params, DenseVector<Scalar> y,
                                 Scalar t, const OracleConfig& config = {},
                                 Scalar* drift_out = nullptr) {
    if (y.size() != params.m + 1) throw std::invalid_argument("start vector has wrong size");
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    Scalar worst_drift = 0;
    if (t > 0) {
        const DenseMatrix<Scalar> a = build_generator(params).matrix;
        long steps = 0;
        const Scalar window = params.alpha;
        const long n_windows = static_cast<long>(std::ceil(double(t / window)));
        for (long k = 0; k < n_windows; ++k) {
            const Scalar lo = Scalar(k) * window;
            const Scalar hi = std::min(t, Scalar(k + 1) * window);
            detail::advance_window(a, y, hi - lo, config, steps, params, t);
            const Scalar drift = std::abs(y.sum() - Scalar(1));
            worst_drift = std::max(worst_drift, drift);
            if (drift > Scalar(1e-13)) y /= y.sum();
        }
    }
    if (drift_out) *drift_out = worst_drift;
    return y;
}

/// Transient distribution from the deterministic start N(0) = n0.
template <typename Scalar>
TransientDistribution<Scalar> integrate(const SystemParams<Scalar>& params, int n0, Scalar t,
                                        const OracleConfig& config = {}) {
    if (n0 < 0 || n0 > params.m) throw std::invalid_argument("n0 outside 0..m");
    DenseVector<Scalar> y = DenseVector<Scalar>::Zero(params.m + 1);
    y(n0) = 1;
    Scalar drift = 0;
    y = oracle_solve(params, std::move(y), t, config, &drift);
    TransientDistribution<Scalar> out;
    out.t = t;
    out.n0 = n0;
    out.probabilities = std::move(y);
    out.method = Method::Oracle;
    if (drift > Scalar(1e-13)) out.sum_drift = drift;
    return out;
}

/// Full transition matrix: one integration per initial state.
template <typename Scalar>
TransitionMatrix<Scalar> integrate_matrix(const SystemParams<Scalar>& params, Scalar t,
                                          const OracleConfig& config = {}) {
    const int size = params.m + 1;
    TransitionMatrix<Scalar> out;
    out.t = t;
    out.matrix.resize(size, size);
    for (int n0 = 0; n0 < size; ++n0)
        out.matrix.row(n0) = integrate(params, n0, t, config).probabilities.transpose();
    return out;
}

}  // namespace mmmm
