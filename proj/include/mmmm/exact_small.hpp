#pragma once

#include "mmmm/generator.hpp"
#include "mmmm/ode_oracle.hpp"
#include "mmmm/stationary.hpp"
#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace mmmm {

/// Spectral form of the 3-state generator: exp(tA) = sum_k exp(t eig_k) mode_k
/// with mode_k = right_k left_k^T, left_k scaled so left_k . right_k = 1.
/// Mode 0 carries the stationary solution (all columns equal it).
template <typename Scalar = double>
struct SpectralDecomposition {
    Eigen::Matrix<Scalar, 3, 1> eigenvalues;  // {0, x_fast, x_slow}, nonzero ones negative
    Eigen::Matrix<Scalar, 3, 3> right_modes;  // columns: right eigenvectors
    Eigen::Matrix<Scalar, 3, 3> left_modes;   // rows: matching left eigenvectors

    Eigen::Matrix<Scalar, 3, 3> mode(int k) const {
        return right_modes.col(k) * left_modes.row(k);
    }
};

namespace detail {

// Null direction of a rank-2 3x3 matrix: the largest cross product of two rows.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> null_direction(const Eigen::Matrix<Scalar, 3, 3>& m) {
    using V3 = Eigen::Matrix<Scalar, 3, 1>;
    const V3 r0 = m.row(0).transpose(), r1 = m.row(1).transpose(), r2 = m.row(2).transpose();
    V3 best = r0.cross(r1);
    for (const V3& c : {r0.cross(r2), r1.cross(r2)})
        if (c.squaredNorm() > best.squaredNorm()) best = c;
    if (!(best.squaredNorm() > 0)) throw std::runtime_error("degenerate 3x3 nullspace");
    return best / best.norm();
}

}  // namespace detail

/// Closed-form eigendecomposition of the m=2 generator. The nonzero
/// eigenvalues solve x^2 + (2 lambda0 + 3/alpha) x
/// + (lambda0^2 + 2 lambda0/alpha + 2/alpha^2) = 0.
template <typename Scalar>
SpectralDecomposition<Scalar> spectral_decompose_m2(const SystemParams<Scalar>& params) {
    if (params.m != 2) throw std::invalid_argument("spectral_decompose_m2 requires m = 2");
    using M3 = Eigen::Matrix<Scalar, 3, 3>;
    using V3 = Eigen::Matrix<Scalar, 3, 1>;

    const Scalar inv_a = Scalar(1) / params.alpha;
    const Scalar b = 2 * params.lambda0 + 3 * inv_a;
    const Scalar c = params.lambda0 * params.lambda0 + 2 * params.lambda0 * inv_a +
                     2 * inv_a * inv_a;
    const Scalar disc = inv_a * inv_a + 4 * params.lambda0 * inv_a;  // b^2 - 4c, positive
    const Scalar root = std::sqrt(disc);
    const Scalar x_slow = -(b + root) / 2;  // most negative
    const Scalar x_fast = c / x_slow;       // product of roots is c
    if (std::abs(x_fast - x_slow) < Scalar(1e-12) * std::max(Scalar(1), std::abs(x_slow)))
        throw std::runtime_error("eigenvalue coincidence in m=2 spectral decomposition");

    const M3 a = build_generator(params).matrix;
    SpectralDecomposition<Scalar> dec;
    dec.eigenvalues << Scalar(0), x_fast, x_slow;

    // zero mode: right = stationary, left = ones (columns of A sum to zero)
    const DenseVector<Scalar> pi = stationary(params);
    dec.right_modes.col(0) = pi;
    dec.left_modes.row(0).setOnes();

    for (int k = 1; k < 3; ++k) {
        const M3 shifted = a - dec.eigenvalues(k) * M3::Identity();
        const V3 right = detail::null_direction<Scalar>(shifted);
        const V3 left = detail::null_direction<Scalar>(shifted.transpose());
        const Scalar dot = left.dot(right);
        if (!(std::abs(dot) > 0))
            throw std::runtime_error("defective m=2 spectral decomposition");
        dec.right_modes.col(k) = right;
        dec.left_modes.row(k) = left.transpose() / dot;
    }
    return dec;
}

/// Closed-form transition matrix for m = 1; decay rate lambda0 + 1/alpha.
template <typename Scalar>
TransitionMatrix<Scalar> exact_m1(const SystemParams<Scalar>& params, Scalar t) {
    if (params.m != 1) throw std::invalid_argument("exact_m1 requires m = 1");
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    const Scalar rho0 = params.rho0();
    const Scalar c = rho0 / (1 + rho0);
    const Scalar decay = std::exp(-(params.lambda0 + Scalar(1) / params.alpha) * t);
    TransitionMatrix<Scalar> out;
    out.t = t;
    out.matrix.resize(2, 2);
    out.matrix(0, 0) = c * decay + (1 - c);
    out.matrix(0, 1) = -c * decay + c;
    out.matrix(1, 0) = -(1 - c) * decay + (1 - c);
    out.matrix(1, 1) = (1 - c) * decay + c;
    return out;
}

/// Transition matrix for m = 2 from the spectral decomposition. Falls back to
/// the ODE oracle if the decomposition degenerates; returns the stationary
/// matrix once every transient mode has underflowed.
template <typename Scalar>
TransitionMatrix<Scalar> exact_m2(const SystemParams<Scalar>& params, Scalar t) {
    if (params.m != 2) throw std::invalid_argument("exact_m2 requires m = 2");
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    SpectralDecomposition<Scalar> dec;
    try {
        dec = spectral_decompose_m2(params);
    } catch (const std::runtime_error&) {
        return integrate_matrix(params, t);
    }
    const Scalar w_fast = std::exp(dec.eigenvalues(1) * t);
    const Scalar w_slow = std::exp(dec.eigenvalues(2) * t);
    TransitionMatrix<Scalar> out;
    out.t = t;
    if (t > 0 && w_fast < Scalar(1e-300) && w_slow < Scalar(1e-300)) {
        out.matrix = dec.mode(0).transpose();
        return out;
    }
    const Eigen::Matrix<Scalar, 3, 3> col_form =
        dec.mode(0) + w_fast * dec.mode(1) + w_slow * dec.mode(2);
    out.matrix = col_form.transpose();
    return out;
}

}  // namespace mmmm
