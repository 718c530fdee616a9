#pragma once

#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <stdexcept>
#include <utility>

namespace mmmm {

/// Tridiagonal generator of the occupancy process, acting on column
/// probability vectors: dP/dt = A P. The scaled form B = alpha * A has
/// entries built from rho0 and integers only.
template <typename Scalar = double>
struct GeneratorMatrix {
    DenseMatrix<Scalar> matrix;  // (m+1) x (m+1), columns sum to zero
    bool scaled = false;
};

template <typename Scalar>
GeneratorMatrix<Scalar> build_generator(const SystemParams<Scalar>& params,
                                        bool scaled = false) {
    const int size = params.m + 1;
    DenseMatrix<Scalar> a = DenseMatrix<Scalar>::Zero(size, size);
    const Scalar up = scaled ? params.rho0() : params.lambda0;
    for (int n = 0; n < size; ++n) {
        const Scalar down = scaled ? Scalar(n) : Scalar(n) / params.alpha;
        if (n < params.m) {
            a(n + 1, n) = up;
            a(n, n) = -(up + down);
        } else {
            a(n, n) = -down;
        }
        if (n >= 1) a(n - 1, n) = down;
    }
    return {std::move(a), scaled};
}

/// Greatest absolute column sum. Satisfies N(cM) = |c| N(M),
/// N(M1 + M2) <= N(M1) + N(M2) and N(M1 M2) <= N(M1) N(M2).
template <typename Derived>
typename Derived::Scalar matrix_norm(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_norm needs a square matrix");
    if (m.rows() == 0) return typename Derived::Scalar(0);
    return m.derived().cwiseAbs().colwise().sum().maxCoeff();
}

/// Closed-form bound N(A) <= 2 (lambda0 + m/alpha). Strict for valid params:
/// the largest column gives 2 lambda0 + 2(m-1)/alpha or 2m/alpha.
template <typename Scalar>
Scalar norm_upper_bound(const SystemParams<Scalar>& params) {
    return Scalar(2) * (params.lambda0 + Scalar(params.m) / params.alpha);
}

}  // namespace mmmm
