#pragma once

#include <Eigen/Dense>

#include <optional>

namespace mmmm {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Computation route that produced a transient result.
enum class Method { Exact, Series, Oracle, Asymptotic, InfiniteServer };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Series: return "series";
        case Method::Oracle: return "oracle";
        case Method::Asymptotic: return "asymptotic";
        case Method::InfiniteServer: return "infinite-server";
    }
    return "?";
}

/// Occupancy distribution at a single time point, with provenance.
template <typename Scalar = double>
struct TransientDistribution {
    Scalar t{};
    int n0{};
    DenseVector<Scalar> probabilities;
    Method method{Method::Exact};
    std::optional<Scalar> error_bound;  // a-priori series bound, when applicable
    std::optional<Scalar> sum_drift;    // |sum - 1| absorbed by renormalization
};

/// P_ij(t) = P[N(t) = j | N(0) = i]. Row i is the initial state, so every row
/// sums to 1.
template <typename Scalar = double>
struct TransitionMatrix {
    Scalar t{};
    DenseMatrix<Scalar> matrix;

    DenseVector<Scalar> row(int n0) const { return matrix.row(n0).transpose(); }
};

using TransientDistributiond = TransientDistribution<double>;
using TransitionMatrixd = TransitionMatrix<double>;

}  // namespace mmmm
