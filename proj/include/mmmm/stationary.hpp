#pragma once

#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <cmath>

namespace mmmm {

/// Stationary occupancy distribution, P_n proportional to rho0^n / n!.
/// Terms are accumulated in log space so large m or rho0 cannot overflow.
template <typename Scalar>
DenseVector<Scalar> stationary(const SystemParams<Scalar>& params) {
    const int size = params.m + 1;
    const Scalar log_rho0 = std::log(params.rho0());
    DenseVector<Scalar> log_term(size);
    for (int n = 0; n < size; ++n)
        log_term(n) = Scalar(n) * log_rho0 - std::lgamma(Scalar(n) + 1);
    const Scalar peak = log_term.maxCoeff();
    DenseVector<Scalar> p = (log_term.array() - peak).exp();
    p /= p.sum();
    return p;
}

/// Erlang B blocking probability via the standard stable recurrence
/// B(k) = rho0 B(k-1) / (k + rho0 B(k-1)), B(0) = 1.
template <typename Scalar>
Scalar erlang_b(const SystemParams<Scalar>& params) {
    const Scalar rho0 = params.rho0();
    Scalar b = 1;
    for (int k = 1; k <= params.m; ++k) b = rho0 * b / (Scalar(k) + rho0 * b);
    return b;
}

}  // namespace mmmm
