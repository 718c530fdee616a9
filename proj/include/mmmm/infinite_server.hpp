#pragma once

#include "mmmm/asymptotics.hpp"
#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <cmath>
#include <stdexcept>

namespace mmmm {

/// M|M|infinity transient pmf from the empty start: Poisson with mean
/// rho0 (1 - e^{-t/alpha}). The server count in params is ignored.
template <typename Scalar>
Scalar p0n_inf(const SystemParams<Scalar>& params, long n, Scalar t) {
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    return detail::poisson_pmf(n, params.rho0() * saturation_factor(params, t));
}

/// M|M|infinity transient pmf from the one-customer start. The bracket is
/// positive and averages to 1 under the Poisson weights, so the pmf
/// normalizes exactly. Below 1e-12 alpha the analytic t -> 0 limit (unit
/// mass at n = 1) is returned; t = 0 itself is rejected.
template <typename Scalar>
Scalar p1n_inf(const SystemParams<Scalar>& params, long n, Scalar t) {
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    if (!(t > 0)) throw std::invalid_argument("p1n_inf requires t > 0");
    if (t < Scalar(1e-12) * params.alpha) return n == 1 ? Scalar(1) : Scalar(0);
    const Scalar beta = saturation_factor(params, t);
    const Scalar bracket = beta + Scalar(n) / (params.rho0() * std::expm1(t / params.alpha));
    return bracket * p0n_inf(params, n, t);
}

namespace detail {

template <typename Scalar>
long poisson_support_cutoff(Scalar mean) {
    long n = std::max<long>(16, static_cast<long>(std::ceil(double(mean + 12 * std::sqrt(mean)))) + 8);
    while (poisson_pmf(n, mean) >= Scalar(1e-18)) ++n;
    return n;
}

}  // namespace detail

/// Finite view of the empty-start pmf, truncated where the tail drops
/// below 1e-18 past mean + 12 standard deviations.
template <typename Scalar>
DenseVector<Scalar> p0n_inf_vector(const SystemParams<Scalar>& params, Scalar t) {
    const Scalar mean = params.rho0() * saturation_factor(params, t);
    const long hi = detail::poisson_support_cutoff(mean);
    DenseVector<Scalar> out(hi + 1);
    for (long n = 0; n <= hi; ++n) out(n) = p0n_inf(params, n, t);
    return out;
}

template <typename Scalar>
DenseVector<Scalar> p1n_inf_vector(const SystemParams<Scalar>& params, Scalar t) {
    if (!(t > 0)) throw std::invalid_argument("p1n_inf requires t > 0");
    const Scalar mean = params.rho0() * saturation_factor(params, t);
    const long hi = detail::poisson_support_cutoff(mean);
    DenseVector<Scalar> out(hi + 1);
    for (long n = 0; n <= hi; ++n) out(n) = p1n_inf(params, n, t);
    return out;
}

/// Approximation of an M|M|m|m transient probability through the
/// M|M|infinity pmf, with the multiplicative factor actually applied:
/// the Stirling factor in the bulk, 1 near the origin, and the implied
/// boundary ratio for the blocking-family cases.
template <typename Scalar = double>
struct InfiniteServerApprox {
    Scalar value;
    Scalar factor;
    RegimeTag regime;
};

template <typename Scalar>
InfiniteServerApprox<Scalar> approx_mmm_via_inf(const SystemParams<Scalar>& params, int n,
                                                Scalar t, int n0,
                                                const RegimeThresholds& thresholds = {}) {
    if (!(params.rho() < 1))
        throw std::domain_error("infinite-server approximation requires rho < 1");
    const RegimeTag tag = classify_regime(params, n, t, n0, thresholds);
    InfiniteServerApprox<Scalar> out;
    out.regime = tag;
    switch (tag) {
        case RegimeTag::R1B:
        case RegimeTag::R2B: {
            const Scalar p = n0 == 0 ? p0n_inf(params, n, t) : p1n_inf(params, n, t);
            out.factor = stirling_factor<Scalar>(n);
            out.value = out.factor * p;
            return out;
        }
        case RegimeTag::R1A:
        case RegimeTag::R1C:
            out.value = p0n_inf(params, n, t);
            out.factor = 1;
            return out;
        case RegimeTag::R2A:
        case RegimeTag::R2D:
            out.value = p1n_inf(params, n, t);
            out.factor = 1;
            return out;
        case RegimeTag::R1D:
        case RegimeTag::BLOCK0:
            out.value = knessl_p0(params, n, t, RegimeTag::R1D);
            out.factor = out.value / p0n_inf(params, n, t);
            return out;
        case RegimeTag::R2E:
        case RegimeTag::BLOCK1:
            out.value = knessl_p1(params, n, t, RegimeTag::R2E);
            out.factor = out.value / p1n_inf(params, n, t);
            return out;
        case RegimeTag::R2C:
            break;
    }
    throw std::domain_error("no infinite-server approximation for this regime");
}

}  // namespace mmmm
