#pragma once

#include "mmmm/generator.hpp"
#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace mmmm {

/// Equivalent groupings of the remainder-bound argument
/// 2t(lambda0 + m/alpha) = (2t/alpha)(rho0 + m) = (2t/alpha) m (rho + 1).
enum class BoundVariant { ArrivalService, OfferedLoad, PerServerLoad };

inline const char* to_string(BoundVariant v) {
    switch (v) {
        case BoundVariant::ArrivalService: return "arrival-service";
        case BoundVariant::OfferedLoad: return "offered-load";
        case BoundVariant::PerServerLoad: return "per-server-load";
    }
    return "?";
}

template <typename Scalar = double>
struct TruncationReport {
    long F = 0;               // truncation order: F+1 series terms kept
    Scalar error_bound = 0;   // a-priori bound on the remainder norm
    std::int64_t phi = 0;     // multiplication count
    std::int64_t theta = 0;   // addition count
    BoundVariant variant = BoundVariant::ArrivalService;
};

class TruncationCapExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
Scalar bound_argument(const SystemParams<Scalar>& params, Scalar t, BoundVariant variant) {
    switch (variant) {
        case BoundVariant::ArrivalService:
            return 2 * t * (params.lambda0 + Scalar(params.m) / params.alpha);
        case BoundVariant::OfferedLoad:
            return (2 * t / params.alpha) * (params.rho0() + Scalar(params.m));
        case BoundVariant::PerServerLoad:
            return (2 * t / params.alpha) * Scalar(params.m) * (params.rho() + 1);
    }
    return 0;
}

/// Smallest order for which the a-priori bound applies: floor(z) + 1.
template <typename Scalar>
long min_valid_order(const SystemParams<Scalar>& params, Scalar t,
                     BoundVariant variant = BoundVariant::ArrivalService) {
    return static_cast<long>(std::floor(bound_argument(params, t, variant))) + 1;
}

namespace detail {

template <typename Scalar>
Scalar log_remainder_bound(Scalar z, long f) {
    // z^F/F! * (F+1)/(F+1-z), in log space so F in the hundreds cannot overflow
    if (z <= 0) return -std::numeric_limits<Scalar>::infinity();
    return Scalar(f) * std::log(z) - std::lgamma(Scalar(f) + 1) +
           std::log(Scalar(f + 1) / (Scalar(f + 1) - z));
}

}  // namespace detail

/// A-priori remainder bound; empty when F is below the validity threshold.
/// The three variants are algebraic rewritings of the same number.
template <typename Scalar>
std::optional<Scalar> error_bound(const SystemParams<Scalar>& params, Scalar t, long f,
                                  BoundVariant variant = BoundVariant::ArrivalService) {
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    if (f < 0) throw std::invalid_argument("F must be >= 0");
    const Scalar z = bound_argument(params, t, variant);
    if (f < static_cast<long>(std::floor(z)) + 1) return std::nullopt;
    return std::exp(detail::log_remainder_bound(z, f));
}

/// Operation counts of the F-term scheme, exact in integer arithmetic.
inline std::pair<std::int64_t, std::int64_t> op_counts(long f, int m) {
    if (f < 1) throw std::invalid_argument("F must be >= 1");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const std::int64_t s = m + 1;
    const std::int64_t cube = s * s * s;
    const std::int64_t phi = (std::int64_t(f) - 1) * cube + s * s + std::int64_t(f) * f;
    const std::int64_t theta = (std::int64_t(f) - 1) * cube + std::int64_t(m) * (m - 1);
    return {phi, theta};
}

/// First F at or above the validity threshold whose bound is <= tol.
template <typename Scalar>
TruncationReport<Scalar> choose_truncation(const SystemParams<Scalar>& params, Scalar t,
                                           Scalar tol, long cap = 1'000'000) {
    if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    const Scalar z = bound_argument(params, t, BoundVariant::ArrivalService);
    const Scalar log_tol = std::log(tol);
    long f = std::max<long>(static_cast<long>(std::floor(z)) + 1, 1);
    for (;; ++f) {
        if (f > cap) throw TruncationCapExceeded("truncation order cap exceeded");
        const Scalar log_bound = detail::log_remainder_bound(z, f);
        if (log_bound <= log_tol) {
            TruncationReport<Scalar> report;
            report.F = f;
            report.error_bound = std::exp(log_bound);
            std::tie(report.phi, report.theta) = op_counts(f, params.m);
            return report;
        }
    }
}

/// Truncated series for the transition matrix: sum_{j<=F} (t^j/j!) A^j,
/// accumulated with the running factor t/j. Rows may drift from summing to 1
/// by up to the remainder bound; entries are left raw unless clamping is
/// requested.
template <typename Scalar>
TransitionMatrix<Scalar> truncated_expm(const SystemParams<Scalar>& params, Scalar t, long f,
                                        bool clamp_negative = false) {
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    if (f < 0) throw std::invalid_argument("F must be >= 0");
    const int size = params.m + 1;
    const DenseMatrix<Scalar> a = build_generator(params).matrix;
    DenseMatrix<Scalar> term = DenseMatrix<Scalar>::Identity(size, size);
    DenseMatrix<Scalar> sum = term;
    for (long j = 1; j <= f; ++j) {
        term = (term * a) * (t / Scalar(j));
        sum += term;
    }
    TransitionMatrix<Scalar> out;
    out.t = t;
    out.matrix = sum.transpose();
    if (clamp_negative) out.matrix = out.matrix.cwiseMax(Scalar(0));
    return out;
}

}  // namespace mmmm
