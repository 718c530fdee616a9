#pragma once

#include "mmmm/system_params.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace mmmm {

/// Large-m regime labels: R1x for the empty start (n0 = 0), R2x for n0 = 1,
/// BLOCKx for the blocking probability P[N(t) = m].
enum class RegimeTag { R1A, R1B, R1C, R1D, R2A, R2B, R2C, R2D, R2E, BLOCK0, BLOCK1 };

inline const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::R1A: return "R1A";
        case RegimeTag::R1B: return "R1B";
        case RegimeTag::R1C: return "R1C";
        case RegimeTag::R1D: return "R1D";
        case RegimeTag::R2A: return "R2A";
        case RegimeTag::R2B: return "R2B";
        case RegimeTag::R2C: return "R2C";
        case RegimeTag::R2D: return "R2D";
        case RegimeTag::R2E: return "R2E";
        case RegimeTag::BLOCK0: return "BLOCK0";
        case RegimeTag::BLOCK1: return "BLOCK1";
    }
    return "?";
}

inline std::optional<RegimeTag> parse_regime_tag(std::string_view s) {
    for (RegimeTag tag : {RegimeTag::R1A, RegimeTag::R1B, RegimeTag::R1C, RegimeTag::R1D,
                          RegimeTag::R2A, RegimeTag::R2B, RegimeTag::R2C, RegimeTag::R2D,
                          RegimeTag::R2E, RegimeTag::BLOCK0, RegimeTag::BLOCK1})
        if (s == to_string(tag)) return tag;
    return std::nullopt;
}

/// Corrected applies the two consistency fixes (the R1C exponent and the
/// boundary-case log grouping); Printed evaluates the uncorrected forms for
/// auditing.
enum class FormulaForm { Corrected, Printed };

/// The case domains are order-of-magnitude statements, so the cutoffs are
/// configuration rather than constants.
struct RegimeThresholds {
    int c_small = 5;      // n or m-n at most this counts as O(1)
    double c_tau = 10.0;  // t*m at most this selects the stretched-time cases
    double c_half = 10.0; // t*sqrt(m) at most this selects R2C
};

/// Dimensionless view of a query point: x = n/m, tau = m t, beta = 1-e^{-t/alpha}.
template <typename Scalar = double>
struct ScaledState {
    Scalar x;
    Scalar tau;
    Scalar beta;
};

template <typename Scalar>
ScaledState<Scalar> scaled_state(const SystemParams<Scalar>& params, int n, Scalar t) {
    return {params.epsilon() * Scalar(n), t / params.epsilon(), saturation_factor(params, t)};
}

/// n! / (sqrt(2 pi n) (n/e)^n), evaluated through log-gamma. Strictly
/// decreasing, tends to 1.
template <typename Scalar = double>
Scalar stirling_factor(long n) {
    if (n < 1) throw std::invalid_argument("stirling_factor requires n >= 1");
    const Scalar x(n);
    return std::exp(std::lgamma(x + 1) - Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar> * x) -
                    x * std::log(x) + x);
}

namespace detail {

template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
    if (a == -std::numeric_limits<Scalar>::infinity()) return b;
    if (b == -std::numeric_limits<Scalar>::infinity()) return a;
    const Scalar hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

template <typename Scalar>
Scalar poisson_pmf(long n, Scalar mean) {
    if (mean <= 0) return n == 0 ? Scalar(1) : Scalar(0);
    return std::exp(Scalar(n) * std::log(mean) - mean - std::lgamma(Scalar(n) + 1));
}

template <typename Scalar>
void require_asymptotic_domain(const SystemParams<Scalar>& params, int n) {
    if (!(params.rho() < 1))
        throw std::domain_error("asymptotic cases require rho = rho0/m < 1");
    if (n < 0 || n > params.m) throw std::invalid_argument("n outside 0..m");
}

// Shared boundary form for m - n = l = O(1). Both bracket terms are positive
// (rho < 1 forces rho - 1/beta < 0), so they combine by log-sum-exp with no
// cancellation. extra_log carries the n0 = 1 prefactor.
template <typename Scalar>
Scalar boundary_case(const SystemParams<Scalar>& params, int l, Scalar t, Scalar extra_log,
                     FormulaForm form) {
    const Scalar beta = saturation_factor(params, t);
    const Scalar decay = std::exp(-t / params.alpha);  // 1 - beta without cancellation
    const Scalar rho = params.rho();
    const Scalar rho_beta = rho * beta;
    const Scalar m = Scalar(params.m);
    const Scalar log_t1 = -Scalar(l) * std::log(rho_beta);
    const Scalar coeff = rho * decay / (Scalar(1) / beta - rho);
    const Scalar log_t2 = std::log(coeff) + Scalar(l) * std::log(beta);
    const Scalar log_bracket = log_add_exp(log_t1, log_t2);
    Scalar log_common = -Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar> * m);
    if (form == FormulaForm::Corrected)
        log_common += m * (1 - rho_beta + std::log(rho_beta));
    else
        log_common += m * (1 - rho_beta) + std::log(rho_beta);
    return std::exp(log_common + log_bracket + extra_log);
}

}  // namespace detail

/// Large-m cases for the empty start, P[N(t) = n | n0 = 0].
template <typename Scalar>
Scalar knessl_p0(const SystemParams<Scalar>& params, int n, Scalar t, RegimeTag tag,
                 FormulaForm form = FormulaForm::Corrected) {
    detail::require_asymptotic_domain(params, n);
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    const Scalar beta = saturation_factor(params, t);
    const Scalar mean = params.rho0() * beta;
    switch (tag) {
        case RegimeTag::R1A:
            // Poisson with mean lambda tau = lambda0 t
            return detail::poisson_pmf(long(n), params.lambda0 * t);
        case RegimeTag::R1B: {
            if (n < 1) throw std::invalid_argument("bulk case requires n >= 1");
            if (mean <= 0) return 0;
            const Scalar log_v = -Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar> * Scalar(n)) +
                                 Scalar(n) * std::log(mean / Scalar(n)) + Scalar(n) - mean;
            return std::exp(log_v);
        }
        case RegimeTag::R1C: {
            Scalar v = detail::poisson_pmf(long(n), mean);
            if (form == FormulaForm::Printed) v *= std::exp(Scalar(1));
            return v;
        }
        case RegimeTag::R1D:
            if (!(t > 0)) throw std::invalid_argument("boundary case requires t > 0");
            return detail::boundary_case(params, params.m - n, t, Scalar(0), form);
        default:
            throw std::invalid_argument("knessl_p0 handles R1A..R1D");
    }
}

/// Large-m cases for the one-customer start, P[N(t) = n | n0 = 1].
template <typename Scalar>
Scalar knessl_p1(const SystemParams<Scalar>& params, int n, Scalar t, RegimeTag tag) {
    detail::require_asymptotic_domain(params, n);
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    const Scalar beta = saturation_factor(params, t);
    const Scalar mean = params.rho0() * beta;
    switch (tag) {
        case RegimeTag::R2A:
            if (n >= 1) return detail::poisson_pmf(long(n) - 1, params.lambda0 * t);
            // printed n <= 1 branch, kept as published
            return std::exp(-params.lambda() * t) * (t / params.alpha);
        case RegimeTag::R2B: {
            if (n < 1) throw std::invalid_argument("bulk case requires n >= 1");
            if (!(t > 0)) throw std::invalid_argument("R2B requires t > 0");
            const Scalar bracket =
                beta + Scalar(n) / (params.rho0() * std::expm1(t / params.alpha));
            const Scalar log_v = -Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar> * Scalar(n)) +
                                 std::log(bracket) + Scalar(n) * std::log(mean / Scalar(n)) +
                                 Scalar(n) - mean;
            return std::exp(log_v);
        }
        case RegimeTag::R2C: {
            // published form; no limit in the source validates it, kept verbatim
            if (n < 1) throw std::invalid_argument("R2C requires n >= 1");
            if (!(t > 0)) throw std::invalid_argument("R2C requires t > 0");
            const Scalar m = Scalar(params.m);
            const Scalar base = t * std::sqrt(m) / params.alpha;
            Scalar sum = 0;
            for (int l = 0; l <= n; ++l)
                sum += Scalar(n) * std::pow(params.rho0() / m, Scalar(n - l)) *
                       std::pow(base, Scalar(n + 1 - 2 * l));
            sum *= std::exp(-std::lgamma(Scalar(n)));
            const Scalar prefactor = std::exp(-m * params.lambda0 * t +
                                              Scalar(0.5) * (params.lambda0 / params.alpha) * t * t);
            return prefactor * std::pow(m, Scalar(0.5) * Scalar(n - 1)) * sum;
        }
        case RegimeTag::R2D:
            return beta * detail::poisson_pmf(long(n), mean);
        case RegimeTag::R2E: {
            if (!(t > 0)) throw std::invalid_argument("boundary case requires t > 0");
            const Scalar prefactor =
                beta + Scalar(params.m) / (params.rho0() * std::expm1(t / params.alpha));
            return detail::boundary_case(params, params.m - n, t, std::log(prefactor),
                                         FormulaForm::Corrected);
        }
        default:
            throw std::invalid_argument("knessl_p1 handles R2A..R2E");
    }
}

/// Transient blocking probability P[N(t) = m | n0]. Tends to the
/// Stirling-matched Erlang B value as t grows.
template <typename Scalar>
Scalar blocking_probability(const SystemParams<Scalar>& params, int n0, Scalar t,
                            FormulaForm form = FormulaForm::Corrected) {
    if (n0 != 0 && n0 != 1) throw std::invalid_argument("n0 must be 0 or 1");
    if (n0 == 0) return knessl_p0(params, params.m, t, RegimeTag::R1D, form);
    return knessl_p1(params, params.m, t, RegimeTag::R2E);
}

/// Stirling-matched stationary blocking value
/// (2 pi m)^{-1/2} (e/m)^m rho0^m e^{-rho0}, the common large-t limit of the
/// blocking cases.
template <typename Scalar>
Scalar stirling_erlang_limit(const SystemParams<Scalar>& params) {
    const Scalar m = Scalar(params.m);
    return std::exp(-Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar> * m) + m - m * std::log(m) +
                    m * std::log(params.rho0()) - params.rho0());
}

/// Deterministic mapping from a query point to the applicable case.
template <typename Scalar>
RegimeTag classify_regime(const SystemParams<Scalar>& params, int n, Scalar t, int n0,
                          const RegimeThresholds& thresholds = {}) {
    if (n0 != 0 && n0 != 1) throw std::invalid_argument("n0 must be 0 or 1");
    if (n < 0 || n > params.m) throw std::invalid_argument("n outside 0..m");
    const bool from_empty = n0 == 0;
    if (n == params.m) return from_empty ? RegimeTag::BLOCK0 : RegimeTag::BLOCK1;
    if (n <= thresholds.c_small) {
        if (double(t) * params.m <= thresholds.c_tau)
            return from_empty ? RegimeTag::R1A : RegimeTag::R2A;
        if (!from_empty && double(t) * std::sqrt(double(params.m)) <= thresholds.c_half)
            return RegimeTag::R2C;
        return from_empty ? RegimeTag::R1C : RegimeTag::R2D;
    }
    if (params.m - n <= thresholds.c_small) return from_empty ? RegimeTag::R1D : RegimeTag::R2E;
    return from_empty ? RegimeTag::R1B : RegimeTag::R2B;
}

}  // namespace mmmm
