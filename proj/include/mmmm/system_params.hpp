#pragma once

#include <cmath>
#include <stdexcept>

namespace mmmm {

/// Parameters of an M|M|m|m loss system: Poisson arrivals at rate lambda0,
/// exponential service with mean alpha (rate 1/alpha), m servers and no
/// waiting room.
template <typename Scalar = double>
struct SystemParams {
    Scalar lambda0;  // arrival rate, > 0
    Scalar alpha;    // mean service time, > 0
    int m;           // server count, >= 1

    SystemParams(Scalar lambda0_, Scalar alpha_, int m_)
        : lambda0(lambda0_), alpha(alpha_), m(m_) {
        if (!(lambda0 > Scalar(0))) throw std::invalid_argument("lambda0 must be > 0");
        if (!(alpha > Scalar(0))) throw std::invalid_argument("alpha must be > 0");
        if (m < 1) throw std::invalid_argument("m must be >= 1");
    }

    /// Construct from the service rate mu = 1/alpha instead of the mean.
    static SystemParams from_rates(Scalar lambda0_, Scalar mu, int m_) {
        if (!(mu > Scalar(0))) throw std::invalid_argument("mu must be > 0");
        return SystemParams(lambda0_, Scalar(1) / mu, m_);
    }

    Scalar service_rate() const { return Scalar(1) / alpha; }
    Scalar rho0() const { return lambda0 * alpha; }        // offered load
    Scalar rho() const { return rho0() / Scalar(m); }      // per-server load
    Scalar epsilon() const { return Scalar(1) / Scalar(m); }
    Scalar lambda() const { return lambda0 / Scalar(m); }  // scaled arrival rate
};

/// 1 - exp(-t/alpha), the factor that saturates to 1 as the system forgets
/// its initial state. expm1 keeps full precision for small t.
template <typename Scalar>
Scalar saturation_factor(const SystemParams<Scalar>& params, Scalar t) {
    return -std::expm1(-t / params.alpha);
}

using SystemParamsd = SystemParams<double>;

}  // namespace mmmm
