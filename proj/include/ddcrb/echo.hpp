#pragma once

#include "ddcrb/types.hpp"

namespace ddcrb {

/**
 * Delay-dependent echo gain alpha(tau) = alpha_ref * (tau_ref/tau)^2.
 *
 * Inverse-square amplitude decay with range; its log-derivative is
 * d(alpha)/d(tau) = -2*alpha(tau)/tau, which is what the delay
 * derivative of the mean signal relies on.
 */
struct GainModel {
    Complex alpha_ref{1.0, 0.0};  // gain at the reference delay
    double tau_ref = 1.0;         // reference delay [s], > 0

    Complex alpha_at(double tau) const {
        const double r = tau_ref / tau;
        return alpha_ref * (r * r);
    }

    bool operator==(const GainModel&) const = default;
};

// Monostatic echo parameters: target delay/Doppler, reflectivity, gain
// model and per-sample complex noise variance.
struct EchoParams {
    double tau_t = 0.0;          // target delay [s], > 0
    double nu_t = 0.0;           // target Doppler [Hz]
    Complex beta_t{1.0, 0.0};    // target reflectivity
    GainModel gain;
    double sigma_echo_sq = 1.0;  // noise variance per complex DD sample, > 0

    void validate() const {
        if (!(tau_t > 0.0)) throw std::domain_error("EchoParams: tau_t must be > 0");
        if (!(gain.tau_ref > 0.0)) throw std::domain_error("EchoParams: gain.tau_ref must be > 0");
        if (!(sigma_echo_sq > 0.0)) throw std::domain_error("EchoParams: sigma_echo_sq must be > 0");
    }

    bool operator==(const EchoParams&) const = default;
};

/**
 * Mean DD signal and its analytic first derivatives.
 *
 * d_delay is stored as the elementwise sum d_gain + d_phase_delay, and
 * d_gain as (-2/tau_t) * mean, so both decompositions hold bit-exactly.
 */
struct DerivativeBundle {
    DdVector mean;           // mean DD echo signal
    DdVector d_doppler;      // d(mean)/d(nu_t)
    DdVector d_gain;         // gain contribution to d(mean)/d(tau_t): (-2/tau_t)*mean
    DdVector d_phase_delay;  // phase contribution to d(mean)/d(tau_t)
    DdVector d_delay;        // d_gain + d_phase_delay
};

/**
 * Mean received DD signal of the monostatic echo:
 *
 *   mu[l,k] = (alpha(tau)*beta / sqrt(MN)) * sum_{n,i} X[n,i] * e^{j*phi}
 *
 * with phi = dd_phase(n,i,l,k,nu,tau). The phase-modulated transform is
 * unitary, so ||mu||^2 = |alpha|^2 |beta|^2 ||X||^2.
 */
DdVector mean_dd_signal(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid);

/**
 * Analytic Doppler derivative of the mean signal:
 *
 *   d mu[l,k]/d nu = j2piT * (alpha*beta/sqrt(MN)) * sum_{n,i} n*X[n,i]*e^{j*phi}
 */
DdVector doppler_derivative(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid);

/**
 * Mean signal plus all analytic derivatives in one pass.
 *
 * The delay derivative follows the product rule over gain and phase:
 *
 *   d mu/d tau = (-2/tau)*mu - j2pi*df * (alpha*beta/sqrt(MN)) * sum_{n,i} i*X[n,i]*e^{j*phi}
 */
DerivativeBundle derivative_bundle(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid);

}  // namespace ddcrb
