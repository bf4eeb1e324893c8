#pragma once

#include <string>

#include "ddcrb/echo.hpp"
#include "ddcrb/types.hpp"

namespace ddcrb {

/**
 * The six intermediate scalars the closed-form FIM is assembled from.
 *
 *   s_n  = sum_{l,k} | sum_{n,i} n * X[n,i] * e^{j phi} |^2
 *   s_i  = sum_{l,k} | sum_{n,i} i * X[n,i] * e^{j phi} |^2
 *   c_tau_nu = Re{ d_phase_delay^H d_doppler }
 *   c_mu_tau = Re{ mean^H d_phase_delay }
 *   c_mu_nu  = Re{ mean^H d_doppler }
 *   p_mu = ||mean||^2
 *
 * s_n, s_i carry no alpha*beta/sqrt(MN) prefactor; the C terms and p_mu
 * are inner products of the fully scaled vectors.
 */
struct FimSums {
    double s_n = 0.0;
    double s_i = 0.0;
    double c_tau_nu = 0.0;
    double c_mu_tau = 0.0;
    double c_mu_nu = 0.0;
    double p_mu = 0.0;
};

// 2x2 Fisher information over (tau_t, nu_t), symmetric by construction.
struct Fim {
    double i_nu_nu = 0.0;
    double i_tau_tau = 0.0;
    double i_tau_nu = 0.0;

    double det() const { return i_tau_tau * i_nu_nu - i_tau_nu * i_tau_nu; }
    double trace() const { return i_tau_tau + i_nu_nu; }

    // smaller eigenvalue of [[i_tau_tau, i_tau_nu],[i_tau_nu, i_nu_nu]]
    double min_eigenvalue() const;
};

struct CrbResult {
    double crb_tau = 0.0;  // [s^2]
    double crb_nu = 0.0;   // [Hz^2]
    double det_fim = 0.0;
    Fim fim;
};

/**
 * Raised when the FIM determinant is at or below the singularity
 * threshold 1e-12 * max(i_tau_tau * i_nu_nu, 1). Reports which diagonal
 * entries (if any) are exactly zero.
 */
class SingularFim : public std::runtime_error {
public:
    SingularFim(const Fim& fim, double det, double threshold);

    bool doppler_diagonal_zero() const { return doppler_zero_; }
    bool delay_diagonal_zero() const { return delay_zero_; }
    double det() const { return det_; }
    double threshold() const { return threshold_; }

private:
    bool doppler_zero_ = false;
    bool delay_zero_ = false;
    double det_ = 0.0;
    double threshold_ = 0.0;
};

// Intermediate scalars from the TF pilot and echo parameters.
FimSums fim_sums(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid);

/**
 * Closed-form FIM entries:
 *
 *   I_nunu   = 2 (2piT)^2 |a|^2|b|^2 s_n / (MN s2)
 *   I_tautau = 8 p_mu/(s2 tau^2) + 2 (2pi df)^2 |a|^2|b|^2 s_i/(MN s2) - 8 c_mu_tau/(s2 tau)
 *   I_taunu  = 2 c_tau_nu/s2 - 4 c_mu_nu/(s2 tau)
 *
 * with s2 = sigma_echo_sq, a = alpha(tau_t), b = beta_t.
 */
Fim fim_assemble(const FimSums& s, const EchoParams& p, const OtfsGrid& grid);

/**
 * Explicit 2x2 inversion:
 *
 *   det = I_tautau*I_nunu - I_taunu^2
 *   CRB(tau) = I_nunu / det,  CRB(nu) = I_tautau / det
 *
 * Throws SingularFim when det is at or below the threshold.
 */
CrbResult crb_from_fim(const Fim& f);

// fim_sums -> fim_assemble -> crb_from_fim
CrbResult crb_pipeline(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid);

}  // namespace ddcrb
