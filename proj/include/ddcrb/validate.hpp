#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "ddcrb/echo.hpp"
#include "ddcrb/fim.hpp"
#include "ddcrb/types.hpp"

namespace ddcrb {

// Inclusive linear search range with `count` nodes.
struct GridRange {
    double min_value = 0.0;
    double max_value = 0.0;
    int count = 1;

    double node(int idx) const {
        if (count <= 1) return min_value;
        return min_value + (max_value - min_value) * idx / (count - 1);
    }
    double step() const { return count <= 1 ? 0.0 : (max_value - min_value) / (count - 1); }

    bool operator==(const GridRange&) const = default;
};

/**
 * Monte-Carlo experiment configuration.
 *
 * When snr_db is set, the noise variance per complex DD sample is derived
 * from it as sigma^2 = P_mu / (MN * 10^(snr_db/10)); otherwise
 * EchoParams::sigma_echo_sq is used as-is.
 */
struct McConfig {
    int trials = 100;
    std::optional<double> snr_db;
    GridRange tau_search;
    GridRange nu_search;
    std::uint64_t seed = 0;
    bool refine = true;  // 3-point quadratic peak interpolation per axis

    bool operator==(const McConfig&) const = default;
};

struct McReport {
    double mse_tau = 0.0;  // [s^2]
    double mse_nu = 0.0;   // [Hz^2]
    double crb_tau = 0.0;
    double crb_nu = 0.0;
    double ratio_tau = 0.0;  // mse/crb
    double ratio_nu = 0.0;
    double bias_tau = 0.0;  // [s]
    double bias_nu = 0.0;   // [Hz]
    int trials_used = 0;
    int boundary_hits = 0;           // trials whose grid minimum touched a search boundary
    double sigma_echo_sq_used = 0.0;  // effective noise variance of the experiment
    double snr_db_used = 0.0;         // 10*log10(P_mu/(MN*sigma^2)) actually realized
};

// Grid-search ML estimate; boundary flags are set when the grid minimum
// sits on the first or last node of an axis (the estimate is still valid).
struct MlEstimate {
    double tau_hat = 0.0;
    double nu_hat = 0.0;
    bool tau_on_boundary = false;
    bool nu_on_boundary = false;
};

/**
 * Central finite difference (f(at+step) - f(at-step)) / (2*step),
 * elementwise over the DD vector returned by f.
 */
DdVector fd_derivative(const std::function<DdVector(double)>& f, double at, double step);

/**
 * Generic Gaussian FIM from two derivative vectors:
 *
 *   I_ij = (2/sigma^2) * Re{ d_i^H d_j }
 *
 * Independent of the closed-form assembly; feed it analytic or
 * finite-difference vectors.
 */
Fim numeric_fim(const DdVector& j_tau, const DdVector& j_nu, double sigma_sq);

/**
 * Maximum-likelihood estimate of (tau, nu) by exhaustive search of
 * ||y - mu(tau,nu)||^2 over the configured grid, with alpha(.) and beta
 * known. Ties break toward the lowest flat grid index (tau-major,
 * nu-minor). With cfg.refine, a separable 3-point quadratic interpolation
 * around interior minima sharpens each axis.
 */
MlEstimate ml_estimate(const DdVector& y, const TfSymbols& x, const GainModel& gain, Complex beta,
                       const McConfig& cfg, const OtfsGrid& grid);

/**
 * Monte-Carlo validation run: per trial, draw circular complex Gaussian
 * noise (per-trial seed = cfg.seed + trial index), estimate (tau, nu),
 * and accumulate errors. Reports empirical MSEs against the analytic
 * CRBs. threads == 0 picks a default; results are identical for any
 * thread count (per-trial errors are reduced in trial order).
 */
McReport run_mc(const EchoParams& p, const TfSymbols& x, const McConfig& cfg,
                const OtfsGrid& grid, int threads = 0);

}  // namespace ddcrb
