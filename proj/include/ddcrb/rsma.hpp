#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ddcrb/types.hpp"

namespace ddcrb {

/**
 * RSMA downlink precoders over the DD grid: one common-stream vector and
 * K private-stream vectors, each of length N_dd. Stream symbols are
 * unit-power by convention, so powers live entirely in the precoders.
 */
struct Precoders {
    Eigen::VectorXcd common;
    std::vector<Eigen::VectorXcd> privates;

    int dd_size() const { return static_cast<int>(common.size()); }
    int users() const { return static_cast<int>(privates.size()); }

    // P_tot = ||p_c||^2 + sum_k ||p_k||^2; must be > 0
    double total_power() const;

    void validate() const;
};

// True channel, its estimate, and the two variances the SINR formulas use.
struct ChannelSet {
    Eigen::MatrixXcd h_true;
    Eigen::MatrixXcd h_est;
    double sigma_e_sq = 0.0;  // per-element estimation error variance
    double sigma_n_sq = 0.0;  // AWGN variance
};

// Receive filters (rows, acting on the left) and the SIC imperfection factor.
struct SinrInputs {
    Eigen::RowVectorXcd w_common;
    Eigen::RowVectorXcd w_private;
    double theta = 0.0;  // ISIC residual factor, in [0,1]
};

struct LmmseFilters {
    Eigen::RowVectorXcd common;
    std::vector<Eigen::RowVectorXcd> privates;
};

/**
 * Draw an estimated channel h_true + E with E elements i.i.d. circular
 * complex Gaussian of variance sigma_e_sq (real/imag each sigma_e_sq/2).
 * Deterministic for a given seed; elements drawn row-major.
 */
Eigen::MatrixXcd draw_channel_estimate(const Eigen::MatrixXcd& h_true, double sigma_e_sq,
                                       std::uint64_t seed);

/**
 * LMMSE receive filters designed on the estimated channel with the
 * effective noise floor sigma_n_sq + sigma_e_sq * P_tot:
 *
 *   w_c  = p_c^H H^H (H R_x H^H + floor*I)^{-1},  R_x over all streams
 *   w_pk = p_k^H H^H (H R_p H^H + floor*I)^{-1},  R_p over private streams only
 *
 * The private design excludes the common stream (post-SIC design); the
 * ISIC factor enters evaluation only, never the filter.
 */
LmmseFilters lmmse_filters(const Eigen::MatrixXcd& h_est, const Precoders& pre,
                           double sigma_n_sq, double sigma_e_sq);

/**
 * Common-stream SINR under imperfect CSI:
 *
 *   |w H p_c|^2 / ( sum_j |w H p_j|^2 + ||w||^2 (sigma_n^2 + sigma_e^2 P_tot) )
 *
 * Pass the estimated channel for the design-consistent figure; passing
 * the true channel instead gives the mismatched-evaluation diagnostic.
 */
double sinr_common(const SinrInputs& inp, const Eigen::MatrixXcd& h_est, const Precoders& pre,
                   double sigma_n_sq, double sigma_e_sq);

/**
 * Private-stream SINR for user k under imperfect CSI and imperfect SIC:
 *
 *   |w H p_k|^2 / ( sum_{j!=k} |w H p_j|^2 + theta |w H p_c|^2
 *                   + ||w||^2 (sigma_n^2 + sigma_e^2 P_tot) )
 */
double sinr_private(const SinrInputs& inp, const Eigen::MatrixXcd& h_est, const Precoders& pre,
                    int user, double sigma_n_sq, double sigma_e_sq);

/**
 * Experimental DD channel: a sum of `paths` cyclic delay/Doppler shift
 * matrices with i.i.d. CN(0, 1/paths) gains. Shift offsets are drawn
 * uniformly over the grid; deterministic for a given seed.
 */
Eigen::MatrixXcd make_dd_channel(const OtfsGrid& grid, int paths, std::uint64_t seed);

/**
 * Random precoders with ||p_c||^2 = common_share * total_power and the
 * remaining power split equally across the K private streams. With
 * users == 0 the common stream takes all the power.
 */
Precoders make_precoders(int dd_size, int users, double total_power, double common_share,
                         std::uint64_t seed);

}  // namespace ddcrb
