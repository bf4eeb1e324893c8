#pragma once

// Test-only reference implementations, kept deliberately independent of
// the library's computation paths: literal sums with std::exp phases, no
// twiddle caching, no factorization. Used to cross-check the production
// code, never the other way round.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "ddcrb/echo.hpp"
#include "ddcrb/fim.hpp"
#include "ddcrb/rsma.hpp"
#include "ddcrb/types.hpp"

namespace oracles {

using ddcrb::Complex;
using ddcrb::DdVector;
using ddcrb::EchoParams;
using ddcrb::OtfsGrid;
using ddcrb::TfSymbols;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Direct SFFT evaluation, one std::exp per term.
inline DdVector naive_sfft(const TfSymbols& x, const OtfsGrid& g) {
    DdVector out(g.n_doppler_bins, g.m_delay_bins);
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.dd_size()));
    for (int l = 0; l < g.n_doppler_bins; ++l)
        for (int k = 0; k < g.m_delay_bins; ++k) {
            Complex acc{0.0, 0.0};
            for (int n = 0; n < g.n_doppler_bins; ++n)
                for (int i = 0; i < g.m_delay_bins; ++i) {
                    const double ang = -kTwoPi * (static_cast<double>(n) * l / g.n_doppler_bins -
                                                  static_cast<double>(i) * k / g.m_delay_bins);
                    acc += x.at(n, i) * std::exp(Complex(0.0, ang));
                }
            out.at(l, k) = scale * acc;
        }
    return out;
}

// Index-weighted phase sum with the full phase evaluated per term.
// weight_n/weight_i pick the n or i factor; both false means weight 1.
inline DdVector naive_weighted_sum(const TfSymbols& x, double nu, double tau, const OtfsGrid& g,
                                   bool weight_n, bool weight_i) {
    DdVector out(g.n_doppler_bins, g.m_delay_bins);
    for (int l = 0; l < g.n_doppler_bins; ++l)
        for (int k = 0; k < g.m_delay_bins; ++k) {
            Complex acc{0.0, 0.0};
            for (int n = 0; n < g.n_doppler_bins; ++n)
                for (int i = 0; i < g.m_delay_bins; ++i) {
                    const double phi =
                        kTwoPi * (n * (nu * g.symbol_duration -
                                       static_cast<double>(l) / g.n_doppler_bins) -
                                  i * (tau * g.delta_f - static_cast<double>(k) / g.m_delay_bins));
                    double w = 1.0;
                    if (weight_n) w = n;
                    if (weight_i) w = i;
                    acc += w * x.at(n, i) * std::exp(Complex(0.0, phi));
                }
            out.at(l, k) = acc;
        }
    return out;
}

inline DdVector naive_mean_signal(const TfSymbols& x, const EchoParams& p, const OtfsGrid& g) {
    DdVector raw = naive_weighted_sum(x, p.nu_t, p.tau_t, g, false, false);
    const Complex scale =
        p.gain.alpha_at(p.tau_t) * p.beta_t / std::sqrt(static_cast<double>(g.dd_size()));
    for (Complex& v : raw.values) v *= scale;
    return raw;
}

// Diagonal of the inverse of [[tt, tn],[tn, nn]] via a general-purpose solver.
inline std::pair<double, double> inverse_2x2_diagonal(double tt, double nn, double tn) {
    Eigen::Matrix2d m;
    m << tt, tn, tn, nn;
    const Eigen::Matrix2d inv = m.inverse();
    return {inv(0, 0), inv(1, 1)};
}

inline double rel_err(double got, double want) {
    const double denom = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / denom;
}

// relative L2 distance between two DD vectors
inline double rel_l2(const DdVector& got, const DdVector& want) {
    double num = 0.0, den = 0.0;
    for (size_t c = 0; c < want.values.size(); ++c) {
        num += std::norm(got.values[c] - want.values[c]);
        den += std::norm(want.values[c]);
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

inline double max_abs(const TfSymbols& x) {
    double m = 0.0;
    for (const Complex& v : x.values) m = std::max(m, std::abs(v));
    return m;
}

// --- random instance generators -----------------------------------------

inline TfSymbols random_symbols(const OtfsGrid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    TfSymbols x = TfSymbols::zeros(g);
    for (Complex& v : x.values) v = Complex(gauss(rng), gauss(rng));
    return x;
}

inline EchoParams random_echo(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> tau_dist(10e-6, 1e-3);
    std::uniform_real_distribution<double> nu_dist(-5e3, 5e3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> sigma_dist(0.1, 2.0);
    EchoParams p;
    p.tau_t = tau_dist(rng);
    p.nu_t = nu_dist(rng);
    p.beta_t = Complex(unit(rng) + 1.5, unit(rng));
    p.gain.alpha_ref = Complex(unit(rng) + 1.5, unit(rng));
    p.gain.tau_ref = tau_dist(rng);
    p.sigma_echo_sq = sigma_dist(rng);
    return p;
}

inline TfSymbols uniform_pilot(const OtfsGrid& g) {
    TfSymbols x = TfSymbols::zeros(g);
    for (Complex& v : x.values) v = Complex(1.0, 0.0);
    return x;
}

// Standard acceptance grid: 15 kHz spacing, T = 1/delta_f.
inline OtfsGrid make_grid(int m, int n) {
    OtfsGrid g;
    g.m_delay_bins = m;
    g.n_doppler_bins = n;
    g.delta_f = 15e3;
    g.symbol_duration = 1.0 / 15e3;
    return g;
}

// --- independent scalar SINR evaluation ----------------------------------

using CVec = std::vector<Complex>;
using CMat = std::vector<std::vector<Complex>>;

inline CMat to_mat(const Eigen::MatrixXcd& m) {
    CMat out(m.rows(), CVec(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

inline CVec to_vec(const Eigen::VectorXcd& v) {
    CVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
    return out;
}

inline CVec to_vec(const Eigen::RowVectorXcd& v) {
    CVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
    return out;
}

// w * H * p with explicit loops
inline Complex scalar_whp(const CVec& w, const CMat& h, const CVec& p) {
    Complex acc{0.0, 0.0};
    for (size_t r = 0; r < h.size(); ++r) {
        Complex hp{0.0, 0.0};
        for (size_t c = 0; c < h[r].size(); ++c) hp += h[r][c] * p[c];
        acc += w[r] * hp;
    }
    return acc;
}

inline double scalar_norm_sq(const CVec& w) {
    double acc = 0.0;
    for (const Complex& v : w) acc += std::norm(v);
    return acc;
}

inline double scalar_sinr_common(const CVec& w, const CMat& h, const CVec& pc,
                                 const std::vector<CVec>& priv, double sn, double se,
                                 double ptot) {
    const double num = std::norm(scalar_whp(w, h, pc));
    double den = 0.0;
    for (const CVec& p : priv) den += std::norm(scalar_whp(w, h, p));
    den += scalar_norm_sq(w) * (sn + se * ptot);
    return num / den;
}

inline double scalar_sinr_private(const CVec& w, const CMat& h, const CVec& pc,
                                  const std::vector<CVec>& priv, size_t user, double theta,
                                  double sn, double se, double ptot) {
    const double num = std::norm(scalar_whp(w, h, priv[user]));
    double den = 0.0;
    for (size_t j = 0; j < priv.size(); ++j)
        if (j != user) den += std::norm(scalar_whp(w, h, priv[j]));
    den += theta * std::norm(scalar_whp(w, h, pc));
    den += scalar_norm_sq(w) * (sn + se * ptot);
    return num / den;
}

}  // namespace oracles
