#include "ddcrb/otfs.hpp"

#include <cmath>
#include <numbers>

namespace ddcrb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{-j2pi*n*l/N} for all (n,l); the integer product is reduced mod N
// before the angle is formed to keep arguments small.
std::vector<Complex> doppler_twiddles(int n_bins) {
    std::vector<Complex> t(static_cast<size_t>(n_bins) * n_bins);
    for (int n = 0; n < n_bins; ++n)
        for (int l = 0; l < n_bins; ++l) {
            const long long r = (static_cast<long long>(n) * l) % n_bins;
            t[static_cast<size_t>(n) * n_bins + l] =
                std::polar(1.0, -kTwoPi * static_cast<double>(r) / n_bins);
        }
    return t;
}

// e^{+j2pi*i*k/M} for all (i,k).
std::vector<Complex> delay_twiddles(int m_bins) {
    std::vector<Complex> t(static_cast<size_t>(m_bins) * m_bins);
    for (int i = 0; i < m_bins; ++i)
        for (int k = 0; k < m_bins; ++k) {
            const long long r = (static_cast<long long>(i) * k) % m_bins;
            t[static_cast<size_t>(i) * m_bins + k] =
                std::polar(1.0, kTwoPi * static_cast<double>(r) / m_bins);
        }
    return t;
}

}  // namespace

double dd_phase(int n, int i, int l, int k, double nu, double tau, const OtfsGrid& grid) {
    const double doppler_part =
        n * (nu * grid.symbol_duration - static_cast<double>(l) / grid.n_doppler_bins);
    const double delay_part =
        i * (tau * grid.delta_f - static_cast<double>(k) / grid.m_delay_bins);
    return kTwoPi * (doppler_part - delay_part);
}

DdVector sfft(const TfSymbols& x, const OtfsGrid& grid) {
    grid.validate();
    if (!x.shape_matches(grid))
        throw std::invalid_argument("sfft: TF symbol shape does not match grid");

    const int m = grid.m_delay_bins;
    const int n_sym = grid.n_doppler_bins;
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.dd_size()));
    const auto ct = doppler_twiddles(n_sym);
    const auto dt = delay_twiddles(m);

    DdVector out(n_sym, m);
    for (int l = 0; l < n_sym; ++l) {
        for (int k = 0; k < m; ++k) {
            Complex acc{0.0, 0.0};
            for (int n = 0; n < n_sym; ++n) {
                const Complex cn = ct[static_cast<size_t>(n) * n_sym + l];
                for (int i = 0; i < m; ++i)
                    acc += x.at(n, i) * cn * dt[static_cast<size_t>(i) * m + k];
            }
            out.at(l, k) = scale * acc;
        }
    }
    return out;
}

TfSymbols isfft(const DdVector& y, const OtfsGrid& grid) {
    grid.validate();
    if (!y.shape_matches(grid))
        throw std::invalid_argument("isfft: DD vector length does not match grid");

    const int m = grid.m_delay_bins;
    const int n_sym = grid.n_doppler_bins;
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.dd_size()));
    // conjugate kernel of sfft
    const auto ct = doppler_twiddles(n_sym);
    const auto dt = delay_twiddles(m);

    TfSymbols out(n_sym, m);
    for (int n = 0; n < n_sym; ++n) {
        for (int i = 0; i < m; ++i) {
            Complex acc{0.0, 0.0};
            for (int l = 0; l < n_sym; ++l) {
                const Complex cn = std::conj(ct[static_cast<size_t>(n) * n_sym + l]);
                for (int k = 0; k < m; ++k)
                    acc += y.at(l, k) * cn * std::conj(dt[static_cast<size_t>(i) * m + k]);
            }
            out.at(n, i) = scale * acc;
        }
    }
    return out;
}

}  // namespace ddcrb
