#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace ddcrb {

using Complex = std::complex<double>;

/**
 * OTFS delay-Doppler lattice parameters.
 *
 * M delay bins (subcarriers) x N Doppler bins (TF symbols), subcarrier
 * spacing delta_f and symbol duration T. The DD grid holds N_dd = M*N
 * cells. T * delta_f == 1 is NOT required; both values are independent.
 */
struct OtfsGrid {
    int m_delay_bins = 0;          // M
    int n_doppler_bins = 0;        // N
    double delta_f = 0.0;          // subcarrier spacing [Hz]
    double symbol_duration = 0.0;  // T [s]

    int dd_size() const { return m_delay_bins * n_doppler_bins; }

    void validate() const {
        if (m_delay_bins < 1) throw std::domain_error("OtfsGrid: m_delay_bins must be >= 1");
        if (n_doppler_bins < 1) throw std::domain_error("OtfsGrid: n_doppler_bins must be >= 1");
        if (!(delta_f > 0.0)) throw std::domain_error("OtfsGrid: delta_f must be > 0");
        if (!(symbol_duration > 0.0)) throw std::domain_error("OtfsGrid: symbol_duration must be > 0");
    }

    bool operator==(const OtfsGrid&) const = default;
};

/**
 * Time-frequency symbol matrix X[n,i].
 *
 * n in [0,N) indexes TF symbols (rows), i in [0,M) indexes subcarriers
 * (columns). Stored row-major: values[n*M + i].
 */
struct TfSymbols {
    int n_rows = 0;  // N
    int m_cols = 0;  // M
    std::vector<Complex> values;

    TfSymbols() = default;
    TfSymbols(int n, int m) : n_rows(n), m_cols(m), values(static_cast<size_t>(n) * m) {}

    static TfSymbols zeros(const OtfsGrid& grid) {
        return TfSymbols(grid.n_doppler_bins, grid.m_delay_bins);
    }

    Complex& at(int n, int i) { return values[static_cast<size_t>(n) * m_cols + i]; }
    const Complex& at(int n, int i) const { return values[static_cast<size_t>(n) * m_cols + i]; }

    bool shape_matches(const OtfsGrid& grid) const {
        return n_rows == grid.n_doppler_bins && m_cols == grid.m_delay_bins &&
               values.size() == static_cast<size_t>(grid.dd_size());
    }

    // sum of |X[n,i]|^2
    double power() const {
        double p = 0.0;
        for (const Complex& v : values) p += std::norm(v);
        return p;
    }
};

/**
 * Delay-Doppler domain vector.
 *
 * Flat cell id = l*M + k with Doppler index l in [0,N) outer and delay
 * index k in [0,M) inner. The flat ordering is part of the contract;
 * every DD-valued quantity in this library uses it.
 */
struct DdVector {
    int n_doppler = 0;  // N
    int m_delay = 0;    // M
    std::vector<Complex> values;

    DdVector() = default;
    DdVector(int n, int m) : n_doppler(n), m_delay(m), values(static_cast<size_t>(n) * m) {}

    static DdVector zeros(const OtfsGrid& grid) {
        return DdVector(grid.n_doppler_bins, grid.m_delay_bins);
    }

    int size() const { return static_cast<int>(values.size()); }

    Complex& at(int l, int k) { return values[static_cast<size_t>(l) * m_delay + k]; }
    const Complex& at(int l, int k) const { return values[static_cast<size_t>(l) * m_delay + k]; }

    bool shape_matches(const OtfsGrid& grid) const {
        return n_doppler == grid.n_doppler_bins && m_delay == grid.m_delay_bins &&
               values.size() == static_cast<size_t>(grid.dd_size());
    }

    // sum of |y[l,k]|^2
    double power() const {
        double p = 0.0;
        for (const Complex& v : values) p += std::norm(v);
        return p;
    }
};

}  // namespace ddcrb
