#include "ddcrb/echo.hpp"

#include <cmath>
#include <numbers>

#include "phase_sums.hpp"

namespace ddcrb {

namespace detail {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Twiddles {
    std::vector<Complex> shift_n;  // e^{+j2pi*n*nu*T}
    std::vector<Complex> shift_i;  // e^{-j2pi*i*tau*df}
    std::vector<Complex> grid_nl;  // e^{-j2pi*n*l/N}
    std::vector<Complex> grid_ik;  // e^{+j2pi*i*k/M}
};

Twiddles make_twiddles(double nu, double tau, const OtfsGrid& grid) {
    const int m = grid.m_delay_bins;
    const int n_sym = grid.n_doppler_bins;
    Twiddles t;
    t.shift_n.resize(n_sym);
    for (int n = 0; n < n_sym; ++n)
        t.shift_n[n] = std::polar(1.0, kTwoPi * n * nu * grid.symbol_duration);
    t.shift_i.resize(m);
    for (int i = 0; i < m; ++i)
        t.shift_i[i] = std::polar(1.0, -kTwoPi * i * tau * grid.delta_f);
    t.grid_nl.resize(static_cast<size_t>(n_sym) * n_sym);
    for (int n = 0; n < n_sym; ++n)
        for (int l = 0; l < n_sym; ++l) {
            const long long r = (static_cast<long long>(n) * l) % n_sym;
            t.grid_nl[static_cast<size_t>(n) * n_sym + l] =
                std::polar(1.0, -kTwoPi * static_cast<double>(r) / n_sym);
        }
    t.grid_ik.resize(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            const long long r = (static_cast<long long>(i) * k) % m;
            t.grid_ik[static_cast<size_t>(i) * m + k] =
                std::polar(1.0, kTwoPi * static_cast<double>(r) / m);
        }
    return t;
}

// pre[n,i] = w(n,i) * X[n,i] * e^{j2pi(n*nu*T - i*tau*df)}
std::vector<Complex> premodulate(const TfSymbols& x, const Twiddles& t, IndexWeight weight) {
    const int m = x.m_cols;
    const int n_sym = x.n_rows;
    std::vector<Complex> pre(x.values.size());
    for (int n = 0; n < n_sym; ++n)
        for (int i = 0; i < m; ++i) {
            double w = 1.0;
            if (weight == IndexWeight::doppler) w = n;
            else if (weight == IndexWeight::delay) w = i;
            pre[static_cast<size_t>(n) * m + i] = w * x.at(n, i) * t.shift_n[n] * t.shift_i[i];
        }
    return pre;
}

std::vector<Complex> accumulate_cells(const std::vector<Complex>& pre, const Twiddles& t, int m,
                                      int n_sym) {
    std::vector<Complex> out(static_cast<size_t>(m) * n_sym);
    for (int l = 0; l < n_sym; ++l)
        for (int k = 0; k < m; ++k) {
            Complex acc{0.0, 0.0};
            for (int n = 0; n < n_sym; ++n) {
                const Complex cn = t.grid_nl[static_cast<size_t>(n) * n_sym + l];
                for (int i = 0; i < m; ++i)
                    acc += pre[static_cast<size_t>(n) * m + i] * cn *
                           t.grid_ik[static_cast<size_t>(i) * m + k];
            }
            out[static_cast<size_t>(l) * m + k] = acc;
        }
    return out;
}

}  // namespace

std::vector<Complex> weighted_phase_sums(const TfSymbols& x, double nu, double tau,
                                         const OtfsGrid& grid, IndexWeight weight) {
    const auto t = make_twiddles(nu, tau, grid);
    return accumulate_cells(premodulate(x, t, weight), t, grid.m_delay_bins,
                            grid.n_doppler_bins);
}

PhaseSums all_phase_sums(const TfSymbols& x, double nu, double tau, const OtfsGrid& grid) {
    const auto t = make_twiddles(nu, tau, grid);
    PhaseSums s;
    s.unit = accumulate_cells(premodulate(x, t, IndexWeight::unit), t, grid.m_delay_bins,
                              grid.n_doppler_bins);
    s.doppler = accumulate_cells(premodulate(x, t, IndexWeight::doppler), t, grid.m_delay_bins,
                                 grid.n_doppler_bins);
    s.delay = accumulate_cells(premodulate(x, t, IndexWeight::delay), t, grid.m_delay_bins,
                               grid.n_doppler_bins);
    return s;
}

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_inputs(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid) {
    grid.validate();
    p.validate();
    if (!x.shape_matches(grid))
        throw std::invalid_argument("echo model: TF symbol shape does not match grid");
}

DdVector scaled(const std::vector<Complex>& raw, Complex scale, const OtfsGrid& grid) {
    DdVector out(grid.n_doppler_bins, grid.m_delay_bins);
    for (size_t c = 0; c < raw.size(); ++c) out.values[c] = scale * raw[c];
    return out;
}

}  // namespace

DdVector mean_dd_signal(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid) {
    check_inputs(x, p, grid);
    const auto raw = detail::weighted_phase_sums(x, p.nu_t, p.tau_t, grid,
                                                 detail::IndexWeight::unit);
    const Complex scale = p.gain.alpha_at(p.tau_t) * p.beta_t /
                          std::sqrt(static_cast<double>(grid.dd_size()));
    return scaled(raw, scale, grid);
}

DdVector doppler_derivative(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid) {
    check_inputs(x, p, grid);
    const auto raw = detail::weighted_phase_sums(x, p.nu_t, p.tau_t, grid,
                                                 detail::IndexWeight::doppler);
    const Complex scale = Complex(0.0, kTwoPi * grid.symbol_duration) *
                          (p.gain.alpha_at(p.tau_t) * p.beta_t) /
                          std::sqrt(static_cast<double>(grid.dd_size()));
    return scaled(raw, scale, grid);
}

DerivativeBundle derivative_bundle(const TfSymbols& x, const EchoParams& p,
                                   const OtfsGrid& grid) {
    check_inputs(x, p, grid);
    const auto sums = detail::all_phase_sums(x, p.nu_t, p.tau_t, grid);
    const double root_mn = std::sqrt(static_cast<double>(grid.dd_size()));
    const Complex base = p.gain.alpha_at(p.tau_t) * p.beta_t / root_mn;

    DerivativeBundle b;
    b.mean = scaled(sums.unit, base, grid);
    b.d_doppler = scaled(sums.doppler, Complex(0.0, kTwoPi * grid.symbol_duration) * base, grid);
    b.d_phase_delay = scaled(sums.delay, Complex(0.0, -kTwoPi * grid.delta_f) * base, grid);

    const double gain_factor = -2.0 / p.tau_t;
    b.d_gain = DdVector(grid.n_doppler_bins, grid.m_delay_bins);
    b.d_delay = DdVector(grid.n_doppler_bins, grid.m_delay_bins);
    for (size_t c = 0; c < b.mean.values.size(); ++c) {
        b.d_gain.values[c] = gain_factor * b.mean.values[c];
        b.d_delay.values[c] = b.d_gain.values[c] + b.d_phase_delay.values[c];
    }
    return b;
}

}  // namespace ddcrb
