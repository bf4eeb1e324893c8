#include "ddcrb/fim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phase_sums.hpp"

namespace ddcrb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double real_inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double acc = 0.0;
    for (size_t c = 0; c < a.size(); ++c)
        acc += a[c].real() * b[c].real() + a[c].imag() * b[c].imag();  // Re{conj(a)*b}
    return acc;
}

double power_of(const std::vector<Complex>& a) {
    double acc = 0.0;
    for (const Complex& v : a) acc += std::norm(v);
    return acc;
}

std::string singular_message(const Fim& fim, double det, double threshold) {
    std::ostringstream os;
    os << "FIM is singular: det = " << det << " <= threshold " << threshold;
    const bool doppler_zero = fim.i_nu_nu == 0.0;
    const bool delay_zero = fim.i_tau_tau == 0.0;
    if (doppler_zero && delay_zero)
        os << " (both diagonal entries are zero)";
    else if (doppler_zero)
        os << " (i_nu_nu is zero: the pilot carries no Doppler information)";
    else if (delay_zero)
        os << " (i_tau_tau is zero: the pilot carries no delay information)";
    return os.str();
}

}  // namespace

double Fim::min_eigenvalue() const {
    const double half_diff = 0.5 * (i_tau_tau - i_nu_nu);
    const double radius = std::sqrt(half_diff * half_diff + i_tau_nu * i_tau_nu);
    return 0.5 * (i_tau_tau + i_nu_nu) - radius;
}

SingularFim::SingularFim(const Fim& fim, double det, double threshold)
    : std::runtime_error(singular_message(fim, det, threshold)),
      doppler_zero_(fim.i_nu_nu == 0.0),
      delay_zero_(fim.i_tau_tau == 0.0),
      det_(det),
      threshold_(threshold) {}

FimSums fim_sums(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid) {
    grid.validate();
    p.validate();
    if (!x.shape_matches(grid))
        throw std::invalid_argument("fim_sums: TF symbol shape does not match grid");

    const auto raw = detail::all_phase_sums(x, p.nu_t, p.tau_t, grid);

    // Scaled vectors, same construction as derivative_bundle.
    const double root_mn = std::sqrt(static_cast<double>(grid.dd_size()));
    const Complex base = p.gain.alpha_at(p.tau_t) * p.beta_t / root_mn;
    const Complex doppler_scale = Complex(0.0, kTwoPi * grid.symbol_duration) * base;
    const Complex delay_scale = Complex(0.0, -kTwoPi * grid.delta_f) * base;

    std::vector<Complex> mean(raw.unit.size()), d_doppler(raw.unit.size()),
        d_phase_delay(raw.unit.size());
    for (size_t c = 0; c < raw.unit.size(); ++c) {
        mean[c] = base * raw.unit[c];
        d_doppler[c] = doppler_scale * raw.doppler[c];
        d_phase_delay[c] = delay_scale * raw.delay[c];
    }

    FimSums s;
    s.s_n = power_of(raw.doppler);
    s.s_i = power_of(raw.delay);
    s.p_mu = power_of(mean);
    s.c_tau_nu = real_inner(d_phase_delay, d_doppler);
    s.c_mu_tau = real_inner(mean, d_phase_delay);
    s.c_mu_nu = real_inner(mean, d_doppler);
    return s;
}

Fim fim_assemble(const FimSums& s, const EchoParams& p, const OtfsGrid& grid) {
    grid.validate();
    p.validate();

    const double mn = static_cast<double>(grid.dd_size());
    const double sigma = p.sigma_echo_sq;
    const double tau = p.tau_t;
    const double gain_sq = std::norm(p.gain.alpha_at(tau)) * std::norm(p.beta_t);
    const double wt = kTwoPi * grid.symbol_duration;  // 2*pi*T
    const double wf = kTwoPi * grid.delta_f;          // 2*pi*df

    // Each term carries its own 1/sigma so noise scaling stays exact.
    Fim f;
    f.i_nu_nu = 2.0 * wt * wt * gain_sq * s.s_n / (mn * sigma);
    f.i_tau_tau = 8.0 * s.p_mu / (sigma * tau * tau) +
                  2.0 * wf * wf * gain_sq * s.s_i / (mn * sigma) -
                  8.0 * s.c_mu_tau / (sigma * tau);
    f.i_tau_nu = 2.0 * s.c_tau_nu / sigma - 4.0 * s.c_mu_nu / (sigma * tau);
    return f;
}

CrbResult crb_from_fim(const Fim& f) {
    const double det = f.det();
    const double threshold = 1e-12 * std::max(f.i_tau_tau * f.i_nu_nu, 1.0);
    if (!(det > threshold)) throw SingularFim(f, det, threshold);

    CrbResult r;
    r.fim = f;
    r.det_fim = det;
    r.crb_tau = f.i_nu_nu / det;
    r.crb_nu = f.i_tau_tau / det;
    return r;
}

CrbResult crb_pipeline(const TfSymbols& x, const EchoParams& p, const OtfsGrid& grid) {
    return crb_from_fim(fim_assemble(fim_sums(x, p, grid), p, grid));
}

}  // namespace ddcrb
