#include "ddcrb/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "ddcrb/otfs.hpp"

namespace ddcrb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate_config(const McConfig& cfg) {
    if (cfg.trials < 1) throw std::domain_error("McConfig: trials must be >= 1");
    if (cfg.tau_search.count < 1 || cfg.nu_search.count < 1)
        throw std::domain_error("McConfig: search counts must be >= 1");
    if (cfg.tau_search.min_value > cfg.tau_search.max_value ||
        cfg.nu_search.min_value > cfg.nu_search.max_value)
        throw std::domain_error("McConfig: search range min exceeds max");
    if (cfg.refine && (cfg.tau_search.count < 3 || cfg.nu_search.count < 3))
        throw std::domain_error("McConfig: refine requires >= 3 nodes per axis");
}

// 3-point quadratic interpolation offset in units of the grid step,
// clamped to half a step either side.
double parabola_offset(double left, double center, double right) {
    const double denom = left - 2.0 * center + right;
    if (!(denom > 0.0)) return 0.0;  // flat or non-convex triple
    const double d = 0.5 * (left - right) / denom;
    return std::clamp(d, -0.5, 0.5);
}

void run_trials(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int t = 0; t < count; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next.fetch_add(1); t < count; t = next.fetch_add(1)) body(t);
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, count);
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

DdVector fd_derivative(const std::function<DdVector(double)>& f, double at, double step) {
    if (!(step > 0.0)) throw std::domain_error("fd_derivative: step must be > 0");
    const DdVector plus = f(at + step);
    const DdVector minus = f(at - step);
    if (plus.values.size() != minus.values.size())
        throw std::invalid_argument("fd_derivative: inconsistent vector lengths from f");

    DdVector out(plus.n_doppler, plus.m_delay);
    const double inv = 1.0 / (2.0 * step);
    for (size_t c = 0; c < out.values.size(); ++c)
        out.values[c] = (plus.values[c] - minus.values[c]) * inv;
    return out;
}

Fim numeric_fim(const DdVector& j_tau, const DdVector& j_nu, double sigma_sq) {
    if (j_tau.values.size() != j_nu.values.size())
        throw std::invalid_argument("numeric_fim: derivative vector length mismatch");
    if (!(sigma_sq > 0.0)) throw std::domain_error("numeric_fim: sigma_sq must be > 0");

    double tt = 0.0, nn = 0.0, tn = 0.0;
    for (size_t c = 0; c < j_tau.values.size(); ++c) {
        const Complex& a = j_tau.values[c];
        const Complex& b = j_nu.values[c];
        tt += std::norm(a);
        nn += std::norm(b);
        tn += a.real() * b.real() + a.imag() * b.imag();  // Re{conj(a)*b}
    }
    Fim f;
    f.i_tau_tau = 2.0 * tt / sigma_sq;
    f.i_nu_nu = 2.0 * nn / sigma_sq;
    f.i_tau_nu = 2.0 * tn / sigma_sq;
    return f;
}

/**
 * The search objective ||y - mu(tau,nu)||^2 expands to
 *
 *   ||y||^2 - 2 Re{<y, mu>} + |alpha(tau)|^2 |beta|^2 ||X||^2
 *
 * and <y, mu(tau,nu)> = alpha*beta * sum_{n,i} X[n,i] * conj(isfft(y)[n,i])
 * * e^{j2pi(n*nu*T - i*tau*df)}, so one adjoint transform of y makes each
 * grid node an O(MN) evaluation instead of O((MN)^2).
 */
MlEstimate ml_estimate(const DdVector& y, const TfSymbols& x, const GainModel& gain,
                       Complex beta, const McConfig& cfg, const OtfsGrid& grid) {
    grid.validate();
    validate_config(cfg);
    if (!y.shape_matches(grid))
        throw std::invalid_argument("ml_estimate: observation length does not match grid");
    if (!x.shape_matches(grid))
        throw std::invalid_argument("ml_estimate: TF symbol shape does not match grid");

    const int m = grid.m_delay_bins;
    const int n_sym = grid.n_doppler_bins;
    const int n_tau = cfg.tau_search.count;
    const int n_nu = cfg.nu_search.count;

    // xw[n,i] = X[n,i] * conj(isfft(y)[n,i])
    const TfSymbols y_adj = isfft(y, grid);
    std::vector<Complex> xw(x.values.size());
    for (size_t c = 0; c < xw.size(); ++c) xw[c] = x.values[c] * std::conj(y_adj.values[c]);

    const double y_power = y.power();
    const double x_power = x.power();
    const double beta_sq = std::norm(beta);

    // Doppler shift tables per nu node: e^{j2pi*n*nu*T}
    std::vector<Complex> doppler_tab(static_cast<size_t>(n_nu) * n_sym);
    for (int jn = 0; jn < n_nu; ++jn) {
        const double nu = cfg.nu_search.node(jn);
        for (int n = 0; n < n_sym; ++n)
            doppler_tab[static_cast<size_t>(jn) * n_sym + n] =
                std::polar(1.0, kTwoPi * n * nu * grid.symbol_duration);
    }

    std::vector<double> objective(static_cast<size_t>(n_tau) * n_nu);
    std::vector<Complex> row_sums(n_sym);
    int best_flat = 0;
    double best_obj = std::numeric_limits<double>::infinity();

    for (int it = 0; it < n_tau; ++it) {
        const double tau = cfg.tau_search.node(it);
        const Complex alpha = gain.alpha_at(tau);
        const double signal_power = std::norm(alpha) * beta_sq * x_power;

        // row_sums[n] = sum_i xw[n,i] * e^{-j2pi*i*tau*df}
        for (int n = 0; n < n_sym; ++n) {
            Complex acc{0.0, 0.0};
            for (int i = 0; i < m; ++i)
                acc += xw[static_cast<size_t>(n) * m + i] *
                       std::polar(1.0, -kTwoPi * i * tau * grid.delta_f);
            row_sums[n] = acc;
        }

        for (int jn = 0; jn < n_nu; ++jn) {
            Complex inner{0.0, 0.0};
            const Complex* tab = &doppler_tab[static_cast<size_t>(jn) * n_sym];
            for (int n = 0; n < n_sym; ++n) inner += tab[n] * row_sums[n];
            const Complex cross = alpha * beta * inner;
            const double obj = y_power - 2.0 * cross.real() + signal_power;
            const size_t flat = static_cast<size_t>(it) * n_nu + jn;
            objective[flat] = obj;
            if (obj < best_obj) {  // strict: ties keep the lowest flat index
                best_obj = obj;
                best_flat = static_cast<int>(flat);
            }
        }
    }

    const int best_tau_idx = best_flat / n_nu;
    const int best_nu_idx = best_flat % n_nu;

    MlEstimate est;
    est.tau_on_boundary = best_tau_idx == 0 || best_tau_idx == n_tau - 1;
    est.nu_on_boundary = best_nu_idx == 0 || best_nu_idx == n_nu - 1;
    est.tau_hat = cfg.tau_search.node(best_tau_idx);
    est.nu_hat = cfg.nu_search.node(best_nu_idx);

    if (cfg.refine) {
        auto obj_at = [&](int it, int jn) { return objective[static_cast<size_t>(it) * n_nu + jn]; };
        if (!est.tau_on_boundary) {
            const double d = parabola_offset(obj_at(best_tau_idx - 1, best_nu_idx),
                                             obj_at(best_tau_idx, best_nu_idx),
                                             obj_at(best_tau_idx + 1, best_nu_idx));
            est.tau_hat += d * cfg.tau_search.step();
        }
        if (!est.nu_on_boundary) {
            const double d = parabola_offset(obj_at(best_tau_idx, best_nu_idx - 1),
                                             obj_at(best_tau_idx, best_nu_idx),
                                             obj_at(best_tau_idx, best_nu_idx + 1));
            est.nu_hat += d * cfg.nu_search.step();
        }
    }
    return est;
}

McReport run_mc(const EchoParams& p, const TfSymbols& x, const McConfig& cfg,
                const OtfsGrid& grid, int threads) {
    grid.validate();
    p.validate();
    validate_config(cfg);
    if (p.tau_t < cfg.tau_search.min_value || p.tau_t > cfg.tau_search.max_value)
        throw std::domain_error("run_mc: tau search range does not contain tau_t");
    if (p.nu_t < cfg.nu_search.min_value || p.nu_t > cfg.nu_search.max_value)
        throw std::domain_error("run_mc: nu search range does not contain nu_t");

    const DdVector mean = mean_dd_signal(x, p, grid);
    const double mean_power = mean.power();
    const double mn = static_cast<double>(grid.dd_size());

    EchoParams effective = p;
    if (cfg.snr_db) {
        effective.sigma_echo_sq = mean_power / (mn * std::pow(10.0, *cfg.snr_db / 10.0));
        if (!(effective.sigma_echo_sq > 0.0))
            throw std::domain_error("run_mc: requested SNR yields a non-positive noise variance");
    }
    const double sigma_sq = effective.sigma_echo_sq;

    const CrbResult crb = crb_pipeline(x, effective, grid);  // may throw SingularFim

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }

    std::vector<double> err_tau(cfg.trials), err_nu(cfg.trials);
    std::vector<char> hit_boundary(cfg.trials, 0);
    const double noise_std = std::sqrt(sigma_sq / 2.0);

    run_trials(cfg.trials, threads, [&](int trial) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(trial));
        std::normal_distribution<double> gauss(0.0, noise_std);
        DdVector y(grid.n_doppler_bins, grid.m_delay_bins);
        for (size_t c = 0; c < y.values.size(); ++c) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            y.values[c] = mean.values[c] + Complex(re, im);
        }
        const MlEstimate est = ml_estimate(y, x, p.gain, p.beta_t, cfg, grid);
        err_tau[trial] = est.tau_hat - p.tau_t;
        err_nu[trial] = est.nu_hat - p.nu_t;
        hit_boundary[trial] = est.tau_on_boundary || est.nu_on_boundary;
    });

    // Reduce in trial order so the report is independent of the schedule.
    McReport rep;
    double sq_tau = 0.0, sq_nu = 0.0, sum_tau = 0.0, sum_nu = 0.0;
    int boundary = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        sq_tau += err_tau[t] * err_tau[t];
        sq_nu += err_nu[t] * err_nu[t];
        sum_tau += err_tau[t];
        sum_nu += err_nu[t];
        boundary += hit_boundary[t];
    }
    rep.trials_used = cfg.trials;
    rep.boundary_hits = boundary;
    rep.mse_tau = sq_tau / cfg.trials;
    rep.mse_nu = sq_nu / cfg.trials;
    rep.bias_tau = sum_tau / cfg.trials;
    rep.bias_nu = sum_nu / cfg.trials;
    rep.crb_tau = crb.crb_tau;
    rep.crb_nu = crb.crb_nu;
    rep.ratio_tau = rep.mse_tau / crb.crb_tau;
    rep.ratio_nu = rep.mse_nu / crb.crb_nu;
    rep.sigma_echo_sq_used = sigma_sq;
    rep.snr_db_used = 10.0 * std::log10(mean_power / (mn * sigma_sq));
    return rep;
}

}  // namespace ddcrb
