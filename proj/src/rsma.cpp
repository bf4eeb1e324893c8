#include "ddcrb/rsma.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ddcrb {

namespace {

double squared_mag(const Complex& z) { return std::norm(z); }

void check_sinr_args(const Eigen::RowVectorXcd& w, const Eigen::MatrixXcd& h,
                     const Precoders& pre, double sigma_n_sq) {
    pre.validate();
    if (!(sigma_n_sq > 0.0)) throw std::domain_error("sinr: sigma_n_sq must be > 0");
    if (h.rows() != h.cols() || h.rows() != pre.dd_size())
        throw std::invalid_argument("sinr: channel dimensions do not match precoders");
    if (w.size() != h.rows())
        throw std::invalid_argument("sinr: filter length does not match channel");
}

}  // namespace

double Precoders::total_power() const {
    double p = common.squaredNorm();
    for (const auto& v : privates) p += v.squaredNorm();
    return p;
}

void Precoders::validate() const {
    if (common.size() == 0) throw std::invalid_argument("Precoders: empty common precoder");
    for (const auto& v : privates)
        if (v.size() != common.size())
            throw std::invalid_argument("Precoders: private precoder length mismatch");
    if (!(total_power() > 0.0)) throw std::domain_error("Precoders: total power must be > 0");
}

Eigen::MatrixXcd draw_channel_estimate(const Eigen::MatrixXcd& h_true, double sigma_e_sq,
                                       std::uint64_t seed) {
    if (sigma_e_sq < 0.0)
        throw std::domain_error("draw_channel_estimate: sigma_e_sq must be >= 0");
    if (sigma_e_sq == 0.0) return h_true;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_e_sq / 2.0));
    Eigen::MatrixXcd h = h_true;
    for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            h(r, c) += Complex(re, im);
        }
    return h;
}

LmmseFilters lmmse_filters(const Eigen::MatrixXcd& h_est, const Precoders& pre,
                           double sigma_n_sq, double sigma_e_sq) {
    pre.validate();
    if (!(sigma_n_sq > 0.0)) throw std::domain_error("lmmse_filters: sigma_n_sq must be > 0");
    if (sigma_e_sq < 0.0) throw std::domain_error("lmmse_filters: sigma_e_sq must be >= 0");
    const Eigen::Index n = pre.dd_size();
    if (h_est.rows() != n || h_est.cols() != n)
        throw std::invalid_argument("lmmse_filters: channel dimensions do not match precoders");

    const double floor_var = sigma_n_sq + sigma_e_sq * pre.total_power();
    const Eigen::VectorXcd effective_common = h_est * pre.common;
    std::vector<Eigen::VectorXcd> effective_private;
    effective_private.reserve(pre.privates.size());
    for (const auto& p : pre.privates) effective_private.push_back(h_est * p);

    // Private-stream design covariance excludes the common stream.
    Eigen::MatrixXcd cov_private =
        floor_var * Eigen::MatrixXcd::Identity(n, n);
    for (const auto& v : effective_private) cov_private += v * v.adjoint();
    const Eigen::MatrixXcd cov_full =
        cov_private + effective_common * effective_common.adjoint();

    Eigen::LLT<Eigen::MatrixXcd> llt_full(cov_full);
    if (llt_full.info() != Eigen::Success)
        throw std::runtime_error("lmmse_filters: covariance factorization failed");
    Eigen::LLT<Eigen::MatrixXcd> llt_private(cov_private);
    if (llt_private.info() != Eigen::Success)
        throw std::runtime_error("lmmse_filters: private covariance factorization failed");

    LmmseFilters out;
    out.common = llt_full.solve(effective_common).adjoint();
    out.privates.reserve(pre.privates.size());
    for (const auto& v : effective_private)
        out.privates.push_back(llt_private.solve(v).adjoint());
    return out;
}

double sinr_common(const SinrInputs& inp, const Eigen::MatrixXcd& h_est, const Precoders& pre,
                   double sigma_n_sq, double sigma_e_sq) {
    check_sinr_args(inp.w_common, h_est, pre, sigma_n_sq);
    if (sigma_e_sq < 0.0) throw std::domain_error("sinr_common: sigma_e_sq must be >= 0");

    const Eigen::RowVectorXcd wh = inp.w_common * h_est;
    const double numerator = squared_mag((wh * pre.common)(0));
    double denominator = 0.0;
    for (const auto& p : pre.privates) denominator += squared_mag((wh * p)(0));
    denominator += inp.w_common.squaredNorm() * (sigma_n_sq + sigma_e_sq * pre.total_power());
    return numerator / denominator;
}

double sinr_private(const SinrInputs& inp, const Eigen::MatrixXcd& h_est, const Precoders& pre,
                    int user, double sigma_n_sq, double sigma_e_sq) {
    check_sinr_args(inp.w_private, h_est, pre, sigma_n_sq);
    if (sigma_e_sq < 0.0) throw std::domain_error("sinr_private: sigma_e_sq must be >= 0");
    if (user < 0 || user >= pre.users())
        throw std::invalid_argument("sinr_private: user index out of range");
    if (!(inp.theta >= 0.0 && inp.theta <= 1.0))
        throw std::domain_error("sinr_private: theta must be in [0,1]");

    const Eigen::RowVectorXcd wh = inp.w_private * h_est;
    const double numerator = squared_mag((wh * pre.privates[user])(0));
    double denominator = 0.0;
    for (int j = 0; j < pre.users(); ++j) {
        if (j == user) continue;
        denominator += squared_mag((wh * pre.privates[j])(0));
    }
    denominator += inp.theta * squared_mag((wh * pre.common)(0));
    denominator += inp.w_private.squaredNorm() * (sigma_n_sq + sigma_e_sq * pre.total_power());
    return numerator / denominator;
}

Eigen::MatrixXcd make_dd_channel(const OtfsGrid& grid, int paths, std::uint64_t seed) {
    grid.validate();
    if (paths < 1) throw std::domain_error("make_dd_channel: paths must be >= 1");

    const int m = grid.m_delay_bins;
    const int n_sym = grid.n_doppler_bins;
    const int n = grid.dd_size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> delay_shift(0, m - 1);
    std::uniform_int_distribution<int> doppler_shift(0, n_sym - 1);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 / paths));

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int p = 0; p < paths; ++p) {
        const int dk = delay_shift(rng);
        const int dl = doppler_shift(rng);
        const double re = gauss(rng);
        const double im = gauss(rng);
        const Complex path_gain(re, im);
        for (int l = 0; l < n_sym; ++l)
            for (int k = 0; k < m; ++k) {
                const int row = ((l + dl) % n_sym) * m + (k + dk) % m;
                const int col = l * m + k;
                h(row, col) += path_gain;
            }
    }
    return h;
}

Precoders make_precoders(int dd_size, int users, double total_power, double common_share,
                         std::uint64_t seed) {
    if (dd_size < 1) throw std::domain_error("make_precoders: dd_size must be >= 1");
    if (users < 0) throw std::domain_error("make_precoders: users must be >= 0");
    if (!(total_power > 0.0)) throw std::domain_error("make_precoders: total_power must be > 0");
    if (!(common_share >= 0.0 && common_share <= 1.0))
        throw std::domain_error("make_precoders: common_share must be in [0,1]");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    auto draw = [&](double target_power) {
        Eigen::VectorXcd v(dd_size);
        for (int idx = 0; idx < dd_size; ++idx) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v(idx) = Complex(re, im);
        }
        v *= std::sqrt(target_power) / v.norm();
        return v;
    };

    const double common_power = users == 0 ? total_power : total_power * common_share;
    const double private_power =
        users == 0 ? 0.0 : total_power * (1.0 - common_share) / users;

    Precoders pre;
    pre.common = draw(common_power);
    pre.privates.reserve(users);
    for (int k = 0; k < users; ++k) pre.privates.push_back(draw(private_power));
    return pre;
}

}  // namespace ddcrb
