#include <doctest.h>

#include <numbers>
#include <random>

#include "ddcrb/otfs.hpp"
#include "oracles.hpp"

using namespace ddcrb;

TEST_CASE("sfft maps all-zero symbols to the zero DD vector") {
    const OtfsGrid g = oracles::make_grid(4, 4);
    const DdVector y = sfft(TfSymbols::zeros(g), g);
    for (const Complex& v : y.values) CHECK(v == Complex(0.0, 0.0));
}

TEST_CASE("sfft preserves power (checked against the direct double sum)") {
    const OtfsGrid g = oracles::make_grid(4, 4);
    std::mt19937_64 rng(42);
    const TfSymbols x = oracles::random_symbols(g, rng);
    const DdVector y = sfft(x, g);

    CHECK(oracles::rel_err(y.power(), x.power()) < 1e-12);
    // value-level cross-check against the independent evaluation
    CHECK(oracles::rel_l2(y, oracles::naive_sfft(x, g)) < 1e-12);
}

TEST_CASE("a single unit TF symbol spreads with magnitude 1/sqrt(MN)") {
    const OtfsGrid g = oracles::make_grid(8, 4);
    TfSymbols x = TfSymbols::zeros(g);
    x.at(0, 0) = Complex(1.0, 0.0);
    const DdVector y = sfft(x, g);
    const double expect = 1.0 / std::sqrt(32.0);
    for (const Complex& v : y.values) CHECK(std::abs(v) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("isfft inverts sfft elementwise") {
    const OtfsGrid g = oracles::make_grid(8, 8);
    std::mt19937_64 rng(7);
    const TfSymbols x = oracles::random_symbols(g, rng);
    const TfSymbols back = isfft(sfft(x, g), g);
    const double cap = 1e-10 * oracles::max_abs(x);
    for (size_t c = 0; c < x.values.size(); ++c)
        CHECK(std::abs(back.values[c] - x.values[c]) <= cap);
}

TEST_CASE("isfft of zero is zero; of a DD impulse is a constant-modulus TF grid") {
    const OtfsGrid g = oracles::make_grid(4, 8);
    const TfSymbols z = isfft(DdVector::zeros(g), g);
    for (const Complex& v : z.values) CHECK(v == Complex(0.0, 0.0));

    DdVector impulse = DdVector::zeros(g);
    impulse.at(0, 0) = Complex(1.0, 0.0);
    const TfSymbols x = isfft(impulse, g);
    const double expect = 1.0 / std::sqrt(32.0);
    for (const Complex& v : x.values) CHECK(std::abs(v) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("phase term special values") {
    const OtfsGrid g = oracles::make_grid(8, 8);
    // n = i = 0 kills both terms
    CHECK(dd_phase(0, 0, 3, 5, 123.0, 4.5e-5, g) == 0.0);
    // nu = tau = 0 at cell (0,0)
    CHECK(dd_phase(2, 3, 0, 0, 0.0, 0.0, g) == 0.0);
    // n = 1, nu*T = 0.25, l = 0, i = 0  ->  pi/2
    OtfsGrid gq = g;
    gq.symbol_duration = 0.25;  // nu = 1 Hz below
    const double phi = dd_phase(1, 0, 0, 7, 1.0, 3.3e-5, gq);
    CHECK(phi == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("sfft is unitary and linear on random inputs") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const OtfsGrid g = oracles::make_grid(dim(rng), dim(rng));
        const TfSymbols x = oracles::random_symbols(g, rng);
        const TfSymbols y = oracles::random_symbols(g, rng);

        const DdVector fx = sfft(x, g);
        CHECK(std::abs(fx.power() - x.power()) <= 1e-10 * x.power());

        const Complex a(gauss(rng), gauss(rng));
        const Complex b(gauss(rng), gauss(rng));
        TfSymbols combo = TfSymbols::zeros(g);
        for (size_t c = 0; c < combo.values.size(); ++c)
            combo.values[c] = a * x.values[c] + b * y.values[c];
        const DdVector f_combo = sfft(combo, g);
        const DdVector fy = sfft(y, g);
        double num = 0.0, den = 0.0;
        for (size_t c = 0; c < f_combo.values.size(); ++c) {
            const Complex want = a * fx.values[c] + b * fy.values[c];
            num += std::norm(f_combo.values[c] - want);
            den += std::norm(want);
        }
        CHECK(std::sqrt(num) <= 1e-10 * std::sqrt(den));
    }
}

TEST_CASE("sfft matches the independent direct evaluation on non-square grids") {
    std::mt19937_64 rng(99);
    for (auto [m, n] : {std::pair{3, 5}, {1, 6}, {7, 1}, {5, 4}}) {
        const OtfsGrid g = oracles::make_grid(m, n);
        const TfSymbols x = oracles::random_symbols(g, rng);
        CHECK(oracles::rel_l2(sfft(x, g), oracles::naive_sfft(x, g)) < 1e-12);
    }
}

TEST_CASE("shape mismatches are rejected") {
    const OtfsGrid g = oracles::make_grid(4, 4);
    CHECK_THROWS_AS(sfft(TfSymbols(4, 3), g), std::invalid_argument);
    CHECK_THROWS_AS(isfft(DdVector(4, 3), g), std::invalid_argument);
    OtfsGrid bad = g;
    bad.delta_f = 0.0;
    CHECK_THROWS_AS(sfft(TfSymbols::zeros(g), bad), std::domain_error);
}
