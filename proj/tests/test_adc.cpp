#include <doctest.h>

#include <map>

#include "bilimo/adc.hpp"
#include "helpers.hpp"

using namespace bilimo;

TEST_CASE("quantize_real examples") {
    const QuantizerSpec q2{2, 1.0, false};
    CHECK(quantize_real(0.3, q2) == 0.5);
    CHECK(quantize_real(-0.7, q2) == -0.5);
    CHECK(quantize_real(1.5, q2) == 0.5);
    CHECK(quantize_real(-1.5, q2) == -0.5);
    const QuantizerSpec q4{4, 1.0, false};
    CHECK(quantize_real(0.1, q4) == 0.25);
    CHECK(quantize_real(0.9, q4) == 0.75);
    CHECK(quantize_real(-0.6, q4) == -0.75);
    CHECK(quantize_real(1.0, q4) == 0.75);  // boundary stays in the top cell
    CHECK(quantize_real(-1.0, q4) == -0.75);
}

TEST_CASE("quantizer spec validation") {
    CHECK_THROWS((QuantizerSpec{3, 1.0, true}.validate()));
    CHECK_THROWS((QuantizerSpec{1, 1.0, true}.validate()));
    CHECK_THROWS((QuantizerSpec{4, 0.0, true}.validate()));
    CHECK_NOTHROW((QuantizerSpec{8, 0.1, true}.validate()));
    CHECK(QuantizerSpec{8, 2.0, true}.step() == 0.5);
}

TEST_CASE("levels are fixed points without dither") {
    const QuantizerSpec q{8, 2.0, false};
    Eigen::VectorXcd v(8);
    for (int l = 0; l < 8; ++l) {
        const double lev = -2.0 + q.step() * (l + 0.5);
        v[l] = cplx(lev, -lev);
    }
    Rng rng(1);
    CHECK(quantize_complex_vector(v, q, rng) == v);
}

TEST_CASE("zero input with dither splits evenly") {
    const QuantizerSpec q{2, 1.0, true};
    Rng rng(2);
    const Eigen::VectorXcd z = quantize_complex_vector(Eigen::VectorXcd::Zero(100000), q, rng);
    int pos = 0;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        CHECK((std::abs(z[k].real()) == 0.5 && std::abs(z[k].imag()) == 0.5));
        pos += z[k].real() > 0;
    }
    CHECK(pos / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("dithered error statistics") {
    const QuantizerSpec q{4, 1.0, true};
    const double step = q.step();
    Rng rng(3);
    std::normal_distribution<double> g(0.0, 0.2);
    const int n = 1000000;
    Eigen::VectorXcd v(n / 2);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double re, im;
        do re = g(rng); while (std::abs(re) + step / 2 > q.gamma);
        do im = g(rng); while (std::abs(im) + step / 2 > q.gamma);
        v[k] = {re, im};
    }
    QuantizeStats st;
    const Eigen::VectorXcd z = quantize_complex_vector(v, q, rng, &st);
    CHECK(st.samples == std::uint64_t(n));
    CHECK(st.saturated == 0);
    double e2 = 0.0, ex = 0.0, x2 = 0.0, e1 = 0.0, x1 = 0.0, worst = 0.0;
    std::map<double, int> alphabet;
    for (Eigen::Index k = 0; k < v.size(); ++k)
        for (auto [x, y] : {std::pair{v[k].real(), z[k].real()}, std::pair{v[k].imag(), z[k].imag()}}) {
            const double e = y - x;
            e2 += e * e;
            e1 += e;
            ex += e * x;
            x1 += x;
            x2 += x * x;
            worst = std::max(worst, std::abs(e));
            alphabet[y]++;
        }
    CHECK(e2 / n == doctest::Approx(step * step / 6.0).epsilon(0.03));
    const double cov = ex / n - (e1 / n) * (x1 / n);
    const double corr = cov / std::sqrt((e2 / n - e1 * e1 / n / n) * (x2 / n - x1 * x1 / n / n));
    CHECK(std::abs(corr) <= 0.01);
    CHECK(worst <= step);
    CHECK(alphabet.size() == 4);
    for (auto [lev, cnt] : alphabet) {
        const double l = (lev + q.gamma) / step - 0.5;
        CHECK(l == std::round(l));
    }
}

TEST_CASE("undithered error bound") {
    const QuantizerSpec q{8, 1.0, false};
    Rng rng(4);
    std::uniform_real_distribution<double> u(-1.0 + q.step() / 2, 1.0 - q.step() / 2);
    for (int k = 0; k < 10000; ++k) {
        const double x = u(rng);
        CHECK(std::abs(quantize_real(x, q) - x) <= q.step() / 2 + 1e-15);
    }
}

TEST_CASE("saturation at the designed support") {
    // complex input with unit total power per P channels: std per real dim 1/sqrt(2P), gamma = 2/sqrt(P)
    const int P = 48;
    const QuantizerSpec q{4, 2.0 / std::sqrt(double(P)), true};
    Rng rng(5);
    Eigen::VectorXcd v(200000);
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = complex_normal(rng, 1.0 / P);
    QuantizeStats st;
    quantize_complex_vector(v, q, rng, &st);
    CHECK(double(st.saturated) / double(st.samples) <= 0.06);
}

TEST_CASE("bit budget arithmetic") {
    CHECK(levels_from_budget(1728, 48, 9) == 4);
    CHECK(levels_from_budget(1728, 24, 9) == 16);
    CHECK(levels_from_budget(1728, 96, 9) == 2);
    CHECK(bits_per_pri(1, 1, 2) == 2);
    CHECK(bits_per_pri(48, 9, 4) == 1728);
    CHECK_THROWS(levels_from_budget(1727, 96, 9));
    CHECK_THROWS(bits_per_pri(1, 1, 3));
    for (int b : {2, 4, 8, 16}) CHECK(levels_from_budget(bits_per_pri(6, 3, b), 6, 3) == b);
}
