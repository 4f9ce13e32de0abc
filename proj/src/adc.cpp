#include "bilimo/adc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace bilimo {

void QuantizerSpec::validate() const {
    if (b < 2 || !std::has_single_bit(unsigned(b))) throw std::invalid_argument("quantizer levels must be a power of two >= 2");
    if (!(gamma > 0.0)) throw std::invalid_argument("quantizer support must be positive");
}

double quantize_real(double x, const QuantizerSpec& spec) {
    const double step = spec.step();
    if (std::abs(x) > spec.gamma) return std::copysign(spec.gamma - spec.gamma / spec.b, x);
    const double l = std::clamp(std::floor((x + spec.gamma) / step), 0.0, double(spec.b - 1));
    return -spec.gamma + step * (l + 0.5);
}

Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd& v, const QuantizerSpec& spec, Rng& rng,
                                         QuantizeStats* stats) {
    spec.validate();
    const double half = spec.step() / 2.0;
    std::uniform_real_distribution<double> dither(-half, half);
    Eigen::VectorXcd z(v.size());
    std::uint64_t sat = 0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double re = v[k].real(), im = v[k].imag();
        if (spec.dither) {
            re += dither(rng);
            im += dither(rng);
        }
        sat += (std::abs(re) > spec.gamma) + (std::abs(im) > spec.gamma);
        z[k] = {quantize_real(re, spec), quantize_real(im, spec)};
    }
    if (stats) {
        stats->saturated += sat;
        stats->samples += 2 * std::uint64_t(v.size());
    }
    return z;
}

long bits_per_pri(int P, int L, int b) {
    if (P < 1 || L < 1 || b < 2 || !std::has_single_bit(unsigned(b))) throw std::invalid_argument("bits_per_pri: bad arguments");
    return 2L * P * L * std::countr_zero(unsigned(b));
}

int levels_from_budget(long budget_bits, long P, long L) {
    if (P < 1 || L < 1) throw std::invalid_argument("levels_from_budget: bad dimensions");
    const long per_sample = budget_bits / (2 * P * L);
    if (per_sample < 1) throw std::invalid_argument("bit budget is below one bit per real sample");
    if (per_sample > 30) throw std::invalid_argument("bit budget exceeds 30 bits per real sample");
    return 1 << per_sample;
}

}  // namespace bilimo
