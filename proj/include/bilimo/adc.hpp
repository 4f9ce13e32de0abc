#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bilimo/model.hpp"

namespace bilimo {

struct QuantizerSpec {
    int b = 2;             // levels per real dimension, power of two
    double gamma = 1.0;    // support
    bool dither = true;    // non-subtractive uniform dither on [-step/2, step/2]

    double step() const { return 2.0 * gamma / b; }
    void validate() const;
};

// Mid-rise level -gamma + step (l + 1/2); |x| > gamma saturates to sign(x)(gamma - gamma/b).
double quantize_real(double x, const QuantizerSpec& spec);

struct QuantizeStats {
    std::uint64_t saturated = 0;  // real dimensions with |x + dither| > gamma
    std::uint64_t samples = 0;    // real dimensions processed
};

// Re and Im quantized independently, dither (if enabled) added before the quantizer.
Eigen::VectorXcd quantize_complex_vector(const Eigen::VectorXcd& v, const QuantizerSpec& spec, Rng& rng,
                                         QuantizeStats* stats = nullptr);

// 2 P L log2(b)
long bits_per_pri(int P, int L, int b);
// 2^floor(budget / (2 P L)); throws below one bit per real sample.
int levels_from_budget(long budget_bits, long P, long L);

}  // namespace bilimo
