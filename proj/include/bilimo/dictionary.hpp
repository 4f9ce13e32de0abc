#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bilimo/model.hpp"

namespace bilimo {

// Index map between the transmitter-major layout c~ (m, i, n) and the
// tone-major layout c (i, m, n):  c = P c~.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<Eigen::Index> to_c);

    // Layout induced by a radar configuration.
    static Permutation tone_major(int M, int N, int L);

    Eigen::Index size() const { return static_cast<Eigen::Index>(to_c_.size()); }
    Eigen::Index operator[](Eigen::Index k) const { return to_c_[k]; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& ctilde) const;          // P c~
    Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& c) const;       // P^T c
    Eigen::MatrixXd matrix() const;

private:
    std::vector<Eigen::Index> to_c_;
};

struct DictionaryOptions {
    bool dense = true;                             // materialise Phi
    std::size_t memory_cap_bytes = std::size_t{1} << 31;
};

// Steering matrices U_m (N x MN), V_m (L x ML), the stacked dictionary
// Phi = [V_0 (x) U_0; ...] and the c~ -> c permutation. Immutable after build.
class SteeringDictionary {
public:
    SteeringDictionary(const RadarConfig& cfg, DictionaryOptions options = {});

    const RadarConfig& config() const { return cfg_; }
    const std::vector<Eigen::MatrixXcd>& U() const { return U_; }
    const std::vector<Eigen::MatrixXcd>& V() const { return V_; }
    const Permutation& permutation() const { return perm_; }

    bool has_dense() const { return phi_.size() > 0; }
    const Eigen::MatrixXcd& phi() const;  // throws if built matrix-free

    Eigen::Index rows() const { return cfg_.samples(); }
    Eigen::Index cols() const { return cfg_.grid_size(); }

    // Matrix-free Kronecker products (OpenMP over transmitters).
    Eigen::VectorXcd apply(const Eigen::VectorXcd& a) const;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& ctilde) const;

private:
    RadarConfig cfg_;
    std::vector<Eigen::MatrixXcd> U_;
    std::vector<Eigen::MatrixXcd> V_;
    Permutation perm_;
    Eigen::MatrixXcd phi_;
};

SteeringDictionary build_dictionary(const RadarConfig& cfg, DictionaryOptions options = {});

// Closed-form Fourier coefficients c_{m,n}[i] of an on-grid scene, in c~ order.
// Independent of Phi; used as the correctness oracle for the dictionary.
Eigen::VectorXcd eval_c_direct(const TargetScene& scene, const RadarConfig& cfg);

double coherence(const Eigen::MatrixXcd& A);

// Unitary L-point DFT, F(k, t) = exp(-j 2 pi k t / L) / sqrt(L).
Eigen::MatrixXcd dft_matrix(int L);

// y = (F_L^H (x) I_P) x and its adjoint (F_L (x) I_P) y.
Eigen::VectorXcd apply_fbar(int P, int L, const Eigen::VectorXcd& x);
Eigen::VectorXcd apply_fbar_adjoint(int P, int L, const Eigen::VectorXcd& y);
// Dense Fbar (PL x PL); for tests and small references only.
Eigen::MatrixXcd fbar_matrix(int P, int L);

}  // namespace bilimo
