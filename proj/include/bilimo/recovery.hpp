#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bilimo/model.hpp"

namespace bilimo {

// Matrix-free linear map; forward is rows x cols.
struct LinearOperator {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> forward;
    std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> adjoint;

    static LinearOperator dense(const Eigen::MatrixXcd& A);
};

struct RecoverySpec {
    double rho = -1.0;         // < 0: use rho_scale * ||A^H s||_inf
    double rho_scale = 0.05;
    int max_iter = 300;
    double tol = 1e-5;
    bool debias = false;       // least squares on the estimated support
    int k_hint = -1;
    double lipschitz = 0.0;    // 0: estimate by power iteration

    void validate() const;
};

// Largest eigenvalue of A^H A by power iteration (fixed start vector),
// scaled by 1.01 because the iterate underestimates it.
double lipschitz_constant(const LinearOperator& A, int iterations = 30, double tol = 1e-6);

// v max(1 - t/|v|, 0), elementwise.
Eigen::VectorXcd shrink(const Eigen::VectorXcd& v, double t);

struct FistaResult {
    Eigen::VectorXcd x;
    int iterations = 0;
    bool converged = false;
    double rho = 0.0;
    double objective = 0.0;
    std::vector<double> history;  // objective per iteration
};

double lasso_objective(const LinearOperator& A, const Eigen::VectorXcd& s, const Eigen::VectorXcd& x, double rho);

// Monotone FISTA for min 1/2 ||s - A x||^2 + rho ||x||_1.
FistaResult fista(const LinearOperator& A, const Eigen::VectorXcd& s, const RecoverySpec& spec,
                  bool keep_history = false);

// K largest |a| entries as (delay_index, angle_index), ties to the lower flat index.
std::vector<std::pair<int, int>> estimate_support(const Eigen::VectorXcd& a, int K, const RadarConfig& cfg);
std::vector<Eigen::Index> largest_entries(const Eigen::VectorXcd& a, int K);

double hit_rate(const TargetScene& scene, const std::vector<std::pair<int, int>>& estimated);

double relative_mse(const Eigen::VectorXcd& truth, const Eigen::VectorXcd& estimate);

// Least-squares refit of the entries in `support`.
Eigen::VectorXcd debias(const LinearOperator& A, const Eigen::VectorXcd& s, const std::vector<Eigen::Index>& support);

struct BoundResult {
    bool condition_holds = false;
    double k_limit = 0.0;  // (1/mu + 1) / 4
    double bound = 0.0;    // valid only when condition_holds
};

// (eps_L + eps_o + eps~) / (1 - (4K - 1) mu) when K < (1/mu + 1)/4.
BoundResult recovery_error_bound(int K, double mu, double eps_lmmse, double eps_emse, double eps_tilde);

}  // namespace bilimo
