#include "bilimo/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bilimo {

LinearOperator LinearOperator::dense(const Eigen::MatrixXcd& A) {
    LinearOperator op;
    op.rows = A.rows();
    op.cols = A.cols();
    op.forward = [A](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return A * x; };
    op.adjoint = [A](const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return A.adjoint() * y; };
    return op;
}

void RecoverySpec::validate() const {
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (rho < 0.0 && !(rho_scale >= 0.0)) throw std::invalid_argument("rho_scale must be nonnegative");
}

double lipschitz_constant(const LinearOperator& A, int iterations, double tol) {
    // deterministic, non-degenerate start
    Eigen::VectorXcd v(A.cols);
    for (Eigen::Index k = 0; k < A.cols; ++k) v[k] = std::polar(1.0, 0.7 * double(k) + 0.1 * double(k * k % 13));
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd w = A.adjoint(A.forward(v));
        const double next = w.norm();
        if (!std::isfinite(next)) throw std::domain_error("power iteration diverged");
        if (next == 0.0) throw std::domain_error("zero operator");
        v = w / next;
        const bool done = std::abs(next - est) <= tol * next;
        est = next;
        if (done) break;
    }
    return 1.01 * est;
}

Eigen::VectorXcd shrink(const Eigen::VectorXcd& v, double t) {
    Eigen::VectorXcd out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double mag = std::abs(v[k]);
        out[k] = mag > t ? v[k] * (1.0 - t / mag) : cplx(0.0, 0.0);
    }
    return out;
}

double lasso_objective(const LinearOperator& A, const Eigen::VectorXcd& s, const Eigen::VectorXcd& x, double rho) {
    return 0.5 * (s - A.forward(x)).squaredNorm() + rho * x.cwiseAbs().sum();
}

FistaResult fista(const LinearOperator& A, const Eigen::VectorXcd& s, const RecoverySpec& spec, bool keep_history) {
    spec.validate();
    if (s.size() != A.rows) throw std::invalid_argument("fista: measurement length mismatch");
    if (!s.allFinite()) throw std::domain_error("fista: non-finite measurements");
    const double Lf = spec.lipschitz > 0.0 ? spec.lipschitz : lipschitz_constant(A);

    FistaResult res;
    res.rho = spec.rho >= 0.0 ? spec.rho : spec.rho_scale * A.adjoint(s).cwiseAbs().maxCoeff();
    const double rho = res.rho;

    // x, A x for the current and previous accepted iterate; y and A y for the extrapolation
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(A.cols), x_prev = x;
    Eigen::VectorXcd Ax = Eigen::VectorXcd::Zero(A.rows), Ax_prev = Ax;
    Eigen::VectorXcd y = x, Ay = Ax;
    double fx = 0.5 * s.squaredNorm();
    double t = 1.0;

    for (int it = 1; it <= spec.max_iter; ++it) {
        const Eigen::VectorXcd grad = A.adjoint(Ay - s);
        const Eigen::VectorXcd z = shrink(y - grad / Lf, rho / Lf);
        const Eigen::VectorXcd Az = A.forward(z);
        const double fz = 0.5 * (s - Az).squaredNorm() + rho * z.cwiseAbs().sum();
        if (!std::isfinite(fz)) throw std::domain_error("fista: objective became non-finite");

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        x_prev = x;
        Ax_prev = Ax;
        const bool accept = fz <= fx;
        if (accept) {
            x = z;
            Ax = Az;
            fx = fz;
        }
        // y = x + (t/t') (z - x) + ((t - 1)/t') (x - x_prev)
        const double a = t / t_next, c = (t - 1.0) / t_next;
        y = x + a * (z - x) + c * (x - x_prev);
        Ay = Ax + a * (Az - Ax) + c * (Ax - Ax_prev);
        t = t_next;

        if (keep_history) res.history.push_back(fx);
        res.iterations = it;
        if (accept) {
            const double change = (x - x_prev).norm();
            const double scale = std::max(x.norm(), std::numeric_limits<double>::min());
            if (change <= spec.tol * scale) {
                res.converged = true;
                break;
            }
        }
    }
    res.objective = fx;
    res.x = std::move(x);
    return res;
}

std::vector<Eigen::Index> largest_entries(const Eigen::VectorXcd& a, int K) {
    if (K < 0 || K > a.size()) throw std::invalid_argument("support size exceeds vector length");
    std::vector<Eigen::Index> idx(a.size());
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    const Eigen::VectorXd mag = a.cwiseAbs();
    std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](Eigen::Index i, Eigen::Index j) {
        return mag[i] > mag[j] || (mag[i] == mag[j] && i < j);
    });
    idx.resize(K);
    return idx;
}

std::vector<std::pair<int, int>> estimate_support(const Eigen::VectorXcd& a, int K, const RadarConfig& cfg) {
    std::vector<std::pair<int, int>> out;
    for (Eigen::Index k : largest_entries(a, K)) out.push_back(grid_cell(cfg, k));
    return out;
}

double hit_rate(const TargetScene& scene, const std::vector<std::pair<int, int>>& estimated) {
    if (scene.size() == 0) return 1.0;
    const std::set<std::pair<int, int>> est(estimated.begin(), estimated.end());
    int hits = 0;
    for (const auto& t : scene.targets) hits += est.count({t.delay_index, t.angle_index}) ? 1 : 0;
    return double(hits) / double(scene.size());
}

double relative_mse(const Eigen::VectorXcd& truth, const Eigen::VectorXcd& estimate) {
    if (truth.size() != estimate.size()) throw std::invalid_argument("relative_mse: length mismatch");
    const double ref = truth.squaredNorm();
    if (ref == 0.0) throw std::domain_error("relative_mse: zero reference vector");
    return (truth - estimate).squaredNorm() / ref;
}

Eigen::VectorXcd debias(const LinearOperator& A, const Eigen::VectorXcd& s, const std::vector<Eigen::Index>& support) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(A.cols);
    if (support.empty()) return out;
    Eigen::MatrixXcd As(A.rows, Eigen::Index(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(A.cols);
        e[support[j]] = 1.0;
        As.col(Eigen::Index(j)) = A.forward(e);
    }
    const Eigen::VectorXcd coef = As.colPivHouseholderQr().solve(s);
    for (std::size_t j = 0; j < support.size(); ++j) out[support[j]] = coef[Eigen::Index(j)];
    return out;
}

BoundResult recovery_error_bound(int K, double mu, double eps_lmmse, double eps_emse, double eps_tilde) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("coherence must lie in [0, 1]");
    BoundResult r;
    r.k_limit = mu > 0.0 ? (1.0 / mu + 1.0) / 4.0 : std::numeric_limits<double>::infinity();
    r.condition_holds = double(K) < r.k_limit;
    if (r.condition_holds) r.bound = (eps_lmmse + eps_emse + eps_tilde) / (1.0 - (4.0 * K - 1.0) * mu);
    return r;
}

}  // namespace bilimo
