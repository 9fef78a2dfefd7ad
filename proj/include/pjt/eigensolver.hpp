// eigensolver.hpp: lowest eigenpairs of a VibronicHamiltonian.
//
// Two routes: dense Householder/QL through Eigen for small problems and a
// restarted block Lanczos with full reorthogonalization for large ones. The
// block width exceeds the number of requested states so that degenerate
// multiplets are captured by the random start block.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pjt/hamiltonian.hpp"

namespace pjt {

enum class SolveMethod { Dense, Iterative, Auto };

inline constexpr Eigen::Index kDenseCrossover = 2000;  // auto: dense at or below this dimension
inline constexpr double kDegeneracyTolerance = 1e-6;   // meV
inline constexpr double kDefaultTolerance = 1e-8;      // meV, residual norm

struct SolveRequest {
    int num_states{1};
    SolveMethod method{SolveMethod::Auto};
    double tolerance{kDefaultTolerance};
    int max_iterations{1000};  // block Lanczos steps
    int block_size{0};         // 0 selects num_states + 2
};

struct EigenResult {
    Eigen::VectorXd energies;   // ascending
    Eigen::MatrixXd vectors;    // column i pairs with energies[i]
    Eigen::VectorXd residuals;  // ||H v - E v||
    int iterations_used{0};
    SolveMethod method_used{SolveMethod::Dense};
};

/// Raised when the requested tolerance is not met; carries the best estimates.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, Eigen::VectorXd energies, Eigen::VectorXd residuals)
        : std::runtime_error(what), energies_(std::move(energies)), residuals_(std::move(residuals)) {}

    const Eigen::VectorXd& best_energies() const noexcept { return energies_; }
    const Eigen::VectorXd& best_residuals() const noexcept { return residuals_; }

private:
    Eigen::VectorXd energies_;
    Eigen::VectorXd residuals_;
};

namespace detail {

inline Eigen::VectorXd residual_norms(const SparseMatrix& h, const Eigen::VectorXd& energies,
                                      const Eigen::MatrixXd& vectors) {
    const Eigen::MatrixXd hv = h * vectors;
    Eigen::VectorXd r(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i)
        r[i] = (hv.col(i) - energies[i] * vectors.col(i)).norm();
    return r;
}

inline std::string describe_failure(const char* route, double tol, const Eigen::VectorXd& res) {
    std::ostringstream os;
    os << route << ": residual " << res.maxCoeff() << " meV exceeds tolerance " << tol << " meV";
    return os.str();
}

/// Orthonormalizes the columns of `block` against basis(:, 0:used) and each
/// other (two Gram-Schmidt passes). Columns that collapse are dropped.
inline Eigen::MatrixXd orthonormalize_block(const Eigen::MatrixXd& basis, Eigen::Index used,
                                            const Eigen::MatrixXd& block) {
    Eigen::MatrixXd out(block.rows(), block.cols());
    Eigen::Index accepted = 0;
    const auto prev = basis.leftCols(used);
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        Eigen::VectorXd w = block.col(j);
        const double norm0 = w.norm();
        if (norm0 == 0.0)
            continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (used > 0)
                w -= prev * (prev.transpose() * w);
            if (accepted > 0)
                w -= out.leftCols(accepted) * (out.leftCols(accepted).transpose() * w);
        }
        const double norm = w.norm();
        if (norm <= 1e-10 * norm0)
            continue;
        out.col(accepted++) = w / norm;
    }
    return out.leftCols(accepted);
}

inline EigenResult solve_dense(const SparseMatrix& h, const SolveRequest& req) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success)
        throw SolverError("dense: eigendecomposition failed", {}, {});
    EigenResult out;
    out.energies = es.eigenvalues().head(req.num_states);
    out.vectors = es.eigenvectors().leftCols(req.num_states);
    out.residuals = residual_norms(h, out.energies, out.vectors);
    out.iterations_used = 1;
    out.method_used = SolveMethod::Dense;
    if ((out.residuals.array() > req.tolerance).any())
        throw SolverError(describe_failure("dense", req.tolerance, out.residuals), out.energies, out.residuals);
    return out;
}

inline EigenResult solve_block_lanczos(const SparseMatrix& h, const SolveRequest& req) {
    const Eigen::Index n = h.rows();
    const Eigen::Index k = req.num_states;
    const Eigen::Index b = std::min<Eigen::Index>(n, req.block_size > 0 ? req.block_size : k + 2);
    const Eigen::Index max_basis = std::min<Eigen::Index>(n, std::max<Eigen::Index>({8 * b, 3 * k + 4 * b, 120}));
    const Eigen::Index keep = std::min<Eigen::Index>(max_basis - b, std::max<Eigen::Index>(k + b, max_basis / 2));

    Eigen::MatrixXd v(n, max_basis);
    Eigen::MatrixXd hv(n, max_basis);
    Eigen::Index used = 0;

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    auto random_block = [&](Eigen::Index cols) {
        Eigen::MatrixXd r(n, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                r(i, j) = gauss(rng);
        return r;
    };

    Eigen::MatrixXd block = orthonormalize_block(v, used, random_block(b));
    Eigen::VectorXd best_energies = Eigen::VectorXd::Constant(k, std::nan(""));
    Eigen::VectorXd best_residuals = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());

    for (int iter = 1; iter <= req.max_iterations; ++iter) {
        const Eigen::Index add = block.cols();
        v.middleCols(used, add) = block;
        hv.middleCols(used, add) = h * block;
        used += add;

        // Rayleigh-Ritz on the current subspace.
        Eigen::MatrixXd t = v.leftCols(used).transpose() * hv.leftCols(used);
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
        const Eigen::Index nritz = std::min(used, std::max(k, b));
        const Eigen::VectorXd theta = small.eigenvalues().head(nritz);
        const Eigen::MatrixXd y = small.eigenvectors().leftCols(nritz);
        const Eigen::MatrixXd x = v.leftCols(used) * y;
        const Eigen::MatrixXd hx = hv.leftCols(used) * y;
        Eigen::MatrixXd r = hx - x * theta.asDiagonal();

        if (used >= k) {
            Eigen::VectorXd res(k);
            for (Eigen::Index i = 0; i < k; ++i)
                res[i] = r.col(i).norm();
            best_energies = theta.head(k);
            best_residuals = res;
            if ((res.array() <= req.tolerance).all()) {
                EigenResult out;
                out.energies = theta.head(k);
                out.vectors = x.leftCols(k);
                out.residuals = residual_norms(h, out.energies, out.vectors);
                out.iterations_used = iter;
                out.method_used = SolveMethod::Iterative;
                if ((out.residuals.array() <= req.tolerance).all())
                    return out;
                best_residuals = out.residuals;
            }
        }

        const Eigen::MatrixXd next_dir = hv.middleCols(used - add, add);
        if (used + b > max_basis) {
            // Restart from the lowest Ritz vectors; continue with their residuals.
            const Eigen::Index kk = std::min(keep, used);
            const Eigen::MatrixXd yk = small.eigenvectors().leftCols(kk);
            const Eigen::MatrixXd vk = v.leftCols(used) * yk;
            const Eigen::MatrixXd hvk = hv.leftCols(used) * yk;
            v.leftCols(kk) = vk;
            hv.leftCols(kk) = hvk;
            used = kk;
            block = orthonormalize_block(v, used, r.leftCols(std::min<Eigen::Index>(b, r.cols())));
        } else {
            block = orthonormalize_block(v, used, next_dir);
        }
        if (block.cols() == 0) {
            if (used >= n)
                break;
            block = orthonormalize_block(v, used, random_block(std::min(b, n - used)));
            if (block.cols() == 0)
                break;
        }
        if (used + block.cols() > max_basis)
            block = block.leftCols(max_basis - used);
    }
    throw SolverError(describe_failure("block lanczos", req.tolerance, best_residuals) + " after " +
                          std::to_string(req.max_iterations) + " iterations",
                      best_energies, best_residuals);
}

}  // namespace detail

/// Lowest `req.num_states` eigenpairs. Throws SolverError when any residual
/// exceeds the tolerance, std::invalid_argument on malformed requests.
inline EigenResult solve(const SparseMatrix& h, const SolveRequest& req) {
    if (req.num_states < 1 || req.num_states > h.rows())
        throw std::invalid_argument("solve: num_states must lie in [1, dimension]");
    if (!(req.tolerance > 0.0))
        throw std::invalid_argument("solve: tolerance must be > 0");
    if (req.max_iterations < 1)
        throw std::invalid_argument("solve: max_iterations must be >= 1");
    SolveMethod method = req.method;
    if (method == SolveMethod::Auto)
        method = h.rows() <= kDenseCrossover ? SolveMethod::Dense : SolveMethod::Iterative;
    return method == SolveMethod::Dense ? detail::solve_dense(h, req) : detail::solve_block_lanczos(h, req);
}

inline EigenResult solve(const VibronicHamiltonian& h, const SolveRequest& req) { return solve(h.matrix(), req); }

/// Half-open index ranges of energies chained within `tol` of their neighbour.
struct Multiplet {
    Eigen::Index begin{0};
    Eigen::Index size{1};
};

inline std::vector<Multiplet> degenerate_groups(const Eigen::VectorXd& energies, double tol = kDegeneracyTolerance) {
    std::vector<Multiplet> groups;
    for (Eigen::Index i = 0; i < energies.size(); ++i) {
        if (!groups.empty() && energies[i] - energies[i - 1] <= tol)
            ++groups.back().size;
        else
            groups.push_back({i, 1});
    }
    return groups;
}

struct ConvergenceRow {
    int cutoff{0};
    Eigen::VectorXd energies;
    std::string error;  // empty on success

    bool ok() const noexcept { return error.empty(); }
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double threshold{0.0};
    bool converged{false};  // last two successful ground energies closer than threshold
};

inline ConvergenceTable converge_cutoff(const PjtParams& params, const SolveRequest& req,
                                        const std::vector<int>& cutoffs, double threshold) {
    if (cutoffs.size() < 2)
        throw std::invalid_argument("converge_cutoff: need at least two cutoffs");
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end()) ||
        std::adjacent_find(cutoffs.begin(), cutoffs.end()) != cutoffs.end())
        throw std::invalid_argument("converge_cutoff: cutoffs must be strictly ascending");
    ConvergenceTable table;
    table.threshold = threshold;
    for (int cutoff : cutoffs) {
        ConvergenceRow row;
        row.cutoff = cutoff;
        try {
            const auto h = assemble(params, FockBasis(cutoff));
            SolveRequest r = req;
            r.num_states = std::min<int>(req.num_states, static_cast<int>(h.dimension()));
            row.energies = solve(h, r).energies;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    const ConvergenceRow* last = nullptr;
    const ConvergenceRow* prev = nullptr;
    for (const auto& row : table.rows)
        if (row.ok()) {
            prev = last;
            last = &row;
        }
    table.converged = prev && std::abs(last->energies[0] - prev->energies[0]) < threshold;
    return table;
}

}  // namespace pjt
