// hamiltonian.hpp: (e_g x e_u) x E_g product Jahn-Teller Hamiltonian.
//
// Electronic determinant ordering (hole picture, index 0..3):
//   |e_uy e_gy>, |e_ux e_gy>, |e_uy e_gx>, |e_ux e_gx>
// The full vibronic matrix lives on determinant (x) Fock space with the
// electronic index varying slowest: row = electronic * D_ph + phonon.
// Energies are in meV; configuration coordinates are dimensionless.

#pragma once

#include <array>
#include <climits>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pjt/fock_basis.hpp"

namespace pjt {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

struct PjtParams {
    double hbar_omega{0.0};   // effective E_g phonon quantum
    double lambda_corr{0.0};  // A1u/A2u placement, +-Lambda
    double xi_corr{0.0};      // Eu placement, -Xi
    double f_g{0.0};          // e_g orbital vibronic coupling
    double f_u{0.0};          // e_u orbital vibronic coupling
};

/// Throws std::invalid_argument naming the first offending field.
inline void validate(const PjtParams& p) {
    auto check = [](double v, const char* name, bool strictly_positive) {
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be finite");
        if (strictly_positive ? !(v > 0.0) : v < 0.0)
            throw std::invalid_argument(std::string(name) + (strictly_positive ? " must be > 0" : " must be >= 0"));
    };
    check(p.hbar_omega, "hbar_omega", true);
    check(p.lambda_corr, "lambda_corr", false);
    check(p.xi_corr, "xi_corr", false);
    check(p.f_g, "f_g", false);
    check(p.f_u, "f_u", false);
}

enum class Symmetry : int { A2u = 0, A1u = 1, Eux = 2, Euy = 3 };

/// Fixed electronic labeling and the orthogonal map to the symmetry-adapted
/// triplets. Row i of `transform()` is symmetry state i (A2u, A1u, Eux, Euy)
/// expanded over the determinants.
struct ElectronicBasis {
    static constexpr std::array<const char*, 4> determinant_labels{
        "|e_uy e_gy>", "|e_ux e_gy>", "|e_uy e_gx>", "|e_ux e_gx>"};
    static constexpr std::array<const char*, 4> symmetry_labels{"3A2u", "3A1u", "3Eux", "3Euy"};

    static Matrix4 transform() {
        const double s = std::sqrt(0.5);
        Matrix4 u;
        u << s, 0, 0, s,    // A2u = (ux gx + uy gy)/sqrt2
            0, s, -s, 0,    // A1u = (ux gy - uy gx)/sqrt2
            -s, 0, 0, s,    // Eux = (ux gx - uy gy)/sqrt2
            0, s, s, 0;     // Euy = (ux gy + uy gx)/sqrt2
        return u;
    }

    static Vector4 symmetry_state(Symmetry which) {
        return transform().row(static_cast<int>(which)).transpose();
    }
};

/// Static correlation term: +Lambda on A1u, -Lambda on A2u, -Xi on both Eu.
inline Matrix4 w_matrix(const PjtParams& p) {
    Matrix4 lam;
    lam << -1, 0, 0, -1,
        0, 1, -1, 0,
        0, -1, 1, 0,
        -1, 0, 0, -1;
    Matrix4 xi;
    xi << 1, 0, 0, -1,
        0, 1, 1, 0,
        0, 1, 1, 0,
        -1, 0, 0, 1;
    return 0.5 * p.lambda_corr * lam - 0.5 * p.xi_corr * xi;
}

/// Electronic matrix multiplying X (diagonal) or Y (off-diagonal) in the
/// linear pJT coupling.
inline Matrix4 pjt_coupling_block(const PjtParams& p, Mode which) {
    Matrix4 b = Matrix4::Zero();
    if (which == Mode::X) {
        b.diagonal() << p.f_u + p.f_g, -(p.f_u - p.f_g), p.f_u - p.f_g, -(p.f_u + p.f_g);
    } else {
        b(0, 1) = b(1, 0) = p.f_u;
        b(2, 3) = b(3, 2) = p.f_u;
        b(0, 2) = b(2, 0) = p.f_g;
        b(1, 3) = b(3, 1) = p.f_g;
    }
    return b;
}

class VibronicHamiltonian {
public:
    VibronicHamiltonian(FockBasis basis, PjtParams params, SparseMatrix matrix)
        : basis_(std::move(basis)), params_(params), matrix_(std::move(matrix)) {}

    const FockBasis& basis() const noexcept { return basis_; }
    const PjtParams& params() const noexcept { return params_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dimension() const noexcept { return matrix_.rows(); }

    std::size_t flat_index(int electronic, std::size_t phonon) const noexcept {
        return static_cast<std::size_t>(electronic) * basis_.size() + phonon;
    }

private:
    FockBasis basis_;
    PjtParams params_;
    SparseMatrix matrix_;
};

// Row bound: diagonal + 4 electronic x (X: 2, Y: 2) phonon neighbours.
inline constexpr std::int64_t kMaxRowNonZeros = 1 + 4 * 4;

/// True when the vibronic matrix for `cutoff` is addressable by the sparse
/// storage index (int).
inline bool assembly_fits_index(int cutoff) noexcept {
    if (cutoff < 0)
        return false;
    const auto n = static_cast<std::int64_t>(cutoff) + 1;
    const std::int64_t dim = 4 * (n * (n + 1) / 2);
    return dim * kMaxRowNonZeros <= INT_MAX;
}

/// hbar_omega (I4 x N) + B_X x X + B_Y x Y + W x I_ph
inline VibronicHamiltonian assemble(const PjtParams& params, const FockBasis& basis) {
    validate(params);
    if (!assembly_fits_index(basis.cutoff()))
        throw std::overflow_error("assemble: cutoff " + std::to_string(basis.cutoff()) +
                                  " overflows the sparse index type");
    const std::int64_t dph = static_cast<std::int64_t>(basis.size());
    constexpr std::int64_t max_row_nnz = kMaxRowNonZeros;

    const SparseMatrix num = number_operator(basis);
    const SparseMatrix xop = position_operator(basis, Mode::X);
    const SparseMatrix yop = position_operator(basis, Mode::Y);
    const Matrix4 bx = pjt_coupling_block(params, Mode::X);
    const Matrix4 by = pjt_coupling_block(params, Mode::Y);
    const Matrix4 w = w_matrix(params);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(4 * dph * max_row_nnz));
    auto add_kron = [&](const Matrix4& elec, const SparseMatrix& phon) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                if (elec(a, b) == 0.0)
                    continue;
                for (Eigen::Index r = 0; r < phon.outerSize(); ++r)
                    for (SparseMatrix::InnerIterator it(phon, r); it; ++it)
                        entries.emplace_back(a * dph + it.row(), b * dph + it.col(), elec(a, b) * it.value());
            }
    };
    add_kron(params.hbar_omega * Matrix4::Identity(), num);
    add_kron(bx, xop);
    add_kron(by, yop);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (w(a, b) != 0.0)
                for (std::int64_t p = 0; p < dph; ++p)
                    entries.emplace_back(a * dph + p, b * dph + p, w(a, b));

    const auto dim = static_cast<Eigen::Index>(4 * dph);
    SparseMatrix h(dim, dim);
    h.setFromTriplets(entries.begin(), entries.end());
    h.makeCompressed();
    return VibronicHamiltonian(basis, params, std::move(h));
}

struct ApesPoint {
    double x{0.0};
    double y{0.0};
    Vector4 energies;  // ascending
    Matrix4 vectors;   // column i: sheet i in determinant basis
};

/// Adiabatic sheets at a frozen (x, y): eigenpairs of
/// hbar_omega (x^2+y^2)/2 + x B_X + y B_Y + W.
inline ApesPoint classical_apes(const PjtParams& params, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("classical_apes: coordinates must be finite");
    const Matrix4 h = 0.5 * params.hbar_omega * (x * x + y * y) * Matrix4::Identity() +
                      x * pjt_coupling_block(params, Mode::X) + y * pjt_coupling_block(params, Mode::Y) +
                      w_matrix(params);
    Eigen::SelfAdjointEigenSolver<Matrix4> es(h);
    return {x, y, es.eigenvalues(), es.eigenvectors()};
}

struct JahnTellerEnergies {
    double e_jt1{0.0};  // constructive channel, (F_g + F_u)^2 / 2hw
    double e_jt2{0.0};  // destructive channel, (F_g - F_u)^2 / 2hw
};

inline JahnTellerEnergies ejt_from_couplings(const PjtParams& p) {
    const double sum = p.f_g + p.f_u;
    const double diff = p.f_g - p.f_u;
    return {sum * sum / (2.0 * p.hbar_omega), diff * diff / (2.0 * p.hbar_omega)};
}

struct Couplings {
    double f_g{0.0};
    double f_u{0.0};
};

/// Inverse of ejt_from_couplings. The JT energies fix F_g + F_u and
/// |F_g - F_u| only; `u_dominant` picks F_u >= F_g.
inline Couplings couplings_from_ejt(double e_jt1, double e_jt2, double hbar_omega, bool u_dominant = true) {
    if (!(hbar_omega > 0.0))
        throw std::invalid_argument("couplings_from_ejt: hbar_omega must be > 0");
    if (e_jt2 < 0.0 || e_jt1 < 0.0)
        throw std::invalid_argument("couplings_from_ejt: Jahn-Teller energies must be >= 0");
    if (e_jt2 > e_jt1)
        throw std::invalid_argument("couplings_from_ejt: e_jt2 exceeds e_jt1");
    const double f_sum = std::sqrt(2.0 * hbar_omega * e_jt1);
    const double f_diff = std::sqrt(2.0 * hbar_omega * e_jt2);
    const double lo = 0.5 * (f_sum - f_diff);
    const double hi = 0.5 * (f_sum + f_diff);
    return u_dominant ? Couplings{lo, hi} : Couplings{hi, lo};
}

}  // namespace pjt
