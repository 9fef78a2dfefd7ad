// fock_basis.hpp: truncated two-mode harmonic oscillator basis |n,m>, n+m <= N.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

namespace pjt {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Mode { X, Y };

struct FockState {
    int n{0};  // quanta in X
    int m{0};  // quanta in Y

    friend bool operator==(const FockState&, const FockState&) = default;
};

/// Basis of the E_g vibration truncated at `cutoff` total quanta.
///
/// States are ordered by ascending shell n+m, ties by ascending m, so shell k
/// occupies indices [k(k+1)/2, (k+1)(k+2)/2).
class FockBasis {
public:
    explicit FockBasis(int cutoff) : cutoff_(cutoff) {
        if (cutoff < 0)
            throw std::invalid_argument("FockBasis: cutoff must be nonnegative");
        states_.reserve(shell_offset(cutoff + 1));
        for (int k = 0; k <= cutoff; ++k)
            for (int m = 0; m <= k; ++m)
                states_.push_back({k - m, m});
    }

    int cutoff() const noexcept { return cutoff_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<FockState>& states() const noexcept { return states_; }
    const FockState& operator[](std::size_t i) const { return states_.at(i); }

    bool contains(FockState s) const noexcept {
        return s.n >= 0 && s.m >= 0 && s.n + s.m <= cutoff_;
    }

    std::size_t index(FockState s) const {
        if (!contains(s))
            throw std::out_of_range("FockBasis: state outside truncated basis");
        return shell_offset(s.n + s.m) + static_cast<std::size_t>(s.m);
    }

    /// First index of shell k (number of states with n+m < k).
    static constexpr std::size_t shell_offset(int k) noexcept {
        const auto kk = static_cast<std::size_t>(k);
        return kk * (kk + 1) / 2;
    }

    /// (N+1)(N+2)/2
    static constexpr std::size_t dimension_for(int cutoff) noexcept {
        return shell_offset(cutoff + 1);
    }

private:
    int cutoff_;
    std::vector<FockState> states_;
};

inline FockBasis build_basis(int cutoff) { return FockBasis(cutoff); }

/// Dimensionless (a^dag + a)/sqrt(2) for one mode. Elements that would raise a
/// state past the cutoff are dropped.
inline SparseMatrix position_operator(const FockBasis& basis, Mode mode) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState s = basis[i];
        const FockState up = mode == Mode::X ? FockState{s.n + 1, s.m} : FockState{s.n, s.m + 1};
        if (!basis.contains(up))
            continue;
        const int q = mode == Mode::X ? s.n : s.m;
        const double v = std::sqrt((q + 1) / 2.0);
        const auto j = static_cast<Eigen::Index>(basis.index(up));
        entries.emplace_back(static_cast<Eigen::Index>(i), j, v);
        entries.emplace_back(j, static_cast<Eigen::Index>(i), v);
    }
    SparseMatrix op(dim, dim);
    op.setFromTriplets(entries.begin(), entries.end());
    op.makeCompressed();
    return op;
}

/// Diagonal n + m + 1: total quanta plus the zero-point unit of both modes.
inline SparseMatrix number_operator(const FockBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState s = basis[i];
        const auto ii = static_cast<Eigen::Index>(i);
        entries.emplace_back(ii, ii, static_cast<double>(s.n + s.m + 1));
    }
    SparseMatrix op(dim, dim);
    op.setFromTriplets(entries.begin(), entries.end());
    op.makeCompressed();
    return op;
}

}  // namespace pjt
