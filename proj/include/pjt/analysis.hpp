// analysis.hpp: observables of vibronic eigenstates.
//
// Electronic character (A2u / A1u / Eu weights), the RMS distortion R, level
// labels, the A2u-Eu gap delta and the classical APES scan.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pjt/eigensolver.hpp"
#include "pjt/fock_basis.hpp"
#include "pjt/hamiltonian.hpp"

namespace pjt {

inline constexpr double kNormTolerance = 1e-8;
inline constexpr double kTruncationWarnWeight = 0.01;  // weight allowed in the top two shells

struct CharacterWeights {
    double a2u{0.0};
    double a1u{0.0};
    double eux{0.0};
    double euy{0.0};

    double eu() const noexcept { return eux + euy; }
    double sum() const noexcept { return a2u + a1u + eux + euy; }
};

enum class StateLabel { A2u, A1u, Eu, Mixed };

inline std::string_view label_name(StateLabel l) {
    switch (l) {
    case StateLabel::A2u: return "A2u";
    case StateLabel::A1u: return "A1u";
    case StateLabel::Eu: return "Eu";
    case StateLabel::Mixed: break;
    }
    return "mixed";
}

/// Character of a purely electronic 4-vector (determinant basis).
inline CharacterWeights electronic_character(const Vector4& coeffs) {
    const Vector4 s = ElectronicBasis::transform() * coeffs;
    const double norm2 = coeffs.squaredNorm();
    return {s[0] * s[0] / norm2, s[1] * s[1] / norm2, s[2] * s[2] / norm2, s[3] * s[3] / norm2};
}

/// Sums |<sym, n m|psi>|^2 over the phonon states for each symmetry label.
inline CharacterWeights electronic_character(const Eigen::Ref<const Eigen::VectorXd>& state,
                                             const FockBasis& basis) {
    const auto dph = static_cast<Eigen::Index>(basis.size());
    if (state.size() != 4 * dph)
        throw std::invalid_argument("electronic_character: vector length does not match 4 x basis size");
    if (std::abs(state.norm() - 1.0) > kNormTolerance)
        throw std::invalid_argument("electronic_character: state is not normalized");
    // Column p holds the four electronic amplitudes of phonon state p.
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 4>> blocks(state.data(), dph, 4);
    const Eigen::Matrix<double, 4, Eigen::Dynamic> sym = ElectronicBasis::transform() * blocks.transpose();
    const Vector4 w = sym.rowwise().squaredNorm();
    return {w[0], w[1], w[2], w[3]};
}

/// Basis-independent character of a degenerate multiplet: trace over the
/// subspace divided by its dimension.
inline CharacterWeights subspace_character(const Eigen::MatrixXd& vectors, Multiplet group, const FockBasis& basis) {
    CharacterWeights acc;
    for (Eigen::Index i = group.begin; i < group.begin + group.size; ++i) {
        const auto w = electronic_character(vectors.col(i), basis);
        acc.a2u += w.a2u;
        acc.a1u += w.a1u;
        acc.eux += w.eux;
        acc.euy += w.euy;
    }
    const double n = static_cast<double>(group.size);
    return {acc.a2u / n, acc.a1u / n, acc.eux / n, acc.euy / n};
}

struct Distortion {
    double r{0.0};                 // sqrt(<X^2 + Y^2>)
    double top_shell_weight{0.0};  // weight in shells N-1 and N
    bool truncation_warning{false};
};

class DistortionProbe {
public:
    explicit DistortionProbe(const FockBasis& basis)
        : basis_(basis), x_(position_operator(basis, Mode::X)), y_(position_operator(basis, Mode::Y)) {}

    /// <X^2 + Y^2> and top-shell weight for one normalized state.
    std::pair<double, double> moments(const Eigen::Ref<const Eigen::VectorXd>& state) const {
        const auto dph = static_cast<Eigen::Index>(basis_.size());
        if (state.size() != 4 * dph)
            throw std::invalid_argument("distortion_expectation: vector length does not match 4 x basis size");
        if (std::abs(state.norm() - 1.0) > kNormTolerance)
            throw std::invalid_argument("distortion_expectation: state is not normalized");
        const auto top_begin = static_cast<Eigen::Index>(FockBasis::shell_offset(std::max(0, basis_.cutoff() - 1)));
        double r2 = 0.0;
        double top = 0.0;
        for (Eigen::Index e = 0; e < 4; ++e) {
            const auto seg = state.segment(e * dph, dph);
            // X is symmetric, so <X^2> = |X psi|^2 within the truncated space.
            r2 += (x_ * seg).squaredNorm() + (y_ * seg).squaredNorm();
            top += seg.tail(dph - top_begin).squaredNorm();
        }
        return {r2, top};
    }

    Distortion operator()(const Eigen::Ref<const Eigen::VectorXd>& state) const {
        const auto [r2, top] = moments(state);
        return {std::sqrt(r2), top, top > kTruncationWarnWeight};
    }

    /// Average over a degenerate multiplet before taking the square root.
    Distortion operator()(const Eigen::MatrixXd& vectors, Multiplet group) const {
        double r2 = 0.0;
        double top = 0.0;
        for (Eigen::Index i = group.begin; i < group.begin + group.size; ++i) {
            const auto [a, b] = moments(vectors.col(i));
            r2 += a;
            top += b;
        }
        const double n = static_cast<double>(group.size);
        return {std::sqrt(r2 / n), top / n, top / n > kTruncationWarnWeight};
    }

private:
    FockBasis basis_;
    SparseMatrix x_;
    SparseMatrix y_;
};

inline Distortion distortion_expectation(const Eigen::Ref<const Eigen::VectorXd>& state, const FockBasis& basis) {
    return DistortionProbe(basis)(state);
}

/// Vibronic label. A doublet is Eu by symmetry (only E irreps are two-fold);
/// otherwise the label whose weight exceeds one half, Eu components pooled.
inline StateLabel classify(const CharacterWeights& w, Eigen::Index multiplicity) {
    if (multiplicity == 2)
        return StateLabel::Eu;
    if (w.a2u > 0.5)
        return StateLabel::A2u;
    if (w.a1u > 0.5)
        return StateLabel::A1u;
    if (w.eu() > 0.5)
        return StateLabel::Eu;
    return StateLabel::Mixed;
}

struct VibronicState {
    double energy{0.0};
    CharacterWeights character;
    double distortion_r{0.0};
    StateLabel label{StateLabel::Mixed};
    int multiplicity{1};
    bool truncation_warning{false};
};

struct SpectrumReport {
    PjtParams params;
    int cutoff{0};
    std::vector<VibronicState> states;
    std::optional<double> delta;  // E[Eu doublet] - E[A2u ground]; empty if either is absent
    int iterations_used{0};
};

namespace detail {

inline std::vector<VibronicState> label_states(const EigenResult& res, const FockBasis& basis) {
    const DistortionProbe probe(basis);
    std::vector<VibronicState> states;
    states.reserve(static_cast<std::size_t>(res.energies.size()));
    for (const Multiplet& g : degenerate_groups(res.energies)) {
        const auto w = subspace_character(res.vectors, g, basis);
        const auto d = probe(res.vectors, g);
        const StateLabel label = classify(w, g.size);
        for (Eigen::Index i = g.begin; i < g.begin + g.size; ++i)
            states.push_back({res.energies[i], w, d.r, label, static_cast<int>(g.size), d.truncation_warning});
    }
    return states;
}

inline std::optional<double> find_delta(const std::vector<VibronicState>& states) {
    if (states.empty() || states.front().label != StateLabel::A2u || states.front().multiplicity != 1)
        return std::nullopt;
    for (const auto& s : states)
        if (s.label == StateLabel::Eu && s.multiplicity == 2)
            return s.energy - states.front().energy;
    return std::nullopt;
}

}  // namespace detail

/// Lowest `num_states` labeled vibronic states. Extra states are solved
/// internally so that a multiplet straddling the last requested index is
/// complete before its character is pooled.
inline SpectrumReport spectrum_report(const PjtParams& params, int cutoff, int num_states, SolveRequest req = {}) {
    if (num_states < 1)
        throw std::invalid_argument("spectrum_report: num_states must be >= 1");
    const auto h = assemble(params, FockBasis(cutoff));
    const auto dim = static_cast<int>(h.dimension());
    if (num_states > dim)
        throw std::invalid_argument("spectrum_report: num_states exceeds Hamiltonian dimension");

    int k = std::min(dim, num_states + 2);
    EigenResult res;
    for (;;) {
        req.num_states = k;
        res = solve(h, req);
        const auto groups = degenerate_groups(res.energies);
        const auto& last = groups.back();
        const bool straddles = last.begin < num_states && last.begin + last.size == k;
        if (!straddles || k == dim)
            break;
        k = std::min(dim, k + 4);
    }

    SpectrumReport report;
    report.params = params;
    report.cutoff = cutoff;
    report.iterations_used = res.iterations_used;
    auto all = detail::label_states(res, h.basis());
    report.delta = detail::find_delta(all);
    all.resize(static_cast<std::size_t>(num_states));
    report.states = std::move(all);
    return report;
}

/// Gap between the A2u-dominant vibronic ground state and the lowest Eu
/// doublet. Throws std::runtime_error if the ground state is not A2u.
inline double delta_splitting(const PjtParams& params, int cutoff, const SolveRequest& req = {}) {
    const auto dim = static_cast<int>(4 * FockBasis::dimension_for(cutoff));
    for (int n = std::min(dim, 3);; n = std::min(dim, 2 * n)) {
        const auto report = spectrum_report(params, cutoff, n, req);
        const auto& ground = report.states.front();
        if (ground.label != StateLabel::A2u || ground.multiplicity != 1)
            throw std::runtime_error("delta_splitting: lowest vibronic state is not a nondegenerate A2u level (label " +
                                     std::string(label_name(ground.label)) + ")");
        if (report.delta)
            return *report.delta;
        if (n == dim)
            throw std::runtime_error("delta_splitting: no Eu doublet in the truncated spectrum");
    }
}

struct ApesScanPoint {
    ApesPoint point;
    std::array<CharacterWeights, 4> sheets;  // ascending energy
};

inline std::vector<ApesScanPoint> apes_scan(const PjtParams& params, const std::vector<double>& x_values, double y) {
    std::vector<ApesScanPoint> out;
    out.reserve(x_values.size());
    for (double x : x_values) {
        ApesScanPoint p{classical_apes(params, x, y), {}};
        for (int s = 0; s < 4; ++s)
            p.sheets[static_cast<std::size_t>(s)] = electronic_character(Vector4(p.point.vectors.col(s)));
        out.push_back(p);
    }
    return out;
}

}  // namespace pjt
