#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pjt/analysis.hpp"
#include "pjt/io.hpp"

using Catch::Matchers::WithinAbs;
using pjt::PjtParams;
using pjt::StateLabel;

namespace {

const PjtParams kSiV{75.9, 78.3, 45.0, 95.0, 103.0};

Eigen::VectorXd product_state(const pjt::FockBasis& basis, const pjt::Vector4& electronic, std::size_t phonon) {
    const auto dph = static_cast<Eigen::Index>(basis.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4 * dph);
    for (Eigen::Index e = 0; e < 4; ++e)
        v[e * dph + static_cast<Eigen::Index>(phonon)] = electronic[e];
    return v;
}

}  // namespace

TEST_CASE("character of a hand-built symmetry state") {
    const pjt::FockBasis basis(4);
    const auto a2u = pjt::ElectronicBasis::symmetry_state(pjt::Symmetry::A2u);
    const auto w = pjt::electronic_character(product_state(basis, a2u, 0), basis);
    CHECK_THAT(w.a2u, WithinAbs(1.0, 1e-15));
    CHECK_THAT(w.a1u, WithinAbs(0.0, 1e-15));
    CHECK_THAT(w.eu(), WithinAbs(0.0, 1e-15));

    const auto eux = pjt::ElectronicBasis::symmetry_state(pjt::Symmetry::Eux);
    const auto we = pjt::electronic_character(product_state(basis, eux, basis.index({1, 2})), basis);
    CHECK_THAT(we.eux, WithinAbs(1.0, 1e-15));
}

TEST_CASE("character rejects malformed input") {
    const pjt::FockBasis basis(2);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(24);
    v[0] = 2.0;
    CHECK_THROWS_AS(pjt::electronic_character(v, basis), std::invalid_argument);
    CHECK_THROWS_AS(pjt::electronic_character(Eigen::VectorXd::Ones(5).normalized(), basis), std::invalid_argument);
    CHECK_THROWS_AS(pjt::distortion_expectation(v, basis), std::invalid_argument);
}

TEST_CASE("vacuum distortion is the zero-point value") {
    const pjt::FockBasis basis(6);
    for (auto sym : {pjt::Symmetry::A2u, pjt::Symmetry::A1u, pjt::Symmetry::Euy}) {
        const auto d = pjt::distortion_expectation(product_state(basis, pjt::ElectronicBasis::symmetry_state(sym), 0), basis);
        CHECK_THAT(d.r, WithinAbs(1.0, 1e-14));
        CHECK_FALSE(d.truncation_warning);
    }
    const auto top = pjt::distortion_expectation(
        product_state(basis, pjt::ElectronicBasis::symmetry_state(pjt::Symmetry::A2u), basis.index({6, 0})), basis);
    CHECK(top.truncation_warning);
    CHECK_THAT(top.top_shell_weight, WithinAbs(1.0, 1e-15));
}

TEST_CASE("SiV ground state: half A2u, half Eu, no A1u") {
    const auto report = pjt::spectrum_report(kSiV, 15, 3);
    REQUIRE(report.states.size() == 3);
    const auto& g = report.states[0];
    // Frozen from the independent numpy oracle.
    CHECK_THAT(g.character.a2u, WithinAbs(0.5224517455073533, 1e-8));
    CHECK_THAT(g.character.eu(), WithinAbs(0.4775482544926462, 1e-8));
    CHECK(g.character.a1u < 0.05);
    CHECK_THAT(g.character.sum(), WithinAbs(1.0, 1e-10));
    CHECK_THAT(g.distortion_r, WithinAbs(2.721804928309775, 1e-8));

    const double rho_star = (kSiV.f_g + kSiV.f_u) / kSiV.hbar_omega;
    CHECK(std::abs(g.distortion_r - rho_star) < 0.25 * rho_star);

    CHECK(g.label == StateLabel::A2u);
    CHECK(g.multiplicity == 1);
    CHECK(report.states[1].label == StateLabel::Eu);
    CHECK(report.states[2].label == StateLabel::Eu);
    CHECK(report.states[1].multiplicity == 2);
    CHECK(report.states[1].character.eu() > 0.45);
    CHECK_THAT(report.states[1].character.a2u, WithinAbs(0.5194407424141323, 1e-8));
    CHECK(report.states[1].distortion_r == report.states[2].distortion_r);
}

TEST_CASE("degenerate partners share R") {
    const auto h = pjt::assemble(kSiV, pjt::FockBasis(15));
    pjt::SolveRequest req;
    req.num_states = 3;
    const auto res = pjt::solve(h, req);
    const auto r1 = pjt::distortion_expectation(res.vectors.col(1), h.basis()).r;
    const auto r2 = pjt::distortion_expectation(res.vectors.col(2), h.basis()).r;
    CHECK_THAT(r1, WithinAbs(r2, 1e-6));
}

TEST_CASE("delta splitting reproduces the tabulated gaps") {
    // Oracle values from an independent numpy diagonalization, cutoff 15.
    const std::vector<double> oracle{6.664542765548504, 7.611366671681083, 9.404289127416945, 10.875774968788278};
    for (std::size_t i = 0; i < pjt::kPresets.size(); ++i) {
        const auto& preset = pjt::kPresets[i];
        const double delta = pjt::delta_splitting(preset.params, 15);
        CHECK_THAT(delta, WithinAbs(oracle[i], 1e-7));
        CHECK(std::abs(delta - preset.reference_delta) <= 0.1 * preset.reference_delta);
        CHECK(delta > 0.0);
        CHECK(delta < preset.params.lambda_corr - preset.params.xi_corr);
    }
}

TEST_CASE("delta splitting fails when the ground state is not A2u") {
    // Xi > Lambda with no coupling puts the Eu doublet lowest.
    const PjtParams p{75.9, 10.0, 40.0, 0.0, 0.0};
    CHECK_THROWS_AS(pjt::delta_splitting(p, 4), std::runtime_error);
}

TEST_CASE("correlation-only spectrum is labeled by the W eigenstates") {
    PjtParams p = kSiV;
    p.f_g = p.f_u = 0.0;
    const auto report = pjt::spectrum_report(p, 3, 20);
    const double e0 = report.states[0].energy;
    CHECK(report.states[0].label == StateLabel::A2u);
    CHECK(report.states[1].label == StateLabel::Eu);
    CHECK(report.states[2].label == StateLabel::Eu);
    CHECK_THAT(report.states[1].energy - e0, WithinAbs(33.3, 1e-9));
    REQUIRE(report.delta);
    CHECK_THAT(*report.delta, WithinAbs(33.3, 1e-9));
    bool found_a1u = false;
    for (const auto& s : report.states)
        if (s.label == StateLabel::A1u) {
            CHECK_THAT(s.energy - e0, WithinAbs(156.6, 1e-9));
            found_a1u = true;
            break;
        }
    CHECK(found_a1u);
}

TEST_CASE("character weights sum to one for every reported state") {
    for (const auto& preset : pjt::kPresets) {
        const auto report = pjt::spectrum_report(preset.params, 15, 8);
        for (const auto& s : report.states) {
            CHECK_THAT(s.character.sum(), WithinAbs(1.0, 1e-10));
            CHECK(s.character.a2u >= 0.0);
        }
        CHECK(report.states[0].character.a1u < 0.05);
        for (std::size_t i = 1; i < report.states.size(); ++i)
            CHECK(report.states[i].energy >= report.states[i - 1].energy);
    }
}

TEST_CASE("labels follow the pooled 0.5 rule with doublets as Eu") {
    CHECK(pjt::classify({0.6, 0.0, 0.2, 0.2}, 1) == StateLabel::A2u);
    CHECK(pjt::classify({0.1, 0.7, 0.1, 0.1}, 1) == StateLabel::A1u);
    CHECK(pjt::classify({0.2, 0.0, 0.4, 0.4}, 1) == StateLabel::Eu);
    CHECK(pjt::classify({0.4, 0.3, 0.2, 0.1}, 1) == StateLabel::Mixed);
    CHECK(pjt::classify({0.52, 0.0, 0.24, 0.24}, 2) == StateLabel::Eu);
    CHECK(pjt::classify({0.52, 0.0, 0.24, 0.24}, 4) == StateLabel::A2u);
    CHECK(pjt::label_name(StateLabel::Mixed) == "mixed");
}

TEST_CASE("APES scan") {
    const std::vector<double> xs{-12.0, -3.0, -1.0, 0.0, 1.0, 3.0, 12.0};
    const auto scan = pjt::apes_scan(kSiV, xs, 0.0);
    REQUIRE(scan.size() == xs.size());

    const auto& origin = scan[3];
    CHECK_THAT(origin.point.energies[0], WithinAbs(-78.3, 1e-12));
    CHECK_THAT(origin.sheets[0].a2u, WithinAbs(1.0, 1e-12));
    CHECK_THAT(origin.sheets[1].eu(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(origin.sheets[2].eu(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(origin.sheets[3].a1u, WithinAbs(1.0, 1e-12));

    for (std::size_t i = 0; i < 3; ++i)
        CHECK((scan[i].point.energies - scan[xs.size() - 1 - i].point.energies).cwiseAbs().maxCoeff() < 1e-10);

    // Far out on the trough the correlation terms are negligible: half A2u.
    const double rho_star = (kSiV.f_g + kSiV.f_u) / kSiV.hbar_omega;
    REQUIRE(std::abs(xs.back()) >= 3 * rho_star);
    CHECK_THAT(scan.back().sheets[0].a2u, WithinAbs(0.5, 0.02));
    CHECK(std::abs(scan.back().sheets[0].a2u - 0.5) < std::abs(scan[4].sheets[0].a2u - 0.5));
    for (const auto& pt : scan)
        for (const auto& w : pt.sheets)
            CHECK_THAT(w.sum(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("APES minimum lies at or below -E_JT1 for every preset") {
    std::vector<double> xs;
    for (int i = 0; i <= 800; ++i)
        xs.push_back(-4.0 + 0.01 * i);
    for (const auto& preset : pjt::kPresets) {
        const auto scan = pjt::apes_scan(preset.params, xs, 0.0);
        double lowest = INFINITY;
        for (const auto& pt : scan)
            lowest = std::min(lowest, pt.point.energies[0]);
        CHECK(lowest <= -pjt::ejt_from_couplings(preset.params).e_jt1);
    }
}
