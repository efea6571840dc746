#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qsd/certify.hpp"
#include "qsd/symmetric.hpp"

using namespace qsd;

namespace {

// random feasible POVM via whitening of random PSD factors
Measurement random_povm(std::mt19937_64& rng, int d, int outcomes) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Matrix> b;
    Matrix t(d);
    for (int i = 0; i <= outcomes; ++i) {
        Matrix a(d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) a(r, c) = cxd(g(rng), g(rng));
        b.push_back((a.adjoint() * a).hermitized());
        t += b.back();
    }
    const Matrix w = matrix_power_psd(t, -0.5, true);
    Measurement m;
    for (const auto& bi : b) m.operators.push_back((w * bi * w).hermitized());
    return m;
}

}  // namespace

TEST_CASE("check_povm basics") {
    Measurement proj;
    proj.operators.assign(3, Matrix(2));
    proj.operators[1](0, 0) = 1.0;
    proj.operators[2](1, 1) = 1.0;
    CHECK(check_povm(proj, 1e-9).pass);

    proj.operators[1] += 1e-3 * Matrix::identity(2);
    const auto rep = check_povm(proj, 1e-9);
    CHECK_FALSE(rep.pass);
    CHECK(rep.completeness_residual == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("helstrom certificate with a = 0 passes") {
    const Ensemble e = make_two_qubit(0.85, 0.6, 0.4, cxd(0.3, 0.45));
    const Solution s = helstrom_solution(e);
    REQUIRE(s.certificate);
    CHECK(s.certificate->a == 0.0);
    CHECK(s.measurement.inconclusive().max_abs() == 0.0);
    CHECK(check_optimality(e, s.measurement, *s.certificate, 1e-8).pass);
    CHECK(s.pc_max == doctest::Approx(helstrom_two(e)).epsilon(1e-12));
}

TEST_CASE("duality gap vanishes on certified solutions") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    for (double q : {0.0, 0.1, 0.4, 0.9}) {
        const Solution s = solve_two_qubit(r, q);
        CHECK(std::abs(duality_gap(e, s.measurement, *s.certificate)) < 1e-9);
    }
}

TEST_CASE("weak duality on 10^4 random feasible measurements") {
    std::mt19937_64 rng(31);
    const auto [e, r] = make_two_qubit_from_reduction(0.25, 0.3, 0.85);
    const Solution s = solve_two_qubit(r, 0.2);
    for (int t = 0; t < 5000; ++t) {
        const Measurement m = random_povm(rng, 2, 2);
        REQUIRE(duality_gap(e, m, *s.certificate) >= -1e-10);
    }

    const auto f = SymmetricFamily::equal_overlap_family(4, 0.3);
    const auto se = make_symmetric(f);
    const Solution sym = solve_symmetric_pure(f, 0.15);
    for (int t = 0; t < 5000; ++t) {
        const Measurement m = random_povm(rng, 4, 4);
        REQUIRE(duality_gap(se.ensemble, m, *sym.certificate) >= -1e-10);
    }
}

TEST_CASE("invalid certificate is rejected") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    Solution s = solve_two_qubit(r, 0.2);
    DualCertificate bad = *s.certificate;
    bad.Z -= 0.05 * Matrix::identity(2);
    CHECK_THROWS_AS(duality_gap(e, s.measurement, bad), InvalidCertificate);
}

TEST_CASE("partial symmetry: degenerate split M = N reduces to the symmetric check") {
    const auto f = SymmetricFamily::equal_overlap_family(3, 0.3);
    const auto se = make_symmetric(f);
    const Solution s = solve_symmetric_pure(f, 0.1);
    const auto rep = check_partial_symmetry(se.ensemble, 3, se.symmetry, Matrix::identity(3),
                                            s.measurement.inconclusive(), s.measurement.outcome(1),
                                            Matrix(3), *s.certificate, 1e-8);
    CHECK(rep.pass);
}

TEST_CASE("partial symmetry on the trine split {1} + {2,3}") {
    const double p = 0.9;
    const auto f = SymmetricFamily::trine_family(p);
    const auto se = make_symmetric(f);
    const Solution s = solve_identity_resolving(f, 0.0);

    // U maps psi_2 -> psi_3 and is diagonal in the eigenbasis of rho_1
    const Vector& psi1 = se.pure_parts[0];
    const Vector perp = {-std::conj(psi1[1]), std::conj(psi1[0])};
    const cxd a2 = inner(psi1, se.pure_parts[1]), a3 = inner(psi1, se.pure_parts[2]);
    const cxd b2 = inner(perp, se.pure_parts[1]), b3 = inner(perp, se.pure_parts[2]);
    const Matrix U = (a3 / a2) * projector(psi1) + (b3 / b2) * projector(perp);

    const auto rep = check_partial_symmetry(se.ensemble, 1, Matrix::identity(2), U,
                                            s.measurement.inconclusive(), s.measurement.outcome(1),
                                            s.measurement.outcome(2), *s.certificate, 1e-8);
    CHECK(rep.pass);

    // oracle-style consistency: the certified value matches the closed form
    CHECK(s.pc_max == doctest::Approx((1.0 + p) / 3.0).epsilon(1e-12));
}

TEST_CASE("partial symmetry rejects non-commuting subset totals") {
    // two pure states along x and z: the subset totals do not commute
    Matrix zplus(2), xplus(2);
    zplus(0, 0) = 1.0;
    xplus(0, 0) = xplus(0, 1) = xplus(1, 0) = xplus(1, 1) = 0.5;
    const Matrix mixed = 0.5 * Matrix::identity(2);
    Ensemble e({0.25, 0.25, 0.5}, {zplus, xplus, mixed});
    DualCertificate c;
    c.Z = Matrix::identity(2);
    c.a = 0.0;
    CHECK_THROWS_AS(check_partial_symmetry(e, 1, Matrix::identity(2), Matrix::identity(2),
                                           Matrix(2), Matrix(2), Matrix(2), c, 1e-8),
                    CommutationViolation);
}

TEST_CASE("rotating one detection operator breaks the equality conditions") {
    const auto f = SymmetricFamily::equal_overlap_family(3, 0.3);
    const auto se = make_symmetric(f);
    Solution s = solve_symmetric_pure(f, 0.1);
    Matrix u = Matrix::identity(3);
    const double angle = 0.05;
    u(0, 0) = std::cos(angle);
    u(0, 1) = std::sin(angle);
    u(1, 0) = -std::sin(angle);
    u(1, 1) = std::cos(angle);
    const Matrix rotated = (u * s.measurement.operators[1] * u.adjoint()).hermitized();
    s.measurement.operators[0] += s.measurement.operators[1] - rotated;
    s.measurement.operators[1] = rotated;
    const auto rep = check_optimality(se.ensemble, s.measurement, *s.certificate, 1e-8);
    CHECK_FALSE(rep.pass);
    CHECK(rep.equality_max > 1e-4);
}
