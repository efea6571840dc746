#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qsd/certify.hpp"
#include "qsd/two_qubit.hpp"

using namespace qsd;

namespace {

Ensemble random_equal_confidence(std::mt19937_64& rng, bool pure) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        try {
            const double s_abs = 0.05 + 0.9 * u(rng);
            const cxd S = std::polar(s_abs, 2.0 * std::numbers::pi * u(rng));
            if (pure) {
                return make_two_qubit(1.0, 1.0, 0.05 + 0.9 * u(rng), S);
            }
            const double p1 = 0.3 + 0.69 * u(rng), p2 = 0.3 + 0.69 * u(rng);
            return make_two_qubit(p1, p2, eta1_for_equal_confidence(p1, p2).eta1, S);
        } catch (const Error&) {
            continue;
        }
    }
}

void check_solution_feasible(const Ensemble& e, const Solution& s) {
    REQUIRE(check_povm(s.measurement, 1e-9).pass);
    CHECK(std::abs(failure_rate(e, s.measurement) - s.q) < 1e-9);
    CHECK(correct_rate(e, s.measurement) == doctest::Approx(s.pc_max).epsilon(1e-9));
}

}  // namespace

TEST_CASE("helstrom values") {
    CHECK(helstrom_two(make_two_qubit(1.0, 1.0, 0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(helstrom_two(make_two_qubit(1.0, 1.0, 0.2, 0.3)) ==
          doctest::Approx(0.5 * (1.0 + std::sqrt(1.0 - 4.0 * 0.16 * 0.09))).epsilon(1e-12));
}

TEST_CASE("minimum-error endpoint of the pure equiprobable pair") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.5, 0.6);
    const auto r = two_state_reduction(e);
    const Solution s = solve_two_qubit(r, 0.0);
    CHECK(s.pc_max == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(s.regime == Regime::minimum_error);
    check_solution_feasible(e, s);
    CHECK(helstrom_two(e) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("pure pair at the unambiguous threshold") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.5, 0.6);
    const auto r = two_state_reduction(e);
    const Solution s = solve_two_qubit(r, 0.6);
    CHECK(s.pc_max == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(s.pe() == doctest::Approx(0.0).epsilon(1e-12));
    check_solution_feasible(e, s);
}

TEST_CASE("branch continuity on the figure-2b family") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const double qcr = r.Qcr;
    CHECK(qcr == doctest::Approx(0.21714285714285714).epsilon(1e-12));
    CHECK(std::abs(two_qubit_detail::pc_general(r, qcr) -
                   two_qubit_detail::pc_projective_closed(r, qcr)) < 1e-9);
    CHECK(std::abs(two_qubit_detail::pc_projective_closed(r, r.Q1) - 0.9 * (1.0 - r.Q1)) < 1e-9);
}

TEST_CASE("projective branch gammas") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);

    SUBCASE("boundary gamma1 = 0 at Q1") {
        const auto [g1, g2] = projective_branch_gamma(r, r.Q1);
        CHECK(std::abs(g1) < 1e-10);
        CHECK(g2 == doctest::Approx(1.0 - r.Q1).epsilon(1e-10));
    }
    SUBCASE("both equalities hold at Q = 0.5") {
        const auto [g1, g2] = projective_branch_gamma(r, 0.5);
        const double rs = r.rho_min();
        const double rhs = std::pow(r.rho12_abs * std::sqrt(g1) +
                                    std::sqrt(r.Delta) * std::sqrt(rs - g1), 2) / (rs * rs);
        CHECK(std::abs(g2 - rhs) < 1e-10);
        CHECK(g1 + g2 == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("projective value meets the general branch at Qcr") {
        const auto [g1, g2] = projective_branch_gamma(r, r.Qcr);
        const double pc = 0.9 * (1.0 - r.Qcr) - 0.8 * g1;
        CHECK(pc == doctest::Approx(two_qubit_detail::pc_general(r, r.Qcr)).epsilon(1e-10));
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(projective_branch_gamma(r, 0.05), QOutOfRange);
        CHECK_THROWS_AS(projective_branch_gamma(r, 0.95), QOutOfRange);
    }
}

TEST_CASE("workings invariants across the general branch") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    for (double q = 0.0; q < r.Qcr; q += 0.01) {
        const auto w = two_qubit_workings(r, q);
        CHECK(w.beta1 >= -1e-12);
        CHECK(w.beta2 >= -1e-12);
        CHECK(w.beta1 + w.beta2 ==
              doctest::Approx((1.0 - q) / (2.0 * w.Gamma11 - 1.0)).epsilon(1e-10));
        CHECK(w.Gamma12_abs == doctest::Approx(w.Gamma11 - w.a).epsilon(1e-12));
        CHECK(w.Gamma11 > 0.9);
        CHECK(w.Gamma12_abs >= 0.0);
    }
    // beta1 vanishes at Qcr when |rho12| >= min(rho11, rho22)
    CHECK(std::abs(two_qubit_workings(r, r.Qcr).beta1) < 1e-10);
}

TEST_CASE("gamma pair sums to 1-Q on the projective branch") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    for (double q = r.Qcr; q <= r.Q1; q += 0.05) {
        const auto [g1, g2] = projective_branch_gamma(r, q);
        CHECK(g1 + g2 == doctest::Approx(1.0 - q).epsilon(1e-12));
        CHECK(g1 >= -1e-13);
    }
}

TEST_CASE("solutions certify across all regimes, figure-2b family") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    for (double q : {0.0, 0.1, r.Qcr, 0.4, 0.6, r.Q1, 0.9}) {
        const Solution s = solve_two_qubit(r, q);
        check_solution_feasible(e, s);
        REQUIRE(s.certificate);
        const auto rep = check_optimality(e, s.measurement, *s.certificate, 1e-8);
        INFO("q=", q, " pos=", rep.positivity_min, " eq=", rep.equality_max,
             " qc=", rep.q_consistency, " pc=", rep.pc_identity);
        CHECK(rep.pass);
    }
}

TEST_CASE("mirrored family (rho22 < rho11) certifies too") {
    const auto [e, r] = make_two_qubit_from_reduction(0.8, 0.36, 0.9);
    CHECK(r.rho22 < r.rho11);
    CHECK(r.q_prime() == doctest::Approx(r.Q2).epsilon(1e-12));
    for (double q : {0.0, 0.1, r.Qcr, 0.5, r.Q2, 0.9}) {
        const Solution s = solve_two_qubit(r, q);
        check_solution_feasible(e, s);
        const auto rep = check_optimality(e, s.measurement, *s.certificate, 1e-8);
        INFO("q=", q);
        CHECK(rep.pass);
    }
}

TEST_CASE("case |rho12| <= min: general then large-Q") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.2, 0.3);  // rho12 = 0.12 <= 0.2
    const auto r = two_state_reduction(e);
    CHECK(r.q_prime() == doctest::Approx(0.24).epsilon(1e-12));
    for (double q : {0.0, 0.1, 0.24, 0.5, 0.9}) {
        const Solution s = solve_two_qubit(r, q);
        check_solution_feasible(e, s);
        CHECK(check_optimality(e, s.measurement, *s.certificate, 1e-8).pass);
    }
    // at Q', one eigenvalue of the transformed inconclusive operator vanishes
    const Solution s = solve_two_qubit(r, r.q_prime());
    const Matrix sq = matrix_power_psd(e.total(), 0.5);
    const Matrix pi0bar = (sq * s.measurement.inconclusive() * sq).hermitized();
    CHECK(std::abs(eig_hermitian(pi0bar).eigenvalues.front()) < 1e-8);
}

TEST_CASE("q=0 equals helstrom for random equal-confidence ensembles") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        const Ensemble e = random_equal_confidence(rng, t % 2 == 0);
        const auto r = two_state_reduction(e);
        const Solution s = solve_two_qubit(r, 0.0);
        CHECK(std::abs(s.pc_max - helstrom_two(e)) < 1e-10);
    }
}

TEST_CASE("unequal confidences: endpoints only") {
    const Ensemble e = make_two_qubit(0.9, 0.7, 0.3, 0.5);
    const auto r = two_state_reduction(e);
    REQUIRE_FALSE(r.equal_confidence());

    const Solution me = solve_two_qubit(r, 0.0);
    CHECK(me.pc_max == doctest::Approx(helstrom_two(e)).epsilon(1e-12));
    CHECK(check_optimality(e, me.measurement, *me.certificate, 1e-8).pass);

    const double qp = r.q_prime();
    for (double q : {qp, 0.5 * (1.0 + qp), 0.95}) {
        const Solution s = solve_two_qubit(r, q);
        CHECK(s.pc_max == doctest::Approx(std::max(r.C1, r.C2) * (1.0 - q)).epsilon(1e-12));
        check_solution_feasible(e, s);
        CHECK(check_optimality(e, s.measurement, *s.certificate, 1e-8).pass);
    }
    CHECK_THROWS_AS(solve_two_qubit(r, 0.5 * qp), UnsupportedRegime);
}

TEST_CASE("achieved confidences never exceed the maxima") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const auto report = max_confidence(e);
    for (double q : {0.0, 0.15, 0.3, 0.6, 0.9}) {
        const Solution s = solve_two_qubit(r, q);
        for (int j = 0; j < 2; ++j)
            CHECK(outcome_confidence(e, s.measurement, j) <= report.confidences[j] + 1e-8);
    }
}

TEST_CASE("assembly stays accurate a hair inside each regime boundary") {
    // these parameter sets once triggered cancellation in b-1, in the
    // smaller beta near Qcr, and in the tiny gamma_1 root near Q1
    struct Case {
        double rho11, r12, c;
    };
    for (const Case& k : {Case{0.155009, 0.047048, 0.863452},
                          Case{0.674757, 0.416813, 0.699197},
                          Case{0.0142323, 0.1126323, 0.5420612},
                          Case{0.9237233, 0.0121342, 0.9508397}}) {
        const auto [e, r] = make_two_qubit_from_reduction(k.rho11, k.r12, k.c);
        const double qp = r.q_prime();
        for (double q : {r.Qcr - 1e-9, r.Qcr + 1e-9, qp - 1e-9, qp + 1e-9,
                         2.0 * r.rho12_abs - 1e-9}) {
            if (q <= 0.0 || q >= 1.0) continue;
            const Solution s = solve_two_qubit(r, q);
            const auto povm = check_povm(s.measurement, 1e-9);
            INFO("rho11=", k.rho11, " q=", q);
            CHECK(povm.pass);
            CHECK(check_optimality(e, s.measurement, *s.certificate, 1e-8).pass);
        }
    }
}

TEST_CASE("pc is continuous at every regime boundary") {
    // case (ii): general -> projective -> saturated
    const auto [eb, rb] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    // case (i): general -> saturated at 2|rho12|
    const auto [ea, ra] = make_two_qubit_from_reduction(0.3, 0.2, 0.85);
    const auto boundaries_b = {rb.Qcr, rb.Q1};
    const auto boundaries_a = {2.0 * ra.rho12_abs};
    const auto check = [](const TwoQubitReduction& r, double q) {
        const double left = two_qubit_pc(r, q - 1e-11);
        const double right = two_qubit_pc(r, q + 1e-11);
        CHECK(std::abs(left - right) < 1e-8);
    };
    for (double q : boundaries_b) check(rb, q);
    for (double q : boundaries_a) check(ra, q);
}

TEST_CASE("relative rate saturates at C for Q >= Q'") {
    for (auto params : {std::pair{0.2, 0.36}, {0.3, 0.2}}) {
        const auto [e, r] = make_two_qubit_from_reduction(params.first, params.second, 0.9);
        const double qp = r.q_prime();
        for (double q = qp; q < 0.999; q += 0.01) {
            CHECK(std::abs(two_qubit_pc(r, q) / (1.0 - q) - 0.9) < 1e-10);
        }
    }
}

TEST_CASE("betas stay nonnegative on the general branch, case (i)") {
    const auto [e, r] = make_two_qubit_from_reduction(0.3, 0.2, 0.85);
    for (double q = 0.0; q < 2.0 * r.rho12_abs; q += 0.01) {
        const auto w = two_qubit_workings(r, q);
        CHECK(w.beta1 >= -1e-12);
        CHECK(w.beta2 >= -1e-12);
    }
}

TEST_CASE("pe is nonincreasing in q") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    double prev = 1.0;
    for (int i = 0; i < 1000; ++i) {
        const double q = 0.999 * i / 999.0;
        const double pe = 1.0 - q - two_qubit_pc(r, q);
        CHECK(pe <= prev + 1e-10);
        prev = pe;
    }
}

TEST_CASE("perturbed measurement fails certification") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    Solution s = solve_two_qubit(r, 0.1);
    // rotate Pi_1 by a small unitary, restore completeness through Pi_0
    const double angle = 0.05;
    Matrix u(2);
    u(0, 0) = std::cos(angle);
    u(0, 1) = std::sin(angle);
    u(1, 0) = -std::sin(angle);
    u(1, 1) = std::cos(angle);
    const Matrix rotated = (u * s.measurement.operators[1] * u.adjoint()).hermitized();
    s.measurement.operators[0] += s.measurement.operators[1] - rotated;
    s.measurement.operators[1] = rotated;
    const auto rep = check_optimality(e, s.measurement, *s.certificate, 1e-8);
    CHECK_FALSE(rep.pass);
    CHECK(rep.equality_max > 1e-4);
}
