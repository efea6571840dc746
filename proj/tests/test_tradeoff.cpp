#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsd/symmetric.hpp"
#include "qsd/tradeoff.hpp"

using namespace qsd;

namespace {

TradeoffCurve curve_for(const TwoQubitReduction& r, int steps = 200) {
    TradeoffCurve c;
    c.family = "two-qubit";
    c.pc_eval = [r](double q) { return two_qubit_pc(r, q); };
    for (int i = 0; i < steps; ++i) {
        const double q = 0.995 * i / (steps - 1);
        CurvePoint pt;
        pt.q = q;
        pt.pc = two_qubit_pc(r, q);
        pt.pe = 1.0 - q - pt.pc;
        pt.rc = pt.pc / (1.0 - q);
        pt.regime = two_qubit_regime(r, q);
        c.points.push_back(pt);
    }
    return c;
}

}  // namespace

TEST_CASE("pe table: large-Q segment is exactly (1-C)(1-Q)") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const auto curve = curve_for(r);
    const auto table = pe_of_q(curve);
    for (const auto& [q, pe] : table)
        if (q >= r.Q1)
            CHECK(pe == doctest::Approx((1.0 - 0.9) * (1.0 - q)).epsilon(1e-12));
}

TEST_CASE("pure pair endpoint values") {
    const auto r = two_state_reduction(make_two_qubit(1.0, 1.0, 0.5, 0.6));
    const auto curve = curve_for(r);
    CHECK(curve.pe_at(0.0) == doctest::Approx(0.1).epsilon(1e-12));  // 1 - Helstrom
    // errors vanish first at Q' = 2|rho12| = 0.6; P_e(Q) is quadratically
    // flat there, so the inverse carries sqrt(eps) sensitivity in Q
    const double q_unambiguous = q_of_pe(curve, 0.0);
    CHECK(std::abs(q_unambiguous - 0.6) < 1e-7);
    CHECK(std::abs(curve.pe_at(q_unambiguous)) < 1e-12);
    // Pe = P_E inverts to Q = 0
    CHECK(q_of_pe(curve, 0.1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("q_of_pe roundtrip on the strictly decreasing segment") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const auto curve = curve_for(r);
    for (double q : {0.05, 0.15, 0.3, 0.5, 0.7}) {
        const double pe = curve.pe_at(q);
        CHECK(q_of_pe(curve, pe) == doctest::Approx(q).epsilon(1e-9));
    }
    CHECK_THROWS_AS(q_of_pe(curve, 0.5), PeOutOfRange);
}

TEST_CASE("nonmonotone tables are rejected") {
    TradeoffCurve c;
    c.points.push_back({0.0, 0.8, 0.2, 0.8, Regime::minimum_error});
    c.points.push_back({0.1, 0.6, 0.3, 0.66, Regime::general_povm});
    CHECK_THROWS_AS(pe_of_q(c), NonMonotone);
}

TEST_CASE("error thresholds ordering") {
    SUBCASE("|rho12| >= min: P_e'' < P_e'") {
        const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
        const auto t = error_thresholds(r);
        CHECK(t.p_e_doubleprime < t.p_e_prime);
        CHECK(t.p_e_prime < t.p_E);
        CHECK(t.p_e_doubleprime == doctest::Approx(0.1 * (1.0 - 0.848)).epsilon(1e-12));
        CHECK(t.p_e_prime ==
              doctest::Approx(std::pow(0.2 - 0.36, 2) / 0.28 + 0.1 * 0.6).epsilon(1e-12));
    }
    SUBCASE("|rho12| <= min: P_e' = P_e''") {
        const auto [e, r] = make_two_qubit_from_reduction(0.3, 0.2, 0.85);
        const auto t = error_thresholds(r);
        CHECK(t.p_e_prime == doctest::Approx(t.p_e_doubleprime).epsilon(1e-14));
        CHECK(t.p_e_prime == doctest::Approx(0.15 * 0.6).epsilon(1e-12));
    }
}

TEST_CASE("fixed-pe closed forms") {
    SUBCASE("pure states: (sqrt(Pe) + sqrt(1-2|rho12|))^2") {
        const auto r = two_state_reduction(make_two_qubit(1.0, 1.0, 0.5, 0.6));
        for (double pe : {0.0, 0.02, 0.05, 0.1}) {
            const Solution s = solve_two_qubit_fixed_pe(r, pe);
            CHECK(s.pc_max ==
                  doctest::Approx(std::pow(std::sqrt(pe) + std::sqrt(0.4), 2)).epsilon(1e-12));
        }
    }
    SUBCASE("Pe = P_E recovers the minimum-error point") {
        const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
        const auto t = error_thresholds(r);
        const Solution s = solve_two_qubit_fixed_pe(r, t.p_E);
        CHECK(s.pc_max == doctest::Approx(1.0 - t.p_E).epsilon(1e-9));
        CHECK(s.q == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("C=1, |rho12| >= rho11: Pe = 0 gives P_c = 1 - Q1") {
        // eta1 = 0.2, |S| = 0.7 gives |rho12| = 0.28 >= rho11 = 0.2
        const auto r = two_state_reduction(make_two_qubit(1.0, 1.0, 0.2, 0.7));
        REQUIRE(r.rho12_abs >= r.rho_min());
        const Solution s = solve_two_qubit_fixed_pe(r, 0.0);
        CHECK(s.pc_max == doctest::Approx(1.0 - r.Q1).epsilon(1e-10));
        CHECK(s.pc_max == doctest::Approx(r.Delta / 0.2).epsilon(1e-10));
    }
    SUBCASE("linear branch for C != 1") {
        const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
        const auto t = error_thresholds(r);
        for (double pe : {0.2 * t.p_e_doubleprime, 0.8 * t.p_e_doubleprime}) {
            const Solution s = solve_two_qubit_fixed_pe(r, pe);
            CHECK(s.pc_max == doctest::Approx(pe * 0.9 / 0.1).epsilon(1e-10));
        }
    }
    SUBCASE("out of range") {
        const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
        CHECK_THROWS_AS(solve_two_qubit_fixed_pe(r, 0.9), PeOutOfRange);
        CHECK_THROWS_AS(solve_two_qubit_fixed_pe(r, -0.01), PeOutOfRange);
    }
}

TEST_CASE("strategy duality: fixed-pe inverts fixed-q") {
    SUBCASE("mixed family incl. the numeric middle interval") {
        const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
        for (double q : {0.02, 0.1, 0.3, 0.5, 0.7}) {
            const double pc_q = two_qubit_pc(r, q);
            const double pe = 1.0 - q - pc_q;
            const Solution s = solve_two_qubit_fixed_pe(r, pe);
            CHECK(s.pc_max == doctest::Approx(pc_q).epsilon(1e-8));
            CHECK(s.q == doctest::Approx(q).epsilon(1e-8));
            // same detection operators as the fixed-Q measurement
            const Solution fixed_q = solve_two_qubit(r, q);
            for (size_t i = 0; i < 3; ++i)
                CHECK(spectral_norm(s.measurement.operators[i] - fixed_q.measurement.operators[i]) <
                      1e-7);
        }
    }
    SUBCASE("pure family, strictly decreasing segment q < Q' = 0.36") {
        const auto r = two_state_reduction(make_two_qubit(1.0, 1.0, 0.2, 0.45));
        for (double q : {0.05, 0.2, 0.3}) {
            const double pe = 1.0 - q - two_qubit_pc(r, q);
            const Solution s = solve_two_qubit_fixed_pe(r, pe);
            CHECK(s.pc_max == doctest::Approx(two_qubit_pc(r, q)).epsilon(1e-8));
        }
        // on the plateau P_e = 0 the smallest admissible Q is returned
        const Solution s = solve_two_qubit_fixed_pe(r, 0.0);
        CHECK(s.q == doctest::Approx(0.36).epsilon(1e-9));
        CHECK(s.pc_max == doctest::Approx(0.64).epsilon(1e-9));
    }
}

TEST_CASE("regime labels change only at the thresholds") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const auto curve = curve_for(r, 500);
    for (const auto& pt : curve.points) {
        Regime expect;
        if (pt.q == 0.0)
            expect = Regime::minimum_error;
        else if (pt.q < r.Qcr)
            expect = Regime::general_povm;
        else if (pt.q < r.Q1)
            expect = Regime::projective_single_state;
        else
            expect = Regime::large_q;
        CHECK(pt.regime == expect);
    }
}

TEST_CASE("pc is nondecreasing in pe") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const auto t = error_thresholds(r);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double pe = t.p_E * i / 200.0;
        const double pc = solve_two_qubit_fixed_pe(r, pe).pc_max;
        CHECK(pc >= prev - 1e-10);
        prev = pc;
    }
}
