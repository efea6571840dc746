#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsd/oracle.hpp"
#include "qsd/symmetric.hpp"
#include "qsd/tradeoff.hpp"

using namespace qsd;

namespace {

OracleConfig quick_config(int restarts = 6, std::uint64_t seed = 11) {
    OracleConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = seed;
    cfg.max_iterations = 900;
    return cfg;
}

}  // namespace

TEST_CASE("oracle reaches the helstrom value at Q = 0") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.5, 0.6);
    const auto res = optimize_fixed_q(e, 0.0, quick_config());
    CHECK(res.converged);
    CHECK(res.pc_best >= 0.9 - 1e-4);
    CHECK(res.pc_best <= 0.9 + 1e-6);
    CHECK(check_povm(res.measurement, 1e-7).pass);
}

TEST_CASE("oracle tracks the analytic curve at positive Q") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    for (double q : {0.1, 0.5}) {
        const auto res = optimize_fixed_q(e, q, quick_config());
        REQUIRE(res.converged);
        const double analytic = two_qubit_pc(r, res.q_achieved);
        CHECK(analytic - res.pc_best >= -5e-11);
        CHECK(analytic - res.pc_best <= 1e-4);
    }
}

TEST_CASE("warm start pins the oracle to the analytic measurement") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const Solution s = solve_two_qubit(r, 0.3);
    OracleConfig cfg = quick_config(2, 5);
    const auto res = optimize_fixed_q(e, 0.3, cfg, s.measurement);
    REQUIRE(res.converged);
    const double analytic = two_qubit_pc(r, res.q_achieved);
    CHECK(analytic - res.pc_best >= -5e-11);
    CHECK(analytic - res.pc_best <= 2e-6);
}

TEST_CASE("oracle respects dual bounds") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const Solution s = solve_two_qubit(r, 0.3);
    const auto res = optimize_fixed_q(e, 0.3, quick_config(4, 7), s.measurement);
    CHECK(res.pc_best <= s.certificate->bound(res.q_achieved) + 1e-6);
}

TEST_CASE("tetrad oracle at Q = 0.3, p = 0.7") {
    const auto f = SymmetricFamily::tetrad_family(0.7);
    const auto se = make_symmetric(f);
    const Solution s = solve_identity_resolving(f, 0.3);
    const auto res = optimize_fixed_q(se.ensemble, 0.3, quick_config(3, 9), s.measurement);
    REQUIRE(res.converged);
    const double analytic = (1.7 / 4.0) * (1.0 - res.q_achieved);
    CHECK(analytic - res.pc_best >= -5e-11);
    CHECK(analytic - res.pc_best <= 1e-4);
}

TEST_CASE("determinism: identical seed gives identical result") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.3, 0.5);
    const auto a = optimize_fixed_q(e, 0.2, quick_config(3, 123));
    const auto b = optimize_fixed_q(e, 0.2, quick_config(3, 123));
    CHECK(a.pc_best == b.pc_best);
    CHECK(a.q_achieved == b.q_achieved);
    const auto c = optimize_fixed_q(e, 0.2, quick_config(3, 124));
    CHECK(a.pc_best == doctest::Approx(c.pc_best).epsilon(1e-4));  // same optimum, other path
}

TEST_CASE("q out of range rejected") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.3, 0.5);
    CHECK_THROWS_AS(optimize_fixed_q(e, 1.0, quick_config(1)), QOutOfRange);
}

TEST_CASE("sampling: projective orthogonal pair") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.5, 0.0);
    Measurement m;
    m.operators.assign(3, Matrix(2));
    m.operators[1](0, 0) = 1.0;
    m.operators[2](1, 1) = 1.0;
    const auto rates = sample_outcomes(e, m, 100000, 99);
    CHECK(rates.pc == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rates.pe == 0.0);
    CHECK(rates.q == 0.0);
}

TEST_CASE("sampling: rates within 5 sigma and partition exact") {
    const auto [e, r] = make_two_qubit_from_reduction(0.2, 0.36, 0.9);
    const Solution s = solve_two_qubit(r, 0.24);
    const long n = 1000000;
    const auto rates = sample_outcomes(e, s.measurement, n, 4242);
    CHECK(rates.pc + rates.pe + rates.q == doctest::Approx(1.0).epsilon(1e-15));
    const auto sigma = [&](double p) { return std::sqrt(p * (1.0 - p) / n); };
    CHECK(std::abs(rates.q - 0.24) < 5.0 * sigma(0.24));
    CHECK(std::abs(rates.pc - s.pc_max) < 5.0 * sigma(s.pc_max));
    CHECK(std::abs(rates.pe - s.pe()) < 5.0 * sigma(s.pe()));
}

TEST_CASE("sampling determinism") {
    const Ensemble e = make_two_qubit(1.0, 1.0, 0.3, 0.5);
    const Solution s = solve_two_qubit(two_state_reduction(e), 0.1);
    const auto a = sample_outcomes(e, s.measurement, 10000, 7);
    const auto b = sample_outcomes(e, s.measurement, 10000, 7);
    CHECK(a.pc == b.pc);
    CHECK(a.q == b.q);
}
