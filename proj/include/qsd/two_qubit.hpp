#ifndef QSD_TWO_QUBIT_HPP
#define QSD_TWO_QUBIT_HPP

// Closed-form optimal measurements for two mixed qubit states with equal
// maximum confidences, the Helstrom minimum-error value for two states of
// any dimension, and the large-Q endpoints for unequal confidences.

#include <cmath>

#include "qsd/confidence.hpp"
#include "qsd/solution.hpp"

namespace qsd {

// Minimum-error success probability 1/2 (1 + Tr||eta2 rho2 - eta1 rho1||).
inline double helstrom_two(const Ensemble& e) {
    if (e.size() != 2) throw DimensionMismatch("helstrom_two: needs exactly two states");
    const Matrix lambda = (e.prior(1) * e.state(1) - e.prior(0) * e.state(0)).hermitized();
    return 0.5 * (1.0 + trace_norm_hermitian(lambda));
}

// Helstrom measurement and the a = 0 certificate, any dimension.
inline Solution helstrom_solution(const Ensemble& e) {
    if (e.size() != 2) throw DimensionMismatch("helstrom_solution: needs exactly two states");
    const int d = e.dim();
    const Matrix lambda = (e.prior(1) * e.state(1) - e.prior(0) * e.state(0)).hermitized();
    const auto es = eig_hermitian(lambda);
    Matrix p2(d);
    for (int k = 0; k < d; ++k)
        if (es.eigenvalues[k] > 0.0) p2 += projector(eigenvector_column(es, k));
    const Matrix p1 = Matrix::identity(d) - p2;

    Solution s;
    s.q = 0.0;
    s.regime = Regime::minimum_error;
    s.measurement.operators = {Matrix(d), p1.hermitized(), p2.hermitized()};
    s.pc_max = correct_rate(e, s.measurement);
    DualCertificate c;
    c.a = 0.0;
    c.Z = (e.prior(0) * e.state(0) * p1 + e.prior(1) * e.state(1) * p2).hermitized();
    s.certificate = std::move(c);
    return s;
}

// Parameters of the general-regime construction (Gamma - aI > 0) and of
// the projective branch; exposed for property tests.
struct TwoQubitWorkings {
    double a = 0.0;
    double Gamma11 = 0.0;
    double Gamma12_abs = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    double b = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;  // projective branch only
    double chi = 0.0;
    double delta = 0.0;                 // phi + pi
};

namespace two_qubit_detail {

inline double radical(double x) {
    if (x < -1e-12) throw NoRealRoot("two-qubit solver: negative radicand");
    return std::sqrt(std::max(0.0, x));
}

// P_c^(0): 0 <= Q <= min(2|rho12|, Qcr)
inline double pc_general(const TwoQubitReduction& r, double q) {
    const double R = r.rho12_abs, C = r.confidence();
    return 0.5 * (1.0 - q) +
           0.5 * (2.0 * C - 1.0) * radical((1.0 - 2.0 * R) * (1.0 + 2.0 * R - 2.0 * q));
}

// gamma_1 of the projective branch: the admissible root of
// (1 - Q - x) rho_s^2 = (R sqrt(x) + sqrt(Delta) sqrt(rho_s - x))^2.
// Squaring once gives a quadratic whose second root belongs to the
// opposite sign branch; roots are taken in the stable (Vieta) form and
// classified by which sign branch they satisfy, then Newton-polished.
inline std::pair<double, double> projective_gammas(const TwoQubitReduction& r, double q) {
    const double R = r.rho12_abs, rs = r.rho_min(), delta = r.Delta;
    const double sd = std::sqrt(delta);
    const double A = rs * rs * (1.0 - q) - delta * rs;
    const double B = delta - rs * rs - R * R;
    const double qa = B * B + 4.0 * R * R * delta;
    const double qb = 2.0 * A * B - 4.0 * R * R * delta * rs;
    const double qc = A * A;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < -1e-12 * std::max(1.0, qb * qb)) throw NoRealRoot("projective branch: no real gamma_1");
    const double sq = std::sqrt(std::max(0.0, disc));
    const double x_big = (-qb + (qb <= 0.0 ? sq : -sq)) / (2.0 * qa);
    const double x_small = x_big != 0.0 ? qc / (qa * x_big) : 0.0;

    const double x_hi = std::min(rs, 1.0 - q);
    double best = -1.0;
    for (double x : {x_small, x_big}) {
        if (x < -1e-12 || x > x_hi + 1e-12) continue;
        double xc = std::min(std::max(x, 0.0), x_hi);
        // physical branch: rs sqrt(gamma_2) equals the + combination
        const double lhs = rs * std::sqrt(std::max(0.0, 1.0 - q - xc));
        const double plus = R * std::sqrt(xc) + sd * std::sqrt(std::max(0.0, rs - xc));
        const double minus = std::abs(R * std::sqrt(xc) - sd * std::sqrt(std::max(0.0, rs - xc)));
        if (std::abs(lhs - plus) > std::abs(lhs - minus) + 1e-14) continue;
        if (std::abs(lhs - plus) > 1e-5 * std::max(1.0, rs)) continue;
        // one Newton step on h(x) = (1-q-x) rs^2 - (R sqrt(x) + sd sqrt(rs-x))^2
        if (xc > 0.0 && xc < std::min(rs, 1.0 - q)) {
            const double sx = std::sqrt(xc), srx = std::sqrt(rs - xc);
            const double w = R * sx + sd * srx;
            const double h = (1.0 - q - xc) * rs * rs - w * w;
            const double dh = -rs * rs - w * (R / sx - sd / srx);
            if (dh != 0.0) {
                const double xn = xc - h / dh;
                if (xn >= 0.0 && xn <= x_hi) xc = xn;
            }
        }
        if (best < 0.0 || xc < best) best = xc;
    }
    if (best < 0.0) throw NoRealRoot("projective branch: no admissible gamma_1 root");
    return {best, 1.0 - q - best};
}

// P_c^(1): Qcr <= Q <= Q_s, written with the smaller diagonal element.
inline double pc_projective_closed(const TwoQubitReduction& r, double q) {
    const double R = r.rho12_abs, rs = r.rho_min(), delta = r.Delta, C = r.confidence();
    const double bracket = delta * (1.0 - 2.0 * rs) - (2.0 * delta - rs) * (1.0 - q) -
                           2.0 * R * radical(delta * (q - q * q - delta));
    return C * (1.0 - q) - (2.0 * C - 1.0) / (1.0 - 4.0 * delta) * bracket;
}

inline Regime classify(const TwoQubitReduction& r, double q) {
    if (q == 0.0) return Regime::minimum_error;
    if (r.rho12_abs <= r.rho_min()) {
        return q < 2.0 * r.rho12_abs ? Regime::general_povm : Regime::large_q;
    }
    const double qs = r.rho11 < r.rho22 ? r.Q1 : r.Q2;
    if (q < r.Qcr) return Regime::general_povm;
    if (q < qs) return Regime::projective_single_state;
    return Regime::large_q;
}

}  // namespace two_qubit_detail

// Workings of the general regime at failure rate q (requires C1 = C2).
inline TwoQubitWorkings two_qubit_workings(const TwoQubitReduction& r, double q) {
    using two_qubit_detail::radical;
    if (!r.equal_confidence())
        throw UnsupportedRegime("two_qubit_workings: general regime needs C1 = C2");
    if (r.confidence() <= 0.5 + 1e-10)
        throw DegenerateEnsemble("two_qubit_workings: C = 1/2 means the states coincide");
    const double R = r.rho12_abs, C = r.confidence();
    TwoQubitWorkings w;
    const double K = radical((1.0 - 2.0 * R) * (1.0 + 2.0 * R - 2.0 * q));
    w.a = 0.5 + 0.5 * (2.0 * C - 1.0) * radical((1.0 - 2.0 * R) / (1.0 + 2.0 * R - 2.0 * q));
    w.Gamma11 = (w.a * w.a - C * (1.0 - C)) / (2.0 * w.a - 1.0);
    w.Gamma12_abs = w.Gamma11 - w.a;
    // K^2 - (rho11-rho22)^2 = 2(1-2R)(Qcr - q): the smaller beta vanishes at
    // Qcr, so it is computed from this difference rather than by subtraction
    const double drho = r.rho11 - r.rho22;
    const double beta_big = (K + std::abs(drho)) / (2.0 * (2.0 * C - 1.0));
    const double beta_small = (1.0 - 2.0 * R) * (r.Qcr - q) /
                              ((K + std::abs(drho)) * (2.0 * C - 1.0));
    w.beta1 = drho >= 0.0 ? beta_big : beta_small;
    w.beta2 = drho >= 0.0 ? beta_small : beta_big;
    w.b = (1.0 - q) / K;
    w.delta = r.phi + std::numbers::pi;
    if (q > 0.0 && q >= r.Qcr - 1e-15 && r.rho12_abs >= r.rho_min()) {
        const auto [g1, g2] = two_qubit_detail::projective_gammas(r, q);
        w.gamma1 = g1;
        w.gamma2 = g2;
        w.chi = -r.phi;
    }
    return w;
}

// Explicit (gamma_1, gamma_2) of the projective branch, Qcr <= Q <= Q_s.
inline std::pair<double, double> projective_branch_gamma(const TwoQubitReduction& r, double q) {
    const double qs = r.rho11 < r.rho22 ? r.Q1 : r.Q2;
    if (q < r.Qcr - 1e-12 || q > qs + 1e-12)
        throw QOutOfRange("projective_branch_gamma: Q outside [Qcr, Q_s]");
    return two_qubit_detail::projective_gammas(r, q);
}

namespace two_qubit_detail {

inline Solution general_regime_solution(const TwoQubitReduction& r, double q) {
    const double C = r.confidence();
    const TwoQubitWorkings w = two_qubit_workings(r, q);

    Solution s;
    s.q = q;
    s.pc_max = pc_general(r, q);
    s.regime = q == 0.0 ? Regime::minimum_error : Regime::general_povm;

    const Matrix wsq = matrix_power_psd(r.rho, -0.5, true);
    const cxd phase = std::polar(1.0, -r.phi);
    const double f = std::sqrt((2.0 * C - 1.0) / 2.0);
    // sqrt(b -+ 1) in cancellation-free form via (1-q)^2 - K^2 = (2R-q)^2
    const double R = r.rho12_abs;
    const double K = radical((1.0 - 2.0 * R) * (1.0 + 2.0 * R - 2.0 * q));
    const double sqrt_bp1 = std::sqrt((1.0 - q + K) / K);
    const double sqrt_bm1 = std::abs(2.0 * R - q) / std::sqrt(K * (1.0 - q + K));
    Vector pi1(2), pi2(2), pi0(2);
    for (int i = 0; i < 2; ++i) {
        pi1[i] = f * (sqrt_bp1 * r.nu1[i] + phase * sqrt_bm1 * r.nu2[i]);
        pi2[i] = f * (sqrt_bm1 * r.nu1[i] + phase * sqrt_bp1 * r.nu2[i]);
        pi0[i] = (r.nu1[i] + phase * r.nu2[i]) / std::sqrt(2.0);
    }
    const Vector t1 = wsq * pi1, t2 = wsq * pi2, t0 = wsq * pi0;
    s.measurement.operators = {q * projector(t0),
                               std::max(w.beta1, 0.0) * projector(t1),
                               std::max(w.beta2, 0.0) * projector(t2)};

    // Z = rho^{1/2} Gamma rho^{1/2} with Gamma from the zero-determinant system
    const cxd g12 = std::polar(w.Gamma12_abs, w.delta);
    const Matrix gamma = w.Gamma11 * projector(r.nu1) + w.Gamma11 * projector(r.nu2) +
                         g12 * outer(r.nu1, r.nu2) + std::conj(g12) * outer(r.nu2, r.nu1);
    const Matrix rho_sq = matrix_power_psd(r.rho, 0.5);
    DualCertificate c;
    c.a = w.a;
    c.gamma = gamma.hermitized();
    c.Z = (rho_sq * gamma * rho_sq).hermitized();
    s.certificate = std::move(c);
    return s;
}

inline Solution projective_regime_solution(const TwoQubitReduction& r, double q) {
    const double C = r.confidence();
    const auto [g1, g2] = projective_gammas(r, q);

    const bool first_small = r.rho11 <= r.rho22;
    const Vector& nu_s = first_small ? r.nu1 : r.nu2;
    const Vector& nu_g = first_small ? r.nu2 : r.nu1;
    const cxd r_sg = inner(nu_s, r.rho * nu_g);
    const double phi_sg = std::abs(r_sg) > 0.0 ? std::arg(r_sg) : 0.0;

    const Matrix wsq = matrix_power_psd(r.rho, -0.5, true);
    Vector pi2(2);
    const Vector ws = wsq * nu_s, wg = wsq * nu_g;
    const cxd chi_phase = std::polar(1.0, -phi_sg);
    for (int i = 0; i < 2; ++i)
        pi2[i] = std::sqrt(g1) * ws[i] + chi_phase * std::sqrt(g2) * wg[i];
    // unit norm holds analytically; renormalizing keeps I - Pi_2 exactly PSD
    const double pi2_norm = norm(pi2);
    for (auto& x : pi2) x /= pi2_norm;

    Solution s;
    s.q = q;
    s.pc_max = C * (1.0 - q) - (2.0 * C - 1.0) * g1;
    s.regime = Regime::projective_single_state;
    const Matrix det = projector(pi2);
    const Matrix inc = (Matrix::identity(2) - det).hermitized();
    if (first_small)
        s.measurement.operators = {inc, Matrix(2), det};
    else
        s.measurement.operators = {inc, det, Matrix(2)};

    // Certificate: Gamma = a I + mu |m><m| with |m> orthogonal to the
    // transformed inconclusive direction; a and mu follow from
    // (Gamma - rho~_g) |w> = 0 with |w> = rho^{1/2}|pi_2>.
    const Matrix rho_sq = matrix_power_psd(r.rho, 0.5);
    Vector wvec(2);
    for (int i = 0; i < 2; ++i)
        wvec[i] = std::sqrt(g1) * nu_s[i] + chi_phase * std::sqrt(g2) * nu_g[i];
    // pi_0 spans the kernel of Pi_2; n ~ rho^{1/2}|pi_0> is the transformed
    // inconclusive direction, m its orthogonal complement.
    const Vector pi0 = {-std::conj(pi2[1]), std::conj(pi2[0])};
    Vector nvec = rho_sq * pi0;
    const double nn = norm(nvec);
    for (auto& x : nvec) x /= nn;
    Vector mvec = {-std::conj(nvec[1]), std::conj(nvec[0])};

    // transformed state of the detected outcome in the (nu_s, nu_g) basis
    const Matrix tilde_g = (1.0 - C) * projector(nu_s) + C * projector(nu_g);
    const Vector tvec = tilde_g * wvec;
    const cxd wn = inner(nvec, wvec), wm = inner(mvec, wvec);
    const cxd tn = inner(nvec, tvec), tm = inner(mvec, tvec);
    const double a = std::real(tn / wn);
    const double mu = std::real(tm / wm) - a;
    DualCertificate c;
    c.a = a;
    Matrix gamma = a * Matrix::identity(2) + mu * projector(mvec);
    c.gamma = gamma.hermitized();
    c.Z = (rho_sq * gamma * rho_sq).hermitized();
    s.certificate = std::move(c);
    return s;
}

}  // namespace two_qubit_detail

// Complete solution for two qubit states with C1 = C2 at fixed failure
// rate Q; for C1 != C2 only Q = 0 (Helstrom) and Q >= Q' are closed-form.
inline Solution solve_two_qubit(const TwoQubitReduction& r, double q) {
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("solve_two_qubit: Q must lie in [0,1)");

    if (!r.equal_confidence()) {
        if (!r.ensemble) throw UnsupportedRegime("solve_two_qubit: reduction lacks its ensemble");
        if (q == 0.0) return helstrom_solution(*r.ensemble);
        if (q >= r.q_prime() - 1e-14) {
            const auto lq = large_q_solution(*r.ensemble, q);
            Solution s;
            s.q = q;
            s.pc_max = lq.pc;
            s.regime = Regime::large_q;
            s.measurement = lq.measurement;
            s.certificate = lq.certificate;
            return s;
        }
        throw UnsupportedRegime("solve_two_qubit: C1 != C2 below Q' has no closed form");
    }

    const Regime regime = two_qubit_detail::classify(r, q);
    switch (regime) {
        case Regime::minimum_error:
        case Regime::general_povm:
            return two_qubit_detail::general_regime_solution(r, q);
        case Regime::projective_single_state:
            return two_qubit_detail::projective_regime_solution(r, q);
        case Regime::large_q:
        default: {
            if (!r.ensemble) throw UnsupportedRegime("solve_two_qubit: reduction lacks its ensemble");
            const auto lq = large_q_solution(*r.ensemble, q);
            Solution s;
            s.q = q;
            s.pc_max = lq.pc;
            s.regime = Regime::large_q;
            s.measurement = lq.measurement;
            s.certificate = lq.certificate;
            return s;
        }
    }
}

// Closed-form P_c^max(Q) without measurement assembly; same branch logic.
inline double two_qubit_pc(const TwoQubitReduction& r, double q) {
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("two_qubit_pc: Q must lie in [0,1)");
    if (!r.equal_confidence()) {
        if (q == 0.0 && r.ensemble) return helstrom_two(*r.ensemble);
        if (q >= r.q_prime() - 1e-14) return std::max(r.C1, r.C2) * (1.0 - q);
        throw UnsupportedRegime("two_qubit_pc: C1 != C2 below Q' has no closed form");
    }
    switch (two_qubit_detail::classify(r, q)) {
        case Regime::minimum_error:
        case Regime::general_povm:
            return two_qubit_detail::pc_general(r, q);
        case Regime::projective_single_state:
            return two_qubit_detail::pc_projective_closed(r, q);
        case Regime::large_q:
        default:
            return r.confidence() * (1.0 - q);
    }
}

inline Regime two_qubit_regime(const TwoQubitReduction& r, double q) {
    if (!r.equal_confidence())
        return q == 0.0 ? Regime::minimum_error : Regime::large_q;
    return two_qubit_detail::classify(r, q);
}

}  // namespace qsd

#endif
