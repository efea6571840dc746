#ifndef QSD_SYMMETRIC_HPP
#define QSD_SYMMETRIC_HPP

// Closed-form solutions for the symmetric families: N equiprobable pure
// qudit states with two distinct expansion coefficients, N mixed qubit
// states, rank-D block states, and ensembles that resolve the identity.

#include <cmath>

#include "qsd/confidence.hpp"
#include "qsd/solution.hpp"
#include "qsd/two_qubit.hpp"

namespace qsd {

namespace symmetric_detail {

// Group data with indices mirrored so that group "g" carries the larger
// coefficient magnitude; the derivation swaps 1<->2 and m<->d-m.
struct TwoGroup {
    bool first_big = true;  // group 1 has the larger coefficient
    int mg = 0, ms = 0;
    double cg = 0.0, cs = 0.0;   // coefficient magnitudes
    cxd phase_g = 1.0, phase_s = 1.0;
    double rg = 0.0, rs = 0.0;   // eigenvalues of rho on the two groups
};

inline TwoGroup two_group(const SymmetricFamily& f) {
    TwoGroup g;
    const double a1 = std::abs(f.c1), a2 = std::abs(f.c2);
    g.first_big = a1 >= a2;
    g.mg = g.first_big ? f.m : f.d - f.m;
    g.ms = f.d - g.mg;
    g.cg = g.first_big ? a1 : a2;
    g.cs = g.first_big ? a2 : a1;
    g.phase_g = (g.first_big ? f.c1 : f.c2) / g.cg;
    g.phase_s = (g.first_big ? f.c2 : f.c1) / g.cs;
    g.rg = f.p * g.cg * g.cg + (1.0 - f.p) / f.d;
    g.rs = f.p * g.cs * g.cs + (1.0 - f.p) / f.d;
    return g;
}

inline bool in_big_group(const SymmetricFamily& f, const TwoGroup& g, int l) {
    return g.first_big ? (l < f.m) : (l >= f.m);
}

}  // namespace symmetric_detail

inline bool is_identity_resolving_kind(FamilyKind k) {
    return k == FamilyKind::identity_resolving || k == FamilyKind::tetrad || k == FamilyKind::trine;
}

// Maximum confidence C (equal for all outcomes of a symmetric family).
inline double symmetric_confidence(const SymmetricFamily& f) {
    if (is_identity_resolving_kind(f.kind))
        return (1.0 + f.p * (f.d - 1.0)) / f.N;
    const auto g = symmetric_detail::two_group(f);
    if (f.p == 1.0) return static_cast<double>(f.d) / f.N;
    if (f.d == 2) {
        const double prod = g.cg * g.cs;
        const double diff = g.cg * g.cg - g.cs * g.cs;
        return (1.0 + 2.0 * f.p * prod / std::sqrt(1.0 - f.p * f.p * diff * diff)) / f.N;
    }
    throw UnsupportedFamily("symmetric_confidence: no closed form for mixed qudits with d > 2");
}

// Saturation threshold Q' of the family.
inline double symmetric_q_prime(const SymmetricFamily& f) {
    if (is_identity_resolving_kind(f.kind)) return 0.0;
    const auto g = symmetric_detail::two_group(f);
    if (f.p == 1.0) return 1.0 - f.d * g.cs * g.cs;
    if (f.d == 2) return f.p * (g.cg * g.cg - g.cs * g.cs);
    throw UnsupportedFamily("symmetric_q_prime: no closed form for mixed qudits with d > 2");
}

// Closed-form P_c^max(Q) without measurement assembly.
inline double symmetric_pc(const SymmetricFamily& f, double q) {
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("symmetric_pc: Q must lie in [0,1)");
    const double C = symmetric_confidence(f);
    if (is_identity_resolving_kind(f.kind)) return C * (1.0 - q);
    const double qp = symmetric_q_prime(f);
    if (q >= qp) return C * (1.0 - q);
    const auto g = symmetric_detail::two_group(f);
    const double w2 = (g.mg * g.rg - q) / (g.mg * g.rg);
    const double w = std::sqrt(w2);
    return f.p / f.N * std::pow(g.mg * g.cg * w + g.ms * g.cs, 2) +
           (1.0 - f.p) / (f.N * f.d) * (g.mg * w2 + g.ms);
}

inline Regime symmetric_regime(const SymmetricFamily& f, double q) {
    if (q == 0.0) return Regime::minimum_error;
    if (is_identity_resolving_kind(f.kind)) return Regime::large_q;
    return q < symmetric_q_prime(f) ? Regime::general_povm : Regime::large_q;
}

inline FamilyHint symmetric_hint(const SymmetricFamily& f, const SymmetricEnsemble& se) {
    FamilyHint h;
    h.tag = is_identity_resolving_kind(f.kind) ? FamilyHint::Tag::identity_resolving
                                               : FamilyHint::Tag::symmetric_two_group;
    h.family = f;
    h.pure_parts = se.pure_parts;
    h.symmetry = se.symmetry;
    return h;
}

namespace symmetric_detail {

inline Solution large_q_symmetric(const SymmetricFamily& f, const SymmetricEnsemble& se, double q) {
    const auto lq = large_q_solution(se.ensemble, q, symmetric_hint(f, se));
    Solution s;
    s.q = q;
    s.pc_max = lq.pc;
    s.regime = q == 0.0 ? Regime::minimum_error : Regime::large_q;
    s.measurement = lq.measurement;
    s.certificate = lq.certificate;
    return s;
}

// General branch (Q <= Q'): rank-one covariant detection operators with the
// conclusive weight shifted off the large-coefficient group.
inline Solution two_group_general_solution(const SymmetricFamily& f, const SymmetricEnsemble& se,
                                           double q) {
    const TwoGroup g = two_group(f);
    const int d = f.d, N = f.N;
    const double w2 = (g.mg * g.rg - q) / (g.mg * g.rg);
    const double w = std::sqrt(w2);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));

    Vector vt(d);
    for (int l = 0; l < d; ++l)
        vt[l] = in_big_group(f, g, l) ? (w * inv_sqrt_n) * g.phase_g : inv_sqrt_n * g.phase_s;

    Measurement m;
    m.operators.assign(N + 1, Matrix(d));
    Matrix pi0(d);
    for (int l = 0; l < d; ++l)
        if (in_big_group(f, g, l)) pi0(l, l) = 1.0 - w2;
    m.operators[0] = pi0;
    Matrix cur = projector(vt);
    for (int j = 0; j < N; ++j) {
        m.operators[1 + j] = cur;
        cur = (se.symmetry * cur * se.symmetry.adjoint()).hermitized();
    }

    const double inner_sum = inv_sqrt_n * (g.mg * g.cg * w + g.ms * g.cs);
    const double zg = f.p / N * (g.cg / (w * inv_sqrt_n)) * inner_sum + (1.0 - f.p) / (d * N);
    const double zs = f.p / N * (g.cs / inv_sqrt_n) * inner_sum + (1.0 - f.p) / (d * N);
    DualCertificate c;
    c.a = zg / g.rg;
    c.Z = Matrix(d);
    for (int l = 0; l < d; ++l) c.Z(l, l) = in_big_group(f, g, l) ? zg : zs;

    Solution s;
    s.q = q;
    s.pc_max = symmetric_pc(f, q);
    s.regime = q == 0.0 ? Regime::minimum_error : Regime::general_povm;
    s.measurement = std::move(m);
    s.certificate = std::move(c);
    return s;
}

}  // namespace symmetric_detail

// N equiprobable symmetric states built on two coefficient groups; pure
// qudits (any d <= N) or mixed qubits (d = 2). Dispatches on Q'.
inline Solution solve_symmetric(const SymmetricFamily& f, double q) {
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("solve_symmetric: Q must lie in [0,1)");
    const auto se = make_symmetric(f);
    if (is_identity_resolving_kind(f.kind) ||
        std::abs(std::abs(f.c1) - std::abs(f.c2)) < 1e-14) {
        // Q' = 0: every Q sits in the saturated regime
        return symmetric_detail::large_q_symmetric(f, se, q);
    }
    if (q < symmetric_q_prime(f))
        return symmetric_detail::two_group_general_solution(f, se, q);
    return symmetric_detail::large_q_symmetric(f, se, q);
}

inline Solution solve_symmetric_pure(const SymmetricFamily& f, double q) {
    if (f.kind != FamilyKind::pure_qudit_two_coefficient && f.kind != FamilyKind::equal_overlap)
        throw UnsupportedFamily("solve_symmetric_pure: needs a pure two-coefficient family");
    return solve_symmetric(f, q);
}

inline Solution solve_symmetric_mixed_qubit(const SymmetricFamily& f, double q) {
    if (f.kind != FamilyKind::mixed_qubit && f.kind != FamilyKind::trine)
        throw UnsupportedFamily("solve_symmetric_mixed_qubit: needs a mixed-qubit family");
    return solve_symmetric(f, q);
}

// P_c = C(1-Q) for every Q when the states resolve the identity; the
// measurement keeps the state projectors and routes weight Q to Pi_0 = Q I.
inline Solution solve_identity_resolving(const SymmetricFamily& f, double q) {
    if (!is_identity_resolving_kind(f.kind))
        throw UnsupportedFamily("solve_identity_resolving: wrong family kind");
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("solve_identity_resolving: Q must lie in [0,1)");
    const auto se = make_symmetric(f);
    if (!resolves_identity(se.ensemble, 1e-10))
        throw NotIdentityResolving("solve_identity_resolving: (1/N) sum rho_j != I/d");

    const int d = f.d, N = f.N;
    const double C = (1.0 + f.p * (d - 1.0)) / N;
    Solution s;
    s.q = q;
    s.pc_max = C * (1.0 - q);
    s.regime = q == 0.0 ? Regime::minimum_error : Regime::large_q;
    s.measurement.operators.assign(N + 1, Matrix(d));
    s.measurement.operators[0] = q * Matrix::identity(d);
    for (int j = 0; j < N; ++j)
        s.measurement.operators[1 + j] =
            (static_cast<double>(d) / N) * (1.0 - q) * projector(se.pure_parts[j]);
    DualCertificate c;
    c.a = C;
    c.Z = C * se.ensemble.total();
    c.gamma = C * Matrix::identity(d);
    s.certificate = std::move(c);
    return s;
}

namespace symmetric_detail {

inline Matrix embed_block(const Matrix& block, int blocks, int which) {
    const int n = block.dim();
    Matrix big(n * blocks);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) big(which * n + i, which * n + j) = block(i, j);
    return big;
}

// Block-local problem of a rank-D family: N pure states with equal mutual
// overlaps S. N = 2 admits arbitrary priors via the two-state solver;
// N >= 3 requires equiprobable priors.
inline Solution rank_d_block_solution(const SymmetricFamily& f, const std::vector<double>& priors,
                                      double q) {
    const bool equiprobable = std::all_of(priors.begin(), priors.end(), [&](double p) {
        return std::abs(p - 1.0 / f.N) < 1e-12;
    });
    if (f.N == 2) {
        const auto block = SymmetricFamily::equal_overlap_family(2, f.S);
        const auto se = make_symmetric(block);
        Ensemble e(priors, {se.ensemble.state(0), se.ensemble.state(1)});
        return solve_two_qubit(two_state_reduction(e), q);
    }
    if (!equiprobable)
        throw UnsupportedFamily("solve_rank_D: non-equiprobable priors are solvable only for N = 2");
    return solve_symmetric_pure(SymmetricFamily::equal_overlap_family(f.N, f.S), q);
}

}  // namespace symmetric_detail

// Rank-D block states: the optimum is block-diagonal with identical
// per-block solutions; P_c^max does not depend on D or on the lambdas.
inline Solution solve_rank_D(const SymmetricFamily& f, const std::vector<double>& priors, double q) {
    if (f.kind != FamilyKind::rank_d_block)
        throw UnsupportedFamily("solve_rank_D: needs a rank-D-block family");
    const Solution block = symmetric_detail::rank_d_block_solution(f, priors, q);

    Solution s;
    s.q = q;
    s.pc_max = block.pc_max;
    s.regime = block.regime;
    s.measurement.operators.reserve(f.N + 2);
    for (const auto& op : block.measurement.operators) {
        Matrix big(f.N * f.D);
        for (int k = 0; k < f.D; ++k) big += symmetric_detail::embed_block(op, f.D, k);
        s.measurement.operators.push_back(std::move(big));
    }
    if (block.certificate) {
        DualCertificate c;
        c.a = block.certificate->a;
        c.Z = Matrix(f.N * f.D);
        for (int k = 0; k < f.D; ++k)
            c.Z += f.lambdas[k] * symmetric_detail::embed_block(block.certificate->Z, f.D, k);
        s.certificate = std::move(c);
    }
    return s;
}

inline double rank_d_pc(const SymmetricFamily& f, const std::vector<double>& priors, double q) {
    if (f.kind != FamilyKind::rank_d_block)
        throw UnsupportedFamily("rank_d_pc: needs a rank-D-block family");
    const bool equiprobable = std::all_of(priors.begin(), priors.end(), [&](double p) {
        return std::abs(p - 1.0 / f.N) < 1e-12;
    });
    if (f.N == 2) {
        const auto block = SymmetricFamily::equal_overlap_family(2, f.S);
        const auto se = make_symmetric(block);
        Ensemble e(priors, {se.ensemble.state(0), se.ensemble.state(1)});
        return two_qubit_pc(two_state_reduction(e), q);
    }
    if (!equiprobable)
        throw UnsupportedFamily("rank_d_pc: non-equiprobable priors are solvable only for N = 2");
    return symmetric_pc(SymmetricFamily::equal_overlap_family(f.N, f.S), q);
}

}  // namespace qsd

#endif
