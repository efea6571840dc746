#ifndef QSD_ENSEMBLE_HPP
#define QSD_ENSEMBLE_HPP

// State families: prior-weighted density operators, the two-qubit reduction
// to confidence/basis data, and constructors for the symmetric families.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qsd/matrix.hpp"

namespace qsd {

class Ensemble {
public:
    // Raw constructor with invariant checks: priors positive summing to 1,
    // states PSD with unit trace on a common dimension, total state full rank.
    Ensemble(std::vector<double> priors, std::vector<Matrix> states)
        : priors_(std::move(priors)), states_(std::move(states)) {
        if (priors_.empty() || priors_.size() != states_.size())
            throw InvalidParameter("Ensemble: priors/states size mismatch");
        double sum = 0.0;
        for (double p : priors_) {
            if (p <= 0.0) throw InvalidParameter("Ensemble: priors must be positive");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidParameter("Ensemble: priors must sum to 1");
        const int d = states_.front().dim();
        for (const auto& s : states_) {
            if (s.dim() != d) throw DimensionMismatch("Ensemble: states on different dimensions");
            if (s.hermiticity_residual() > 1e-10)
                throw NonHermitianInput("Ensemble: state is not Hermitian");
            if (std::abs(std::real(s.trace()) - 1.0) > 1e-10 || std::abs(std::imag(s.trace())) > 1e-12)
                throw InvalidParameter("Ensemble: state trace must be 1");
            if (!psd_check(s, 1e-10).psd)
                throw NotPSD("Ensemble: state is not positive semidefinite");
        }
        total_ = Matrix(d);
        for (size_t j = 0; j < states_.size(); ++j) total_ += priors_[j] * states_[j];
        total_ = total_.hermitized();
        const auto es = eig_hermitian(total_);
        if (es.eigenvalues.front() <= 1e-12 * es.eigenvalues.back())
            throw NotFullRank("Ensemble: total state must have full rank");
    }

    int size() const { return static_cast<int>(states_.size()); }
    int dim() const { return total_.dim(); }
    const std::vector<double>& priors() const { return priors_; }
    const std::vector<Matrix>& states() const { return states_; }
    double prior(int j) const { return priors_.at(j); }
    const Matrix& state(int j) const { return states_.at(j); }
    const Matrix& total() const { return total_; }

private:
    std::vector<double> priors_;
    std::vector<Matrix> states_;
    Matrix total_;
};

// Data of a two-state qubit problem in the eigenbasis of rho~_1:
// confidences, matrix elements of rho, and the failure-rate thresholds.
struct TwoQubitReduction {
    double C1 = 0.0, C2 = 0.0;
    double rho11 = 0.0, rho22 = 0.0;
    double rho12_abs = 0.0;
    double phi = 0.0;            // phase of <nu1|rho|nu2>
    double Q1 = 0.0, Q2 = 0.0;   // rho_jj + |rho12|^2 / rho_jj
    double Qcr = 0.0;
    double Delta = 0.0;          // rho11 rho22 - |rho12|^2
    Vector nu1, nu2;             // orthonormal basis vectors, original coordinates
    Matrix rho;                  // total state, original coordinates
    std::optional<Ensemble> ensemble;

    bool equal_confidence(double tol = 1e-8) const { return std::abs(C1 - C2) < tol; }
    double confidence() const { return 0.5 * (C1 + C2); }
    double rho_min() const { return std::min(rho11, rho22); }
    double rho_max() const { return std::max(rho11, rho22); }
    // Threshold where the relative rate saturates at max(C1,C2).
    double q_prime() const {
        if (equal_confidence()) {
            if (rho12_abs <= rho_min()) return 2.0 * rho12_abs;
            return rho11 < rho22 ? Q1 : Q2;
        }
        return C2 > C1 ? Q1 : Q2;
    }
};

// rho_{1/2} = p_{1/2} |psi_{1/2}><psi_{1/2}| + (1-p_{1/2})/2 * I with
// <psi1|psi2> = S, embedded as |psi1> = (1,0), |psi2> = (S, sqrt(1-|S|^2)).
inline Ensemble make_two_qubit(double p1, double p2, double eta1, cxd S) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw InvalidParameter("make_two_qubit: purity parameters must lie in [0,1]");
    if (eta1 <= 0.0 || eta1 >= 1.0)
        throw InvalidParameter("make_two_qubit: eta1 must lie in (0,1)");
    const double s_abs = std::abs(S);
    if (s_abs > 1.0 + 1e-14) throw InvalidParameter("make_two_qubit: |S| must be <= 1");

    const Vector psi1 = {1.0, 0.0};
    const Vector psi2 = {S, std::sqrt(std::max(0.0, 1.0 - s_abs * s_abs))};
    Matrix rho1 = p1 * projector(psi1) + ((1.0 - p1) / 2.0) * Matrix::identity(2);
    Matrix rho2 = p2 * projector(psi2) + ((1.0 - p2) / 2.0) * Matrix::identity(2);
    if ((rho1 - rho2).max_abs() < 1e-12)
        throw DegenerateEnsemble("make_two_qubit: the two states coincide");
    return Ensemble({eta1, 1.0 - eta1}, {rho1, rho2});
}

// The unique prior in (0,1) for which both outcomes admit the same maximum
// confidence: (1/eta1 - 1)^2 = (1-p1^2)/(1-p2^2). For two pure states any
// prior qualifies; the marker value 1/2 is returned with the flag set.
struct EqualConfidencePrior {
    double eta1 = 0.5;
    bool any_prior_admissible = false;
};

inline EqualConfidencePrior eta1_for_equal_confidence(double p1, double p2) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw InvalidParameter("eta1_for_equal_confidence: purities must lie in [0,1]");
    if (p1 == 1.0 && p2 == 1.0) return {0.5, true};
    if (p1 == 1.0 || p2 == 1.0)
        throw InvalidParameter("eta1_for_equal_confidence: exactly one pure state has no equal-confidence prior");
    const double ratio = std::sqrt((1.0 - p1 * p1) / (1.0 - p2 * p2));
    return {1.0 / (1.0 + ratio), false};
}

// Diagonalize rho~_1 = rho^{-1/2} eta1 rho1 rho^{-1/2} and collect the
// basis-dependent data the two-qubit solver consumes.
inline TwoQubitReduction two_state_reduction(const Ensemble& e) {
    if (e.size() != 2) throw DimensionMismatch("two_state_reduction: needs exactly two states");
    if (e.dim() != 2) throw DimensionMismatch("two_state_reduction: needs a two-dimensional space");

    const Matrix w = matrix_power_psd(e.total(), -0.5, true);
    const Matrix t1 = (w * (e.prior(0) * e.state(0)) * w).hermitized();
    const auto es = eig_hermitian(t1);

    TwoQubitReduction r;
    r.C1 = es.eigenvalues[1];
    r.C2 = 1.0 - es.eigenvalues[0];
    r.nu1 = eigenvector_column(es, 1);
    r.nu2 = eigenvector_column(es, 0);
    r.rho = e.total();
    r.rho11 = std::real(expectation(r.nu1, r.rho));
    r.rho22 = std::real(expectation(r.nu2, r.rho));
    const cxd r12 = inner(r.nu1, r.rho * r.nu2);
    r.rho12_abs = std::abs(r12);
    r.phi = (r.rho12_abs > 0.0) ? std::arg(r12) : 0.0;
    r.Delta = r.rho11 * r.rho22 - r.rho12_abs * r.rho12_abs;
    r.Q1 = r.rho11 + r.rho12_abs * r.rho12_abs / r.rho11;
    r.Q2 = r.rho22 + r.rho12_abs * r.rho12_abs / r.rho22;
    r.Qcr = 2.0 * r.Delta / (1.0 - 2.0 * r.rho12_abs);
    r.ensemble = e;

    if (std::abs(r.rho11 + r.rho22 - 1.0) > 1e-12)
        throw Error("two_state_reduction: diagonal elements do not sum to 1");
    const double res1 = std::abs(r.C1 * r.rho11 + (1.0 - r.C2) * r.rho22 - e.prior(0));
    const double res2 = std::abs((1.0 - r.C1) * r.rho11 + r.C2 * r.rho22 - e.prior(1));
    if (std::max(res1, res2) > 1e-10)
        throw Error("two_state_reduction: prior consistency check failed");
    return r;
}

// Reconstruct a two-state qubit ensemble directly from reduction data
// (rho11, |rho12|, C): eta_j follows from the confidences and the states
// from rho_j = rho^{1/2} rho~_j rho^{1/2} / eta_j in the nu basis.
inline std::pair<Ensemble, TwoQubitReduction>
make_two_qubit_from_reduction(double rho11, double rho12_abs, double C, double phi = 0.0) {
    if (rho11 <= 0.0 || rho11 >= 1.0)
        throw InvalidParameter("make_two_qubit_from_reduction: rho11 must lie in (0,1)");
    if (C <= 0.5 || C > 1.0)
        throw InvalidParameter("make_two_qubit_from_reduction: C must lie in (1/2,1]");
    const double rho22 = 1.0 - rho11;
    const double delta = rho11 * rho22 - rho12_abs * rho12_abs;
    if (rho12_abs < 0.0 || delta <= 0.0)
        throw InvalidParameter("make_two_qubit_from_reduction: need 0 <= |rho12| < sqrt(rho11 rho22)");

    Matrix rho(2);
    rho(0, 0) = rho11;
    rho(1, 1) = rho22;
    rho(0, 1) = std::polar(rho12_abs, phi);
    rho(1, 0) = std::conj(rho(0, 1));
    const Matrix sq = matrix_power_psd(rho, 0.5);
    Matrix t1(2), t2(2);
    t1(0, 0) = C;
    t1(1, 1) = 1.0 - C;
    t2(0, 0) = 1.0 - C;
    t2(1, 1) = C;
    const double eta1 = C * rho11 + (1.0 - C) * rho22;
    const double eta2 = 1.0 - eta1;
    const Matrix rho1 = (sq * t1 * sq).hermitized() * (1.0 / eta1);
    const Matrix rho2 = (sq * t2 * sq).hermitized() * (1.0 / eta2);
    Ensemble e({eta1, eta2}, {rho1, rho2});
    TwoQubitReduction r = two_state_reduction(e);
    return {std::move(e), std::move(r)};
}

enum class FamilyKind {
    pure_qudit_two_coefficient,
    mixed_qubit,
    equal_overlap,
    rank_d_block,
    identity_resolving,
    tetrad,
    trine,
};

inline std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::pure_qudit_two_coefficient: return "pure-qudit-two-coefficient";
        case FamilyKind::mixed_qubit: return "mixed-qubit";
        case FamilyKind::equal_overlap: return "equal-overlap";
        case FamilyKind::rank_d_block: return "rank-D-block";
        case FamilyKind::identity_resolving: return "identity-resolving";
        case FamilyKind::tetrad: return "tetrad";
        case FamilyKind::trine: return "trine";
    }
    return "?";
}

// Constructor parameters for the symmetric / partially structured families.
struct SymmetricFamily {
    FamilyKind kind = FamilyKind::equal_overlap;
    int N = 0;                      // number of states
    int d = 0;                      // joint dimension
    int m = 1;                      // multiplicity of the first coefficient
    cxd c1 = 0.0, c2 = 0.0;         // expansion coefficients
    double p = 1.0;                 // purity parameter
    double S = 0.0;                 // common overlap
    int D = 1;                      // block rank
    std::vector<double> lambdas;    // spectral weights of a rank-D state
    std::vector<int> v_exponents;   // k_l with v_l = exp(2 pi i k_l / N)

    static SymmetricFamily pure_two_coefficient(int N, int d, int m, cxd c1, cxd c2);
    static SymmetricFamily equal_overlap_family(int N, double S);
    static SymmetricFamily mixed_qubit_family(int N, cxd c1, cxd c2, double p);
    static SymmetricFamily rank_d_family(int N, int D, double S, std::vector<double> lambdas);
    static SymmetricFamily identity_resolving_family(int N, int d, double p);
    static SymmetricFamily tetrad_family(double p);
    static SymmetricFamily trine_family(double p);

    void validate() const;
    std::vector<int> exponents_or_default() const {
        if (!v_exponents.empty()) return v_exponents;
        std::vector<int> k(d);
        for (int l = 0; l < d; ++l) k[l] = l;
        return k;
    }
};

inline SymmetricFamily SymmetricFamily::pure_two_coefficient(int N, int d, int m, cxd c1, cxd c2) {
    SymmetricFamily f;
    f.kind = FamilyKind::pure_qudit_two_coefficient;
    f.N = N;
    f.d = d;
    f.m = m;
    f.c1 = c1;
    f.c2 = c2;
    f.p = 1.0;
    f.validate();
    return f;
}

inline SymmetricFamily SymmetricFamily::equal_overlap_family(int N, double S) {
    SymmetricFamily f;
    f.kind = FamilyKind::equal_overlap;
    f.N = N;
    f.d = N;
    f.m = 1;
    f.S = S;
    f.p = 1.0;
    if (N < 2) throw InvalidParameter("equal_overlap: N must be >= 2");
    if (S <= -1.0 / (N - 1.0) || S >= 1.0)
        throw InvalidParameter("equal_overlap: S must lie in (-1/(N-1), 1)");
    f.c1 = std::sqrt((1.0 + (N - 1.0) * S) / N);
    f.c2 = std::sqrt((1.0 - S) / N);
    f.validate();
    return f;
}

inline SymmetricFamily SymmetricFamily::mixed_qubit_family(int N, cxd c1, cxd c2, double p) {
    SymmetricFamily f;
    f.kind = FamilyKind::mixed_qubit;
    f.N = N;
    f.d = 2;
    f.m = 1;
    f.c1 = c1;
    f.c2 = c2;
    f.p = p;
    f.validate();
    return f;
}

inline SymmetricFamily SymmetricFamily::rank_d_family(int N, int D, double S, std::vector<double> lambdas) {
    SymmetricFamily f;
    f.kind = FamilyKind::rank_d_block;
    f.N = N;
    f.d = N * D;
    f.m = 1;
    f.D = D;
    f.S = S;
    f.p = 1.0;
    f.lambdas = std::move(lambdas);
    if (N < 2) throw InvalidParameter("rank_d: N must be >= 2");
    if (D < 1) throw InvalidParameter("rank_d: D must be >= 1");
    if (S <= -1.0 / (N - 1.0) || S >= 1.0)
        throw InvalidParameter("rank_d: S must lie in (-1/(N-1), 1)");
    if (static_cast<int>(f.lambdas.size()) != D)
        throw InvalidParameter("rank_d: lambdas must have D entries");
    double sum = 0.0;
    for (double l : f.lambdas) {
        if (l <= 0.0) throw InvalidParameter("rank_d: lambdas must be positive");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("rank_d: lambdas must sum to 1");
    return f;
}

inline SymmetricFamily SymmetricFamily::identity_resolving_family(int N, int d, double p) {
    SymmetricFamily f;
    f.kind = FamilyKind::identity_resolving;
    f.N = N;
    f.d = d;
    f.m = 0;  // unused: all coefficients equal
    f.p = p;
    if (N < 2 || d < 2 || d > N)
        throw InvalidParameter("identity_resolving: need 2 <= d <= N");
    if (p < 0.0 || p > 1.0) throw InvalidParameter("identity_resolving: p must lie in [0,1]");
    f.c1 = f.c2 = 1.0 / std::sqrt(static_cast<double>(d));
    return f;
}

inline SymmetricFamily SymmetricFamily::tetrad_family(double p) {
    SymmetricFamily f;
    f.kind = FamilyKind::tetrad;
    f.N = 4;
    f.d = 2;
    f.p = p;
    if (p < 0.0 || p > 1.0) throw InvalidParameter("tetrad: p must lie in [0,1]");
    return f;
}

inline SymmetricFamily SymmetricFamily::trine_family(double p) {
    SymmetricFamily f;
    f.kind = FamilyKind::trine;
    f.N = 3;
    f.d = 2;
    f.p = p;
    if (p < 0.0 || p > 1.0) throw InvalidParameter("trine: p must lie in [0,1]");
    return f;
}

inline void SymmetricFamily::validate() const {
    if (N < 2) throw InvalidParameter("SymmetricFamily: N must be >= 2");
    if (d < 2 || d > N) throw InvalidParameter("SymmetricFamily: need 2 <= d <= N");
    if (p < 0.0 || p > 1.0) throw InvalidParameter("SymmetricFamily: p must lie in [0,1]");
    if (std::abs(c1) == 0.0 || std::abs(c2) == 0.0)
        throw InvalidParameter("SymmetricFamily: coefficients must be nonzero");
    const double norm = m * std::norm(c1) + (d - m) * std::norm(c2);
    if (std::abs(norm - 1.0) > 1e-12)
        throw InvalidParameter("SymmetricFamily: m|c1|^2 + (d-m)|c2|^2 must equal 1");
    if (kind == FamilyKind::pure_qudit_two_coefficient || kind == FamilyKind::equal_overlap) {
        if (2 * m > d) throw InvalidParameter("SymmetricFamily: m must not exceed d/2");
        if (m < 1) throw InvalidParameter("SymmetricFamily: m must be >= 1");
    }
    if (kind == FamilyKind::mixed_qubit && d != 2)
        throw InvalidParameter("SymmetricFamily: mixed-qubit requires d = 2");
    const auto k = exponents_or_default();
    if (static_cast<int>(k.size()) != d)
        throw InvalidParameter("SymmetricFamily: need d symmetry exponents");
    for (size_t i = 0; i < k.size(); ++i)
        for (size_t j = i + 1; j < k.size(); ++j)
            if ((k[i] - k[j]) % N == 0)
                throw InvalidParameter("SymmetricFamily: symmetry exponents must be distinct mod N");
}

struct SymmetricEnsemble {
    Ensemble ensemble;
    Matrix symmetry;                 // unitary V with V^N = I (partial for the tetrad)
    std::vector<Vector> pure_parts;  // |psi_j>, when the states are depolarized pure states
};

namespace detail {

inline Matrix symmetry_operator(const SymmetricFamily& f) {
    const auto k = f.exponents_or_default();
    Matrix v(f.d);
    for (int l = 0; l < f.d; ++l)
        v(l, l) = std::polar(1.0, 2.0 * std::numbers::pi * k[l] / f.N);
    return v;
}

inline Vector reference_state(const SymmetricFamily& f) {
    Vector psi(f.d, cxd(0.0, 0.0));
    for (int l = 0; l < f.d; ++l) psi[l] = (l < f.m) ? f.c1 : f.c2;
    return psi;
}

}  // namespace detail

// Equiprobable symmetric ensemble rho_j = V^{j-1} rho_1 V^{+(j-1)}.
// The tetrad is only partially symmetric: V cycles the first three states
// and fixes the fourth, so the covariance check is skipped for it.
inline SymmetricEnsemble make_symmetric(const SymmetricFamily& f) {
    std::vector<Vector> psis;
    Matrix v(2);
    int N = f.N;
    double p = f.p;

    switch (f.kind) {
        case FamilyKind::tetrad: {
            v = Matrix(2);
            v(0, 0) = 1.0;
            v(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
            const double s23 = std::sqrt(2.0 / 3.0), s13 = std::sqrt(1.0 / 3.0);
            for (int j = 1; j <= 3; ++j) {
                const cxd w = std::polar(1.0, 2.0 * std::numbers::pi * j / 3.0);
                psis.push_back({-s13, s23 * w});
            }
            psis.push_back({1.0, 0.0});
            break;
        }
        case FamilyKind::trine: {
            SymmetricFamily base = f;
            base.kind = FamilyKind::mixed_qubit;
            const double inv = 1.0 / std::sqrt(2.0);
            base.c1 = inv * std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
            base.c2 = inv * std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
            base.m = 1;
            return make_symmetric(base);
        }
        case FamilyKind::rank_d_block:
            throw InvalidParameter("make_symmetric: rank-D families use make_rank_D");
        default: {
            if (f.kind == FamilyKind::identity_resolving) {
                SymmetricFamily base = f;
                base.c1 = base.c2 = 1.0 / std::sqrt(static_cast<double>(f.d));
                base.m = 1;
                v = detail::symmetry_operator(base);
                const Vector psi1 = detail::reference_state(base);
                Vector cur = psi1;
                for (int j = 0; j < N; ++j) {
                    psis.push_back(cur);
                    cur = v * cur;
                }
            } else {
                v = detail::symmetry_operator(f);
                Vector cur = detail::reference_state(f);
                for (int j = 0; j < N; ++j) {
                    psis.push_back(cur);
                    cur = v * cur;
                }
            }
            break;
        }
    }

    const int d = static_cast<int>(psis.front().size());
    std::vector<Matrix> states;
    for (const auto& psi : psis)
        states.push_back((p * projector(psi) + ((1.0 - p) / d) * Matrix::identity(d)).hermitized());
    Ensemble e(std::vector<double>(N, 1.0 / N), states);

    if (f.kind != FamilyKind::tetrad) {
        for (int j = 1; j < N; ++j) {
            const Matrix expect = (v * e.state(j - 1) * v.adjoint()).hermitized();
            if ((expect - e.state(j)).max_abs() > 1e-10)
                throw SymmetryViolation("make_symmetric: states are not covariant under V");
        }
        if (f.kind == FamilyKind::equal_overlap) {
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    if (i != j && std::abs(inner(psis[i], psis[j]) - cxd(f.S, 0.0)) > 1e-10)
                        throw SymmetryViolation("make_symmetric: overlaps are not the prescribed S");
        }
    }
    return {std::move(e), std::move(v), std::move(psis)};
}

struct RankDEnsemble {
    Ensemble ensemble;
    std::vector<std::vector<Vector>> block_states;  // [block k][state j] embedded eigenvectors
};

// N mixed states of rank D on dimension N*D: D mutually orthogonal blocks,
// each carrying an equal-overlap pure family; eigenvalues lambda_k shared
// across states. Priors need not be equal.
inline RankDEnsemble make_rank_D(const SymmetricFamily& f, const std::vector<double>& priors) {
    if (f.kind != FamilyKind::rank_d_block)
        throw InvalidParameter("make_rank_D: family kind must be rank-D-block");
    if (static_cast<int>(priors.size()) != f.N)
        throw InvalidParameter("make_rank_D: need N priors");

    const SymmetricFamily block = SymmetricFamily::equal_overlap_family(f.N, f.S);
    const Vector psi1 = detail::reference_state(block);
    const Matrix v = detail::symmetry_operator(block);

    std::vector<Vector> block_psis;
    Vector cur = psi1;
    for (int j = 0; j < f.N; ++j) {
        block_psis.push_back(cur);
        cur = v * cur;
    }

    const int dim = f.N * f.D;
    std::vector<std::vector<Vector>> embedded(f.D, std::vector<Vector>(f.N));
    for (int k = 0; k < f.D; ++k)
        for (int j = 0; j < f.N; ++j) {
            Vector big(dim, cxd(0.0, 0.0));
            for (int l = 0; l < f.N; ++l) big[k * f.N + l] = block_psis[j][l];
            embedded[k][j] = std::move(big);
        }

    std::vector<Matrix> states;
    for (int j = 0; j < f.N; ++j) {
        Matrix s(dim);
        for (int k = 0; k < f.D; ++k) s += f.lambdas[k] * projector(embedded[k][j]);
        states.push_back(s.hermitized());
    }
    return {Ensemble(priors, states), std::move(embedded)};
}

}  // namespace qsd

#endif
