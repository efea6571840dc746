#ifndef QSD_CONFIDENCE_HPP
#define QSD_CONFIDENCE_HPP

// Transformed states rho~_j, per-outcome maximum confidences C_j, the
// saturation threshold Q', and the optimal measurement in the regime where
// the relative rate of correct results is pinned at max_j C_j.

#include <optional>
#include <vector>

#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"

namespace qsd {

// rho~_j = rho^{-1/2} eta_j rho_j rho^{-1/2}; the sum over j is the identity.
inline std::vector<Matrix> transformed_states(const Ensemble& e) {
    Matrix w(e.dim());
    try {
        w = matrix_power_psd(e.total(), -0.5, true);
    } catch (const SingularOperator&) {
        throw NotFullRank("transformed_states: total state must have full rank");
    }
    std::vector<Matrix> out;
    out.reserve(e.size());
    for (int j = 0; j < e.size(); ++j)
        out.push_back((w * (e.prior(j) * e.state(j)) * w).hermitized());
    return out;
}

struct ConfidenceReport {
    std::vector<Matrix> tilde_states;
    std::vector<double> confidences;       // C_j = top eigenvalue of rho~_j
    std::vector<int> degeneracy;           // k_1 per outcome (relative tol 1e-9)
    std::vector<Vector> top_eigenvectors;  // one representative per outcome
    double a_limit = 0.0;                  // max_j C_j
    bool unambiguous_possible = false;     // all C_j = 1
};

inline ConfidenceReport max_confidence(const Ensemble& e) {
    ConfidenceReport r;
    r.tilde_states = transformed_states(e);
    for (const auto& t : r.tilde_states) {
        const auto es = eig_hermitian(t);
        const int n = t.dim();
        const double top = es.eigenvalues.back();
        int k1 = 1;
        while (k1 < n && top - es.eigenvalues[n - 1 - k1] <= 1e-9 * std::max(std::abs(top), 1e-300)) ++k1;
        r.confidences.push_back(top);
        r.degeneracy.push_back(k1);
        r.top_eigenvectors.push_back(eigenvector_column(es, n - 1));
    }
    r.a_limit = *std::max_element(r.confidences.begin(), r.confidences.end());
    r.unambiguous_possible = std::all_of(r.confidences.begin(), r.confidences.end(),
                                         [](double c) { return c > 1.0 - 1e-9; });
    return r;
}

// Family context needed to evaluate Q' and to assemble the large-Q
// measurement; carries whatever the closed forms require.
struct FamilyHint {
    enum class Tag { two_qubit, symmetric_two_group, identity_resolving, generic_symmetric };
    Tag tag = Tag::two_qubit;
    std::optional<SymmetricFamily> family;
    std::vector<Vector> pure_parts;  // |psi_j> for identity-resolving families
    std::optional<Matrix> symmetry;  // V for the generic symmetric path
};

inline bool resolves_identity(const Ensemble& e, double tol = 1e-10) {
    Matrix avg(e.dim());
    for (int j = 0; j < e.size(); ++j) avg += (1.0 / e.size()) * e.state(j);
    return (avg - (1.0 / e.dim()) * Matrix::identity(e.dim())).max_abs() <= tol;
}

// Smallest fixed Q at which P_c^max = (max_j C_j)(1-Q).
inline double q_prime(const Ensemble& e, const std::optional<FamilyHint>& hint = std::nullopt) {
    if (e.size() == 2 && e.dim() == 2 &&
        (!hint || hint->tag == FamilyHint::Tag::two_qubit)) {
        return two_state_reduction(e).q_prime();
    }
    if (hint && hint->tag == FamilyHint::Tag::identity_resolving) {
        if (!resolves_identity(e)) throw NotIdentityResolving("q_prime: states do not resolve the identity");
        return 0.0;
    }
    if (hint && hint->tag == FamilyHint::Tag::symmetric_two_group && hint->family) {
        const SymmetricFamily& f = *hint->family;
        const double a1 = std::norm(f.c1), a2 = std::norm(f.c2);
        if (f.p == 1.0) return 1.0 - f.d * std::min(a1, a2);
        if (f.d == 2) return f.p * std::abs(a1 - a2);
        throw UnsupportedFamily("q_prime: no closed form for mixed qudit two-group families");
    }
    if (resolves_identity(e)) return 0.0;

    // Generic symmetric ensemble with a nondegenerate top eigenvalue:
    // Q' = 1 - min_l r_l / |<r_l|nu_1>|^2 in the common eigenbasis of rho and V.
    if (hint && hint->tag == FamilyHint::Tag::generic_symmetric && hint->symmetry) {
        const auto report = max_confidence(e);
        if (report.degeneracy.front() > 1)
            throw UnsupportedFamily("q_prime: degenerate top eigenvalue has no closed form");
        const Matrix& v = *hint->symmetry;
        if ((v * e.total() - e.total() * v).max_abs() > 1e-9)
            throw SymmetryViolation("q_prime: symmetry operator does not commute with the total state");
        const auto es = eig_hermitian(e.total());
        const Vector& nu1 = report.top_eigenvectors.front();
        double qp = 0.0;
        for (int l = 0; l < e.dim(); ++l) {
            const double w = std::norm(inner(eigenvector_column(es, l), nu1));
            if (w < 1e-14) continue;
            qp = std::max(qp, 1.0 - es.eigenvalues[l] / w);
        }
        return qp;
    }
    throw UnsupportedFamily("q_prime: unsupported family");
}

namespace detail {

// Equal split of the conclusive weight over the top eigenvectors of the
// rho~_j; valid for equiprobable symmetric families with k_1 = 1.
inline Measurement symmetric_large_q_measurement(const Ensemble& e, double q,
                                                 const ConfidenceReport& report) {
    const Matrix w = matrix_power_psd(e.total(), -0.5, true);
    const int n = e.size();
    Measurement m;
    m.operators.assign(n + 1, Matrix(e.dim()));
    Matrix sum(e.dim());
    for (int j = 0; j < n; ++j) {
        const Vector nu = report.top_eigenvectors[j];
        const Vector col = w * nu;
        m.operators[j + 1] = ((1.0 - q) / n) * projector(col);
        sum += m.operators[j + 1];
    }
    m.operators[0] = (Matrix::identity(e.dim()) - sum).hermitized();
    return m;
}

inline Measurement identity_resolving_large_q_measurement(const Ensemble& e, double q,
                                                          const std::vector<Vector>& psis) {
    const int n = e.size();
    const int d = e.dim();
    Measurement m;
    m.operators.assign(n + 1, Matrix(d));
    m.operators[0] = q * Matrix::identity(d);
    for (int j = 0; j < n; ++j)
        m.operators[j + 1] = (static_cast<double>(d) / n) * (1.0 - q) * projector(psis[j]);
    return m;
}

}  // namespace detail

struct LargeQSolution {
    double pc = 0.0;
    Measurement measurement;
    DualCertificate certificate;  // Z = a rho with a = max_j C_j
};

// Optimal measurement for Q >= Q': P_c = (max_j C_j)(1-Q); outcomes with
// C_j below the maximum receive the zero operator.
inline LargeQSolution large_q_solution(const Ensemble& e, double q,
                                       const std::optional<FamilyHint>& hint = std::nullopt) {
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("large_q_solution: Q must lie in [0,1)");
    const double qp = q_prime(e, hint);
    if (q < qp - 1e-12) throw QOutOfRange("large_q_solution: Q below the saturation threshold");

    const auto report = max_confidence(e);
    const double a = report.a_limit;
    LargeQSolution out;
    out.pc = a * (1.0 - q);
    out.certificate.Z = a * e.total();
    out.certificate.a = a;
    out.certificate.gamma = a * Matrix::identity(e.dim());

    if (hint && hint->tag == FamilyHint::Tag::identity_resolving) {
        out.measurement = detail::identity_resolving_large_q_measurement(e, q, hint->pure_parts);
        return out;
    }
    if (e.size() == 2 && e.dim() == 2 && (!hint || hint->tag == FamilyHint::Tag::two_qubit)) {
        const TwoQubitReduction r = two_state_reduction(e);
        const Matrix w = matrix_power_psd(e.total(), -0.5, true);
        Measurement m;
        m.operators.assign(3, Matrix(2));
        double alpha1 = 0.0, alpha2 = 0.0;
        if (r.equal_confidence() && r.rho12_abs <= r.rho_min() && 2.0 * r.rho12_abs < 1.0) {
            // interior point of the admissible split, continuous in Q
            const double t = (1.0 - q) / (1.0 - 2.0 * r.rho12_abs);
            alpha1 = (r.rho11 - r.rho12_abs) * t;
            alpha2 = (r.rho22 - r.rho12_abs) * t;
        } else if (r.equal_confidence()) {
            if (r.rho11 < r.rho22) alpha2 = 1.0 - q; else alpha1 = 1.0 - q;
        } else if (r.C2 > r.C1) {
            alpha2 = 1.0 - q;
        } else {
            alpha1 = 1.0 - q;
        }
        const Vector w1 = w * r.nu1, w2 = w * r.nu2;
        m.operators[1] = alpha1 * projector(w1);
        m.operators[2] = alpha2 * projector(w2);
        m.operators[0] = (Matrix::identity(2) - m.operators[1] - m.operators[2]).hermitized();
        out.measurement = std::move(m);
        return out;
    }
    if (resolves_identity(e) && hint && !hint->pure_parts.empty()) {
        out.measurement = detail::identity_resolving_large_q_measurement(e, q, hint->pure_parts);
        return out;
    }
    // symmetric equal split; requires a nondegenerate top eigenvalue
    for (int j = 0; j < e.size(); ++j)
        if (report.degeneracy[j] > 1)
            throw UnsupportedFamily("large_q_solution: degenerate top eigenspace needs a family-specific split");
    out.measurement = detail::symmetric_large_q_measurement(e, q, report);
    const auto psd = psd_check(out.measurement.inconclusive(), 1e-9);
    if (!psd.psd)
        throw UnsupportedFamily("large_q_solution: equal split infeasible for this ensemble");
    return out;
}

// Achieved confidence of outcome j under measurement m.
inline double outcome_confidence(const Ensemble& e, const Measurement& m, int j) {
    const double denom = trace_product_real(e.total(), m.outcome(j + 1));
    if (denom <= 1e-10) return 0.0;
    return e.prior(j) * trace_product_real(e.state(j), m.outcome(j + 1)) / denom;
}

}  // namespace qsd

#endif
