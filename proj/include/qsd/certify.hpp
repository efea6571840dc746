#ifndef QSD_CERTIFY_HPP
#define QSD_CERTIFY_HPP

// Numerical verification of the operator optimality conditions, the
// primal-dual gap, and the condition checker for partially symmetric sets.

#include <vector>

#include "qsd/confidence.hpp"
#include "qsd/measurement.hpp"

namespace qsd {

struct PovmReport {
    std::vector<double> min_eigenvalues;  // one per operator
    double completeness_residual = 0.0;   // max-entry norm of sum - I
    bool pass = false;
};

inline PovmReport check_povm(const Measurement& m, double tol) {
    if (m.operators.empty()) throw DimensionMismatch("check_povm: empty measurement");
    const int d = m.dim();
    PovmReport r;
    double worst = 0.0;
    for (const auto& op : m.operators) {
        if (op.dim() != d) throw DimensionMismatch("check_povm: operator dimension mismatch");
        const double me = psd_check(op, tol).min_eigenvalue;
        r.min_eigenvalues.push_back(me);
        worst = std::min(worst, me);
    }
    r.completeness_residual = m.completeness_defect().max_abs();
    r.pass = worst >= -tol && r.completeness_residual <= tol;
    return r;
}

struct OptimalityReport {
    double positivity_min = 0.0;            // min over min-eig(Z-a rho), min-eig(Z-eta_j rho_j)
    std::vector<double> positivity_residuals;
    std::vector<double> equality_residuals;  // spectral norms of (Z-a rho)Pi_0, (Z-eta_j rho_j)Pi_j
    double equality_max = 0.0;
    double q_consistency = 0.0;              // |Tr(Z Pi_0) - a Q|
    double pc_identity = 0.0;                // |P_c - (Tr Z - a Q)|
    double povm_completeness = 0.0;
    double povm_min_eigenvalue = 0.0;
    bool pass = false;
};

inline OptimalityReport check_optimality(const Ensemble& e, const Measurement& m,
                                         const DualCertificate& c, double tol = 1e-8) {
    if (m.outcomes() != e.size() || m.dim() != e.dim() || c.Z.dim() != e.dim())
        throw DimensionMismatch("check_optimality: dimension mismatch");

    OptimalityReport r;
    const Matrix z_rho = (c.Z - c.a * e.total()).hermitized();
    r.positivity_residuals.push_back(psd_check(z_rho, tol).min_eigenvalue);
    r.equality_residuals.push_back(spectral_norm(z_rho * m.inconclusive()));
    for (int j = 0; j < e.size(); ++j) {
        const Matrix zj = (c.Z - e.prior(j) * e.state(j)).hermitized();
        r.positivity_residuals.push_back(psd_check(zj, tol).min_eigenvalue);
        r.equality_residuals.push_back(spectral_norm(zj * m.outcome(j + 1)));
    }
    r.positivity_min = *std::min_element(r.positivity_residuals.begin(), r.positivity_residuals.end());
    r.equality_max = *std::max_element(r.equality_residuals.begin(), r.equality_residuals.end());

    const double q = failure_rate(e, m);
    r.q_consistency = std::abs(trace_product_real(c.Z, m.inconclusive()) - c.a * q);
    r.pc_identity = std::abs(correct_rate(e, m) - (std::real(c.Z.trace()) - c.a * q));

    const PovmReport povm = check_povm(m, tol);
    r.povm_completeness = povm.completeness_residual;
    r.povm_min_eigenvalue = *std::min_element(povm.min_eigenvalues.begin(), povm.min_eigenvalues.end());

    r.pass = povm.pass && r.positivity_min >= -tol && r.equality_max <= tol &&
             r.q_consistency <= tol && r.pc_identity <= tol;
    return r;
}

// (Tr Z - a Tr(rho Pi_0)) - P_c; nonnegative for a valid certificate and
// any feasible measurement (weak duality).
inline double duality_gap(const Ensemble& e, const Measurement& m, const DualCertificate& c,
                          double positivity_tol = 1e-8) {
    const double me_rho = psd_check((c.Z - c.a * e.total()).hermitized(), positivity_tol).min_eigenvalue;
    double worst = me_rho;
    for (int j = 0; j < e.size(); ++j) {
        const Matrix zj = (c.Z - e.prior(j) * e.state(j)).hermitized();
        worst = std::min(worst, psd_check(zj, positivity_tol).min_eigenvalue);
    }
    if (worst < -positivity_tol)
        throw InvalidCertificate("duality_gap: certificate violates the positivity conditions");
    return c.bound(failure_rate(e, m)) - correct_rate(e, m);
}

// Optimality check for two symmetric subsets sharing an eigenbasis:
// candidates Pi_0, Pi_1, Pi_{M+1} are expanded by covariance with V and U
// before the full conditions are verified.
inline OptimalityReport check_partial_symmetry(const Ensemble& e, int M,
                                               const Matrix& V, const Matrix& U,
                                               const Matrix& Pi0, const Matrix& Pi1,
                                               const Matrix& PiM1,
                                               const DualCertificate& c, double tol = 1e-8) {
    const int N = e.size();
    if (M < 1 || M > N) throw InvalidParameter("check_partial_symmetry: need 1 <= M <= N");
    const int d = e.dim();

    Matrix sum1(d), sum2(d);
    for (int j = 0; j < M; ++j) sum1 += e.state(j);
    for (int j = M; j < N; ++j) sum2 += e.state(j);
    if (M < N) {
        const Matrix comm = sum1 * sum2 - sum2 * sum1;
        if (comm.max_abs() > tol * std::max(1.0, sum1.max_abs() * sum2.max_abs()))
            throw CommutationViolation("check_partial_symmetry: subset totals do not commute");
    }

    Measurement m;
    m.operators.assign(N + 1, Matrix(d));
    m.operators[0] = Pi0;
    Matrix cur = Pi1;
    for (int j = 0; j < M; ++j) {
        m.operators[1 + j] = cur;
        cur = (V * cur * V.adjoint()).hermitized();
    }
    if (M < N) {
        cur = PiM1;
        for (int j = 0; j < N - M; ++j) {
            m.operators[1 + M + j] = cur;
            cur = (U * cur * U.adjoint()).hermitized();
        }
    }
    return check_optimality(e, m, c, tol);
}

}  // namespace qsd

#endif
