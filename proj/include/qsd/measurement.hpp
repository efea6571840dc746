#ifndef QSD_MEASUREMENT_HPP
#define QSD_MEASUREMENT_HPP

#include <vector>

#include "qsd/ensemble.hpp"
#include "qsd/matrix.hpp"

namespace qsd {

// N+1 detection operators; index 0 is the inconclusive outcome.
struct Measurement {
    std::vector<Matrix> operators;

    int outcomes() const { return static_cast<int>(operators.size()) - 1; }
    int dim() const { return operators.empty() ? 0 : operators.front().dim(); }
    const Matrix& inconclusive() const { return operators.front(); }
    const Matrix& outcome(int j) const { return operators.at(j); }  // j in 1..N

    Matrix completeness_defect() const {
        Matrix s(dim());
        for (const auto& op : operators) s += op;
        return s - Matrix::identity(dim());
    }
};

inline double failure_rate(const Ensemble& e, const Measurement& m) {
    return trace_product_real(e.total(), m.inconclusive());
}

inline double correct_rate(const Ensemble& e, const Measurement& m) {
    if (m.outcomes() != e.size()) throw DimensionMismatch("correct_rate: outcome count mismatch");
    double pc = 0.0;
    for (int j = 0; j < e.size(); ++j)
        pc += e.prior(j) * trace_product_real(e.state(j), m.outcome(j + 1));
    return pc;
}

// Hermitian operator Z with multiplier a; together they certify optimality
// when Z - a rho >= 0 and Z - eta_j rho_j >= 0 hold with the orthogonality
// conditions. gamma caches rho^{-1/2} Z rho^{-1/2} when available.
struct DualCertificate {
    Matrix Z;
    double a = 0.0;
    std::optional<Matrix> gamma;

    double bound(double q) const { return std::real(Z.trace()) - a * q; }
};

}  // namespace qsd

#endif
