#ifndef QSD_TRADEOFF_HPP
#define QSD_TRADEOFF_HPP

// Fixed-error-rate strategy: inversion of the monotone P_e(Q), the
// thresholds P_E, P_e', P_e'', and the two-qubit closed forms.

#include <functional>
#include <vector>

#include "qsd/two_qubit.hpp"

namespace qsd {

struct CurvePoint {
    double q = 0.0;
    double pc = 0.0;
    double pe = 0.0;
    double rc = 0.0;
    Regime regime = Regime::general_povm;
};

struct CurveThresholds {
    double q_prime = 0.0;
    std::optional<double> q_cr, q1, q2;
};

// Sampled tradeoff curve plus the closed-form evaluator it came from.
struct TradeoffCurve {
    std::string family;
    std::vector<CurvePoint> points;
    CurveThresholds thresholds;
    std::function<double(double)> pc_eval;  // P_c^max(q); empty for table-only curves

    double pe_at(double q) const {
        if (!pc_eval) throw Error("TradeoffCurve: no evaluator attached");
        return 1.0 - q - pc_eval(q);
    }
};

// Tabulate P_e(Q) = 1 - Q - P_c^max(Q) and verify it never increases.
inline std::vector<std::pair<double, double>> pe_of_q(const TradeoffCurve& curve) {
    std::vector<std::pair<double, double>> table;
    table.reserve(curve.points.size());
    double prev = 2.0;
    for (const auto& pt : curve.points) {
        const double pe = 1.0 - pt.q - pt.pc;
        if (pe > prev + 1e-10)
            throw NonMonotone("pe_of_q: error rate increased along the curve");
        prev = pe;
        table.emplace_back(pt.q, pe);
    }
    return table;
}

// Smallest Q with P_e(Q) = pe. Uses the attached evaluator and a monotone
// bisection on the predicate P_e(q) <= pe; falls back to the sampled table.
inline double q_of_pe(const TradeoffCurve& curve, double pe) {
    const double q_hi_limit = curve.points.empty() ? 1.0 - 1e-9 : curve.points.back().q;
    if (curve.pc_eval) {
        const double pe0 = curve.pe_at(0.0);
        if (pe > pe0 + 1e-12 || pe < -1e-12)
            throw PeOutOfRange("q_of_pe: error rate outside the attained range");
        if (curve.pe_at(0.0) <= pe) return 0.0;
        double lo = 0.0, hi = q_hi_limit;
        if (curve.pe_at(hi) > pe)
            throw PeOutOfRange("q_of_pe: error rate below the attained range");
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (curve.pe_at(mid) <= pe) hi = mid; else lo = mid;
        }
        return hi;
    }
    // table fallback: monotone linear interpolation
    const auto table = pe_of_q(curve);
    if (table.empty() || pe > table.front().second + 1e-12 || pe < table.back().second - 1e-12)
        throw PeOutOfRange("q_of_pe: error rate outside the sampled range");
    for (size_t i = 1; i < table.size(); ++i) {
        if (table[i].second <= pe) {
            const auto [q0, pe0] = table[i - 1];
            const auto [q1, pe1] = table[i];
            if (pe0 == pe1) return q0;
            return q0 + (q1 - q0) * (pe0 - pe) / (pe0 - pe1);
        }
    }
    return table.back().first;
}

struct ErrorTradeoffThresholds {
    double p_E = 0.0;            // minimum-error probability, Q = 0
    double p_e_prime = 0.0;      // lower end of the general-branch interval
    double p_e_doubleprime = 0.0;  // upper end of the saturated-branch interval
};

inline ErrorTradeoffThresholds error_thresholds(const TwoQubitReduction& r) {
    if (!r.equal_confidence())
        throw UnsupportedRegime("error_thresholds: needs C1 = C2");
    const double C = r.confidence(), R = r.rho12_abs;
    ErrorTradeoffThresholds t;
    t.p_E = 1.0 - two_qubit_pc(r, 0.0);
    if (R <= r.rho_min()) {
        t.p_e_prime = (1.0 - C) * (1.0 - 2.0 * R);
        t.p_e_doubleprime = t.p_e_prime;
    } else {
        const double rs = r.rho_min(), rg = r.rho_max();
        t.p_e_prime = std::pow(rs - R, 2) / (1.0 - 2.0 * R) + (1.0 - C) * (rg - rs);
        const double qs = r.rho11 < r.rho22 ? r.Q1 : r.Q2;
        t.p_e_doubleprime = (1.0 - C) * (1.0 - qs);
    }
    return t;
}

// Maximize P_c at a prescribed error rate; returns the fixed-Q measurement
// at Q(Pe). Closed forms everywhere except the middle interval for C != 1,
// which is inverted numerically (bisection on the monotone P_e(Q)).
inline Solution solve_two_qubit_fixed_pe(const TwoQubitReduction& r, double pe) {
    if (!r.equal_confidence())
        throw UnsupportedRegime("solve_two_qubit_fixed_pe: needs C1 = C2");
    const auto t = error_thresholds(r);
    if (pe < -1e-14 || pe > t.p_E + 1e-12)
        throw PeOutOfRange("solve_two_qubit_fixed_pe: Pe must lie in [0, P_E]");
    pe = std::min(std::max(pe, 0.0), t.p_E);

    const double C = r.confidence(), R = r.rho12_abs;
    double pc = 0.0;
    if (pe >= t.p_e_prime - 1e-12) {
        // general branch, inverted in closed form
        const double radicand = std::max(0.0, pe - C * (1.0 - C) * (1.0 - 2.0 * R));
        pc = pe + std::pow(2.0 * C - 1.0, 2) * (1.0 - 2.0 * R) +
             2.0 * (2.0 * C - 1.0) * std::sqrt((1.0 - 2.0 * R) * radicand);
    } else if (C > 1.0 - 1e-12 && R >= r.rho_min()) {
        // projective branch of a pure-state pair with |rho12| >= min(rho11, rho22)
        const double rs = r.rho_min();
        if (pe > rs + 1e-14) throw PeOutOfRange("solve_two_qubit_fixed_pe: Pe beyond the branch");
        pc = std::pow(R * std::sqrt(pe) + std::sqrt(r.Delta) * std::sqrt(rs - pe), 2) / (rs * rs);
    } else if (pe <= t.p_e_doubleprime) {
        // saturated branch: P_e(Q) = (1-C)(1-Q)
        pc = pe * C / (1.0 - C);
    } else {
        // middle interval: invert P_e(Q) = (1-C)(1-Q) + (2C-1) gamma_1(Q)
        const double qs = r.rho11 < r.rho22 ? r.Q1 : r.Q2;
        double lo = r.Qcr, hi = qs;
        while (hi - lo > 1e-13) {
            const double mid = 0.5 * (lo + hi);
            const double pe_mid = 1.0 - mid - two_qubit_pc(r, mid);
            if (pe_mid <= pe) hi = mid; else lo = mid;
        }
        pc = two_qubit_pc(r, hi);
    }

    const double q_needed = std::max(0.0, 1.0 - pe - pc);
    Solution s = solve_two_qubit(r, std::min(q_needed, 1.0 - 1e-12));
    s.pc_max = pc;
    s.q = q_needed;
    return s;
}

}  // namespace qsd

#endif
