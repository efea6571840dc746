#ifndef QSD_SCENARIO_HPP
#define QSD_SCENARIO_HPP

// Scenario files in, solvable family bindings out. A binding packages the
// ensemble with closed-form evaluators so the CLI and the acceptance suite
// can sweep curves, verify certificates and run the oracle uniformly.

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsd/oracle.hpp"
#include "qsd/symmetric.hpp"
#include "qsd/tradeoff.hpp"

namespace qsd {

struct FamilyBinding {
    std::string tag;
    Ensemble ensemble;
    double q_prime = 0.0;
    std::optional<double> q_cr, q1, q2;
    std::function<double(double)> pc;        // closed-form P_c^max(q)
    std::function<Regime(double)> regime;
    std::function<Solution(double)> solve;   // measurement + certificate
    std::function<bool(double)> analytic_at; // closed form available at q
    std::optional<TwoQubitReduction> reduction;
};

struct Scenario {
    std::string family;
    nlohmann::json params;
    double q_start = 0.0, q_end = 0.99;
    int steps = 199;
    double tolerance = 1e-8;
    OracleConfig oracle;
};

namespace scenario_detail {

inline double need_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw InvalidParameter("scenario: missing numeric field '" + key + "'");
    return j[key].get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw InvalidParameter("scenario: field '" + key + "' must be numeric");
    return j[key].get<double>();
}

inline FamilyBinding bind_two_state(Ensemble e, TwoQubitReduction r, const std::string& tag) {
    FamilyBinding b{.tag = tag, .ensemble = std::move(e)};
    b.reduction = std::move(r);
    const TwoQubitReduction& red = *b.reduction;
    b.q_prime = red.q_prime();
    b.q_cr = red.Qcr;
    b.q1 = red.Q1;
    b.q2 = red.Q2;
    b.pc = [red](double q) { return two_qubit_pc(red, q); };
    b.regime = [red](double q) { return two_qubit_regime(red, q); };
    b.solve = [red](double q) { return solve_two_qubit(red, q); };
    const bool equal = red.equal_confidence();
    const double qp = b.q_prime;
    b.analytic_at = [equal, qp](double q) { return equal || q == 0.0 || q >= qp - 1e-14; };
    return b;
}

inline FamilyBinding bind_symmetric(const SymmetricFamily& f, const std::string& tag) {
    auto se = make_symmetric(f);
    FamilyBinding b{.tag = tag, .ensemble = se.ensemble};
    b.q_prime = symmetric_q_prime(f);
    b.pc = [f](double q) { return symmetric_pc(f, q); };
    b.regime = [f](double q) { return symmetric_regime(f, q); };
    if (is_identity_resolving_kind(f.kind))
        b.solve = [f](double q) { return solve_identity_resolving(f, q); };
    else
        b.solve = [f](double q) { return solve_symmetric(f, q); };
    b.analytic_at = [](double) { return true; };
    return b;
}

inline FamilyBinding bind_rank_d(const SymmetricFamily& f, std::vector<double> priors) {
    auto re = make_rank_D(f, priors);
    FamilyBinding b{.tag = "rank-d", .ensemble = re.ensemble};
    b.q_prime = f.S >= 0.0 ? f.S : (f.N - 1.0) * std::abs(f.S);
    b.pc = [f, priors](double q) { return rank_d_pc(f, priors, q); };
    b.solve = [f, priors](double q) { return solve_rank_D(f, priors, q); };
    const double qp = b.q_prime;
    b.regime = [qp](double q) {
        if (q == 0.0) return Regime::minimum_error;
        return q < qp ? Regime::general_povm : Regime::large_q;
    };
    b.analytic_at = [](double) { return true; };
    if (f.N == 2) {
        const auto block = SymmetricFamily::equal_overlap_family(2, f.S);
        const auto se = make_symmetric(block);
        Ensemble block_e(priors, {se.ensemble.state(0), se.ensemble.state(1)});
        auto red = two_state_reduction(block_e);
        b.q_prime = red.q_prime();
        b.q_cr = red.Qcr;
        b.q1 = red.Q1;
        b.q2 = red.Q2;
        b.regime = [red](double q) { return two_qubit_regime(red, q); };
    }
    return b;
}

}  // namespace scenario_detail

// Build the solvable binding named by a scenario's family tag.
inline FamilyBinding bind_family(const std::string& family, const nlohmann::json& p) {
    using namespace scenario_detail;
    if (family == "two-qubit") {
        const double p1 = need_number(p, "p1"), p2 = need_number(p, "p2");
        const double eta1 = need_number(p, "eta1");
        cxd s;
        if (p.contains("S")) {
            s = cxd(need_number(p, "S"), 0.0);
        } else {
            s = std::polar(need_number(p, "S_abs"), number_or(p, "S_phase", 0.0));
        }
        Ensemble e = make_two_qubit(p1, p2, eta1, s);
        auto r = two_state_reduction(e);
        return bind_two_state(std::move(e), std::move(r), "two-qubit");
    }
    if (family == "two-qubit-reduced") {
        auto [e, r] = make_two_qubit_from_reduction(need_number(p, "rho11"),
                                                    need_number(p, "rho12_abs"),
                                                    need_number(p, "C"),
                                                    number_or(p, "phi", 0.0));
        return bind_two_state(std::move(e), std::move(r), "two-qubit-reduced");
    }
    if (family == "equal-overlap") {
        const int n = static_cast<int>(need_number(p, "N"));
        return bind_symmetric(SymmetricFamily::equal_overlap_family(n, need_number(p, "S")),
                              "equal-overlap");
    }
    if (family == "symmetric-pure") {
        const int n = static_cast<int>(need_number(p, "N"));
        const int d = static_cast<int>(need_number(p, "d"));
        const int m = static_cast<int>(number_or(p, "m", 1));
        const double c1sq = need_number(p, "c1_sq");
        const double c2sq = (1.0 - m * c1sq) / (d - m);
        if (c2sq <= 0.0) throw InvalidParameter("scenario: c1_sq incompatible with normalization");
        return bind_symmetric(SymmetricFamily::pure_two_coefficient(
                                  n, d, m, std::sqrt(c1sq), std::sqrt(c2sq)),
                              "symmetric-pure");
    }
    if (family == "symmetric-mixed-qubit") {
        const int n = static_cast<int>(need_number(p, "N"));
        const double c1sq = need_number(p, "c1_sq");
        if (c1sq <= 0.0 || c1sq >= 1.0)
            throw InvalidParameter("scenario: c1_sq must lie in (0,1)");
        return bind_symmetric(SymmetricFamily::mixed_qubit_family(
                                  n, std::sqrt(c1sq), std::sqrt(1.0 - c1sq), need_number(p, "p")),
                              "symmetric-mixed-qubit");
    }
    if (family == "rank-d") {
        const int n = static_cast<int>(need_number(p, "N"));
        const int d_blocks = static_cast<int>(need_number(p, "D"));
        std::vector<double> lambdas, priors;
        if (p.contains("lambdas"))
            lambdas = p["lambdas"].get<std::vector<double>>();
        else
            lambdas.assign(d_blocks, 1.0 / d_blocks);
        if (p.contains("priors"))
            priors = p["priors"].get<std::vector<double>>();
        else
            priors.assign(n, 1.0 / n);
        return bind_rank_d(SymmetricFamily::rank_d_family(n, d_blocks, need_number(p, "S"),
                                                          std::move(lambdas)),
                           std::move(priors));
    }
    if (family == "identity-resolving") {
        const int n = static_cast<int>(need_number(p, "N"));
        const int d = static_cast<int>(need_number(p, "d"));
        return bind_symmetric(SymmetricFamily::identity_resolving_family(n, d, need_number(p, "p")),
                              "identity-resolving");
    }
    if (family == "tetrad")
        return bind_symmetric(SymmetricFamily::tetrad_family(need_number(p, "p")), "tetrad");
    if (family == "trine")
        return bind_symmetric(SymmetricFamily::trine_family(need_number(p, "p")), "trine");
    throw UnsupportedFamily("scenario: unknown family '" + family + "'");
}

inline Scenario parse_scenario(const nlohmann::json& j) {
    Scenario s;
    if (!j.contains("family") || !j["family"].is_string())
        throw InvalidParameter("scenario: missing string field 'family'");
    s.family = j["family"].get<std::string>();
    s.params = j;
    if (j.contains("sweep")) {
        const auto& sw = j["sweep"];
        s.q_start = scenario_detail::number_or(sw, "q_start", 0.0);
        s.q_end = scenario_detail::number_or(sw, "q_end", 0.99);
        s.steps = static_cast<int>(scenario_detail::number_or(sw, "steps", 199));
    }
    if (s.q_start < 0.0 || s.q_end < s.q_start || s.q_end >= 1.0 || s.steps < 1)
        throw InvalidParameter("scenario: need 0 <= q_start <= q_end < 1 and steps >= 1");
    s.tolerance = scenario_detail::number_or(j, "tolerance", 1e-8);
    if (j.contains("oracle")) {
        const auto& o = j["oracle"];
        s.oracle.restarts = static_cast<int>(scenario_detail::number_or(o, "restarts", 64));
        s.oracle.max_iterations =
            static_cast<int>(scenario_detail::number_or(o, "max_iterations", 2000));
        s.oracle.q_tolerance = scenario_detail::number_or(o, "q_tolerance", 1e-6);
        s.oracle.seed = static_cast<std::uint64_t>(scenario_detail::number_or(o, "seed", 1));
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("scenario: cannot open file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidParameter(std::string("scenario: invalid JSON: ") + ex.what());
    }
    return parse_scenario(j);
}

// Sample the closed-form curve; the evaluator travels with the result.
inline TradeoffCurve sweep_curve(const FamilyBinding& b, double q_start, double q_end, int steps) {
    TradeoffCurve c;
    c.family = b.tag;
    c.thresholds.q_prime = b.q_prime;
    c.thresholds.q_cr = b.q_cr;
    c.thresholds.q1 = b.q1;
    c.thresholds.q2 = b.q2;
    c.pc_eval = b.pc;
    for (int i = 0; i < steps; ++i) {
        const double q = steps == 1 ? q_start : q_start + (q_end - q_start) * i / (steps - 1);
        CurvePoint pt;
        pt.q = q;
        pt.pc = b.pc(q);
        pt.pe = 1.0 - q - pt.pc;
        pt.rc = pt.pc / (1.0 - q);
        pt.regime = b.regime(q);
        c.points.push_back(pt);
    }
    return c;
}

// Fixed error rate for any bound family: closed forms for two-state
// reductions with equal confidences, monotone bisection otherwise.
inline Solution solve_fixed_pe(const FamilyBinding& b, double pe) {
    if (b.reduction && b.reduction->equal_confidence())
        return solve_two_qubit_fixed_pe(*b.reduction, pe);
    if (b.reduction) {
        // closed forms exist only on the saturated segment and at Q = 0
        const TwoQubitReduction& r = *b.reduction;
        const double c_max = std::max(r.C1, r.C2);
        const double pe0 = 1.0 - b.pc(0.0);
        const double pe_sat = (1.0 - c_max) * (1.0 - b.q_prime);
        if (std::abs(pe - pe0) < 1e-12) return b.solve(0.0);
        if (pe < -1e-14 || pe > pe0 + 1e-12)
            throw PeOutOfRange("solve_fixed_pe: error rate outside [0, P_E]");
        if (pe <= pe_sat + 1e-14) {
            const double q = std::min(1.0 - 1e-12, 1.0 - std::max(pe, 0.0) / (1.0 - c_max));
            return b.solve(q);
        }
        throw UnsupportedRegime("solve_fixed_pe: no closed form between the endpoints");
    }
    TradeoffCurve c;
    c.pc_eval = b.pc;
    const double q = q_of_pe(c, pe);
    Solution s = b.solve(q);
    return s;
}

struct OracleComparison {
    double q_target = 0.0;
    std::optional<double> pc_analytic;  // evaluated at the achieved Q
    double pc_oracle = 0.0;
    double q_achieved = 0.0;
    std::optional<double> gap;
    bool converged = false;
};

inline OracleComparison compare_with_oracle(const FamilyBinding& b, double q,
                                            const OracleConfig& cfg) {
    OracleComparison out;
    out.q_target = q;
    std::optional<Measurement> warm;
    if (b.analytic_at(q)) warm = b.solve(q).measurement;
    const OracleResult res = optimize_fixed_q(b.ensemble, q, cfg, warm);
    out.pc_oracle = res.pc_best;
    out.q_achieved = res.q_achieved;
    out.converged = res.converged;
    if (b.analytic_at(res.q_achieved)) {
        out.pc_analytic = b.pc(res.q_achieved);
        out.gap = *out.pc_analytic - res.pc_best;
    }
    return out;
}

inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string curve_csv(const TradeoffCurve& c) {
    std::ostringstream out;
    out << "Q,pc_max,pe,rc,regime\n";
    for (const auto& pt : c.points) {
        out << format_number(pt.q) << ',' << format_number(pt.pc) << ',' << format_number(pt.pe)
            << ',' << format_number(pt.rc) << ',' << to_string(pt.regime) << '\n';
    }
    return out.str();
}

}  // namespace qsd

#endif
