#ifndef QSD_ORACLE_HPP
#define QSD_ORACLE_HPP

// Brute-force maximization of P_c at fixed Q over all valid measurements.
// Parametrization: N+1 factors B_i = A_i^dag A_i whitened through
// T = sum B_i, so completeness holds exactly; the scalar constraint
// Tr(rho Pi_0) = Q is matched by an augmented-Lagrangian penalty and the
// factors are refined by adaptive coordinate perturbation.

#include <cstdint>
#include <random>
#include <vector>

#include "qsd/certify.hpp"
#include "qsd/measurement.hpp"

namespace qsd {

struct OracleConfig {
    int restarts = 64;
    int max_iterations = 2000;   // pattern-search sweeps per restart
    double q_tolerance = 1e-6;
    std::uint64_t seed = 1;
    double initial_step = 0.25;
    double step_shrink = 0.5;
    double min_step = 1e-9;
    int outer_rounds = 8;
    double sigma0 = 32.0;
    double sigma_growth = 8.0;
};

struct RestartTrace {
    int index = 0;
    double pc = 0.0;
    double q = 0.0;
    int sweeps = 0;
    bool q_matched = false;
};

struct OracleResult {
    double pc_best = 0.0;
    double q_achieved = 0.0;
    Measurement measurement;
    bool converged = false;
    std::vector<RestartTrace> trace;
};

namespace oracle_detail {

// Platform-independent uniform and normal deviates from raw 64-bit draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double normal() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_ = false;
};

// inverse square root from a single eigendecomposition; empty when the
// factor sum has lost rank
inline std::optional<Matrix> whiten(const Matrix& t) {
    const auto es = eig_hermitian(t);
    if (es.eigenvalues.front() <= 1e-12 * std::max(es.eigenvalues.back(), 1e-300))
        return std::nullopt;
    const int n = t.dim();
    Matrix w(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cxd s = 0.0;
            for (int k = 0; k < n; ++k)
                s += es.eigenvectors(i, k) * (1.0 / std::sqrt(es.eigenvalues[k])) *
                     std::conj(es.eigenvectors(j, k));
            w(i, j) = s;
        }
    return w.hermitized();
}

struct Workspace {
    const Ensemble* e = nullptr;
    int d = 0, n_ops = 0;
    std::vector<Matrix> factors;  // A_i

    Measurement realize() const {
        Matrix t(d);
        std::vector<Matrix> b;
        b.reserve(n_ops);
        for (const auto& a : factors) {
            b.push_back((a.adjoint() * a).hermitized());
            t += b.back();
        }
        const auto w = whiten(t.hermitized());
        if (!w) throw SingularOperator("oracle: factor sum lost rank");
        Measurement m;
        m.operators.reserve(n_ops);
        for (const auto& bi : b) m.operators.push_back((*w * bi * *w).hermitized());
        return m;
    }
};

struct Objective {
    double pc = 0.0;
    double g = 0.0;  // Tr(rho Pi_0) - Q
    bool feasible = false;
};

inline Objective evaluate(const Workspace& ws, double q_target) {
    Objective o;
    Matrix t(ws.d);
    std::vector<Matrix> b;
    b.reserve(ws.n_ops);
    for (const auto& a : ws.factors) {
        b.push_back((a.adjoint() * a).hermitized());
        t += b.back();
    }
    const auto w = whiten(t.hermitized());
    if (!w) return o;

    const Ensemble& e = *ws.e;
    double pc = 0.0;
    for (int j = 0; j < e.size(); ++j) {
        const Matrix pij = *w * b[j + 1] * *w;
        pc += e.prior(j) * trace_product_real(e.state(j), pij);
    }
    const Matrix pi0 = *w * b[0] * *w;
    o.pc = pc;
    o.g = trace_product_real(e.total(), pi0) - q_target;
    o.feasible = true;
    return o;
}

inline double lagrangian(const Objective& o, double mu, double sigma) {
    if (!o.feasible) return -1e100;
    return o.pc - mu * o.g - 0.5 * sigma * o.g * o.g;
}

// Exact final projection onto Tr(rho Pi_0) = q. Excess inconclusive weight
// is spread uniformly over the conclusive operators; missing weight is
// drawn from them proportionally. Both moves keep the POVM feasible and
// cannot push P_c above the optimum at the projected q.
inline void project_to_q(const Ensemble& e, Measurement& m, double q) {
    const double q_cur = failure_rate(e, m);
    const int n = m.outcomes();
    if (q_cur > q) {
        if (q_cur <= 0.0) return;
        const double t = q / q_cur;
        for (int j = 1; j <= n; ++j)
            m.operators[j] += ((1.0 - t) / n) * m.operators[0];
        m.operators[0] *= cxd(t, 0.0);
    } else if (q_cur < q) {
        const double s = (q - q_cur) / (1.0 - q_cur);
        for (int j = 1; j <= n; ++j) {
            m.operators[0] += s * m.operators[j];
            m.operators[j] *= cxd(1.0 - s, 0.0);
        }
    }
}

}  // namespace oracle_detail

// Feasible measurement maximizing P_c subject to Tr(rho Pi_0) = Q;
// P_c is a certified lower bound on the optimum. Deterministic in the seed.
// An optional measurement seeds the first restart.
inline OracleResult optimize_fixed_q(const Ensemble& e, double q, const OracleConfig& cfg = {},
                                     const std::optional<Measurement>& warm_start = std::nullopt) {
    using namespace oracle_detail;
    if (q < 0.0 || q >= 1.0) throw QOutOfRange("optimize_fixed_q: Q must lie in [0,1)");
    if (cfg.restarts < 1 || cfg.max_iterations < 1 || cfg.q_tolerance <= 0.0)
        throw InvalidParameter("optimize_fixed_q: config values must be positive");

    const int d = e.dim();
    const int n_ops = e.size() + 1;
    OracleResult best;
    best.pc_best = -1.0;

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(cfg.seed * 0x9e3779b97f4a7c15ull + 0x517cc1b727220a95ull * (restart + 1));
        Workspace ws;
        ws.e = &e;
        ws.d = d;
        ws.n_ops = n_ops;
        ws.factors.assign(n_ops, Matrix(d));
        if (restart == 0 && warm_start) {
            if (static_cast<int>(warm_start->operators.size()) != n_ops || warm_start->dim() != d)
                throw DimensionMismatch("optimize_fixed_q: warm start has the wrong shape");
            for (int i = 0; i < n_ops; ++i)
                ws.factors[i] = matrix_power_psd(warm_start->operators[i], 0.5);
        } else {
            for (auto& a : ws.factors)
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) a(r, c) = cxd(rng.normal(), rng.normal());
        }

        double mu = 0.0, sigma = cfg.sigma0;
        Objective cur = evaluate(ws, q);
        int sweeps_used = 0;
        double prev_gap = std::abs(cur.g);
        for (int outer = 0; outer < cfg.outer_rounds && sweeps_used < cfg.max_iterations; ++outer) {
            double step = cfg.initial_step / (1 << std::min(outer, 4));
            double cur_l = lagrangian(cur, mu, sigma);
            while (step > cfg.min_step && sweeps_used < cfg.max_iterations) {
                ++sweeps_used;
                bool improved = false;
                for (int i = 0; i < n_ops; ++i)
                    for (int r = 0; r < d; ++r)
                        for (int c = 0; c < d; ++c)
                            for (int part = 0; part < 2; ++part) {
                                const cxd delta = part == 0 ? cxd(step, 0.0) : cxd(0.0, step);
                                for (double sign : {1.0, -1.0}) {
                                    ws.factors[i](r, c) += sign * delta;
                                    const Objective trial = evaluate(ws, q);
                                    const double tl = lagrangian(trial, mu, sigma);
                                    if (tl > cur_l + 1e-15) {
                                        cur = trial;
                                        cur_l = tl;
                                        improved = true;
                                        break;
                                    }
                                    ws.factors[i](r, c) -= sign * delta;
                                }
                            }
                if (!improved) step *= cfg.step_shrink;
            }
            mu += sigma * cur.g;
            if (std::abs(cur.g) > 0.25 * prev_gap) sigma = std::min(sigma * cfg.sigma_growth, 1e9);
            prev_gap = std::max(std::abs(cur.g), 1e-18);
            if (std::abs(cur.g) < 0.1 * cfg.q_tolerance && outer >= 2) break;
        }

        Measurement m = ws.realize();
        project_to_q(e, m, q);
        RestartTrace tr;
        tr.index = restart;
        tr.pc = correct_rate(e, m);
        tr.q = failure_rate(e, m);
        tr.sweeps = sweeps_used;
        tr.q_matched = std::abs(tr.q - q) <= cfg.q_tolerance;
        best.trace.push_back(tr);

        const bool better = tr.q_matched &&
                            (!best.converged || tr.pc > best.pc_best + 1e-15);
        const bool fallback = !best.converged && best.pc_best < 0.0;
        if (better || fallback) {
            best.pc_best = tr.pc;
            best.q_achieved = tr.q;
            best.measurement = std::move(m);
            best.converged = best.converged || tr.q_matched;
        } else if (!best.converged && std::abs(tr.q - q) < std::abs(best.q_achieved - q)) {
            best.pc_best = tr.pc;
            best.q_achieved = tr.q;
            best.measurement = std::move(m);
        }
    }
    return best;
}

struct EmpiricalRates {
    double pc = 0.0;
    double pe = 0.0;
    double q = 0.0;
    long trials = 0;
    long correct = 0, wrong = 0, inconclusive = 0;  // partition trials exactly
};

// Draw state j ~ eta, outcome i ~ Tr(rho_j Pi_i); the three empirical
// rates partition the trials exactly.
inline EmpiricalRates sample_outcomes(const Ensemble& e, const Measurement& m, long trials,
                                      std::uint64_t seed) {
    if (m.outcomes() != e.size()) throw DimensionMismatch("sample_outcomes: outcome count mismatch");
    oracle_detail::Rng rng(seed);

    std::vector<double> prior_cdf;
    double acc = 0.0;
    for (int j = 0; j < e.size(); ++j) {
        acc += e.prior(j);
        prior_cdf.push_back(acc);
    }
    std::vector<std::vector<double>> outcome_cdf(e.size());
    for (int j = 0; j < e.size(); ++j) {
        double sum = 0.0;
        std::vector<double> probs;
        for (const auto& op : m.operators) {
            const double p = std::max(0.0, trace_product_real(e.state(j), op));
            probs.push_back(p);
            sum += p;
        }
        double cdf = 0.0;
        for (double p : probs) {
            cdf += p / sum;
            outcome_cdf[j].push_back(cdf);
        }
    }

    long correct = 0, wrong = 0, inconclusive = 0;
    for (long t = 0; t < trials; ++t) {
        const double uj = rng.uniform();
        int j = 0;
        while (j + 1 < e.size() && uj > prior_cdf[j]) ++j;
        const double ui = rng.uniform();
        int i = 0;
        while (i + 1 < static_cast<int>(outcome_cdf[j].size()) && ui > outcome_cdf[j][i]) ++i;
        if (i == 0)
            ++inconclusive;
        else if (i - 1 == j)
            ++correct;
        else
            ++wrong;
    }
    EmpiricalRates r;
    r.trials = trials;
    r.correct = correct;
    r.wrong = wrong;
    r.inconclusive = inconclusive;
    r.pc = static_cast<double>(correct) / trials;
    r.pe = static_cast<double>(wrong) / trials;
    r.q = static_cast<double>(inconclusive) / trials;
    return r;
}

}  // namespace qsd

#endif
