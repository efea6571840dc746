// Command-line surface: scenario files in, tradeoff curves, verification
// reports, oracle comparisons and figure-reproduction data out.
//
// Exit codes: 0 ok, 2 input error, 3 unsupported family/regime,
// 4 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsd/qsd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitVerification = 4;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw qsd::InvalidParameter("invalid number in list: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw qsd::InvalidParameter("empty value list");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qsd::InvalidParameter("cannot open output file " + path);
    out << text;
}

int run_curve(const std::string& scenario_path, const std::string& out_path) {
    const qsd::Scenario sc = qsd::load_scenario(scenario_path);
    const qsd::FamilyBinding b = qsd::bind_family(sc.family, sc.params);
    const qsd::TradeoffCurve curve = qsd::sweep_curve(b, sc.q_start, sc.q_end, sc.steps);
    write_text(out_path, qsd::curve_csv(curve));
    return kExitOk;
}

int run_verify(const std::string& scenario_path, const std::string& q_list, double tol,
               double perturb) {
    const qsd::Scenario sc = qsd::load_scenario(scenario_path);
    const qsd::FamilyBinding b = qsd::bind_family(sc.family, sc.params);
    const double tolerance = tol > 0.0 ? tol : sc.tolerance;
    bool all_pass = true;
    for (double q : parse_list(q_list)) {
        qsd::Solution s = b.solve(q);
        if (!s.certificate) {
            std::cout << "Q=" << qsd::format_number(q) << " verdict=FAIL (no certificate)\n";
            all_pass = false;
            continue;
        }
        if (perturb != 0.0) {
            qsd::Matrix u = qsd::Matrix::identity(s.measurement.dim());
            u(0, 0) = std::cos(perturb);
            u(0, 1) = std::sin(perturb);
            u(1, 0) = -std::sin(perturb);
            u(1, 1) = std::cos(perturb);
            const qsd::Matrix rotated =
                (u * s.measurement.operators[1] * u.adjoint()).hermitized();
            s.measurement.operators[0] += s.measurement.operators[1] - rotated;
            s.measurement.operators[1] = rotated;
        }
        const auto rep = qsd::check_optimality(b.ensemble, s.measurement, *s.certificate, tolerance);
        std::cout << "Q=" << qsd::format_number(q) << " regime=" << qsd::to_string(s.regime)
                  << " pc=" << qsd::format_number(s.pc_max)
                  << " positivity_min=" << qsd::format_number(rep.positivity_min)
                  << " equality_max=" << qsd::format_number(rep.equality_max)
                  << " q_consistency=" << qsd::format_number(rep.q_consistency)
                  << " pc_identity=" << qsd::format_number(rep.pc_identity)
                  << " verdict=" << (rep.pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? kExitOk : kExitVerification;
}

int run_oracle(const std::string& scenario_path, const std::string& q_list, int restarts,
               std::uint64_t seed, const std::string& out_path) {
    const qsd::Scenario sc = qsd::load_scenario(scenario_path);
    const qsd::FamilyBinding b = qsd::bind_family(sc.family, sc.params);
    qsd::OracleConfig cfg = sc.oracle;
    if (restarts > 0) cfg.restarts = restarts;
    if (seed != 0) cfg.seed = seed;

    std::ostringstream out;
    out << "Q,pc_analytic,pc_oracle,gap,note\n";
    double max_gap = 0.0;
    for (double q : parse_list(q_list)) {
        const auto cmp = qsd::compare_with_oracle(b, q, cfg);
        out << qsd::format_number(q) << ',';
        if (cmp.pc_analytic) {
            out << qsd::format_number(*cmp.pc_analytic) << ','
                << qsd::format_number(cmp.pc_oracle) << ',' << qsd::format_number(*cmp.gap) << ',';
            out << (cmp.converged ? "" : "q-unmatched") << '\n';
            max_gap = std::max(max_gap, std::abs(*cmp.gap));
        } else {
            out << ',' << qsd::format_number(cmp.pc_oracle) << ",,oracle-only\n";
        }
    }
    write_text(out_path, out.str());
    return max_gap < 1e-3 ? kExitOk : kExitVerification;
}

int run_fixed_pe(const std::string& scenario_path, const std::string& pe_list,
                 const std::string& out_path) {
    const qsd::Scenario sc = qsd::load_scenario(scenario_path);
    const qsd::FamilyBinding b = qsd::bind_family(sc.family, sc.params);
    std::ostringstream out;
    out << "Pe,pc_max,q_needed,regime\n";
    for (double pe : parse_list(pe_list)) {
        const qsd::Solution s = qsd::solve_fixed_pe(b, pe);
        out << qsd::format_number(pe) << ',' << qsd::format_number(s.pc_max) << ','
            << qsd::format_number(s.q) << ',' << qsd::to_string(s.regime) << '\n';
    }
    write_text(out_path, out.str());
    return kExitOk;
}

int run_figure(int id, const std::string& outdir) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    const auto emit = [&](const std::string& name, const nlohmann::json& params) {
        const qsd::FamilyBinding b = qsd::bind_family(params["family"].get<std::string>(), params);
        const qsd::TradeoffCurve curve = qsd::sweep_curve(b, 0.0, 0.99, 199);
        std::ofstream out(fs::path(outdir) / name, std::ios::binary);
        if (!out) throw qsd::InvalidParameter("cannot write into " + outdir);
        out << qsd::curve_csv(curve);
    };
    switch (id) {
        case 1:
            for (double s : {0.3, 0.6, 0.8}) {
                emit("fig1_S" + std::to_string(static_cast<int>(s * 10)) + ".csv",
                     {{"family", "two-qubit"}, {"p1", 1.0}, {"p2", 1.0}, {"eta1", 0.2}, {"S", s}});
            }
            return kExitOk;
        case 2: {
            const std::vector<std::pair<std::string, double>> sets = {
                {"fig2_a.csv", 1.0}, {"fig2_b.csv", 0.9}, {"fig2_c.csv", 0.8}};
            for (const auto& [name, c] : sets) {
                emit(name, {{"family", "two-qubit-reduced"},
                            {"rho11", 0.2},
                            {"rho12_abs", 0.36},
                            {"C", c}});
            }
            return kExitOk;
        }
        case 3:
            for (int n : {2, 3, 4}) {
                for (double s : {-0.3, 0.3}) {
                    const std::string name = "fig3_N" + std::to_string(n) +
                                             (s < 0 ? "_Sm03.csv" : "_Sp03.csv");
                    emit(name, {{"family", "equal-overlap"}, {"N", n}, {"S", s}});
                }
            }
            return kExitOk;
        case 4:
            for (double p : {1.0, 0.8, 0.6, 0.4}) {
                emit("fig4_p" + std::to_string(static_cast<int>(p * 100)) + ".csv",
                     {{"family", "symmetric-mixed-qubit"}, {"N", 3}, {"c1_sq", 0.85}, {"p", p}});
            }
            return kExitOk;
        default:
            throw qsd::InvalidParameter("unknown figure id (use 1..4)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal state discrimination with a fixed rate of inconclusive results"};
    app.require_subcommand(1);

    std::string scenario, out_path, q_list, pe_list, outdir = ".";
    double tol = 0.0, perturb = 0.0;
    int restarts = 0, figure_id = 0;
    std::uint64_t seed = 0;

    auto* curve = app.add_subcommand("curve", "sweep P_c^max(Q) and write CSV");
    curve->add_option("--scenario", scenario, "scenario JSON file")->required();
    curve->add_option("--out", out_path, "output CSV (default stdout)");

    auto* verify = app.add_subcommand("verify", "solve and check optimality certificates");
    verify->add_option("--scenario", scenario, "scenario JSON file")->required();
    verify->add_option("--q", q_list, "comma-separated Q values")->required();
    verify->add_option("--tol", tol, "certification tolerance (default from scenario)");
    verify->add_option("--perturb", perturb, "rotate Pi_1 by this angle before checking");

    auto* oracle = app.add_subcommand("oracle", "compare closed forms with the numeric maximizer");
    oracle->add_option("--scenario", scenario, "scenario JSON file")->required();
    oracle->add_option("--q", q_list, "comma-separated Q values")->required();
    oracle->add_option("--restarts", restarts, "override restart count");
    oracle->add_option("--seed", seed, "override RNG seed");
    oracle->add_option("--out", out_path, "output CSV (default stdout)");

    auto* fixed_pe = app.add_subcommand("fixed-pe", "maximize P_c at fixed error rates");
    fixed_pe->add_option("--scenario", scenario, "scenario JSON file")->required();
    fixed_pe->add_option("--pe", pe_list, "comma-separated error rates")->required();
    fixed_pe->add_option("--out", out_path, "output CSV (default stdout)");

    auto* figure = app.add_subcommand("figure", "emit the data sets behind a published figure");
    figure->add_option("--id", figure_id, "figure id, 1..4")->required();
    figure->add_option("--outdir", outdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (curve->parsed()) return run_curve(scenario, out_path);
        if (verify->parsed()) return run_verify(scenario, q_list, tol, perturb);
        if (oracle->parsed()) return run_oracle(scenario, q_list, restarts, seed, out_path);
        if (fixed_pe->parsed()) return run_fixed_pe(scenario, pe_list, out_path);
        if (figure->parsed()) return run_figure(figure_id, outdir);
    } catch (const qsd::UnsupportedFamily& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const qsd::UnsupportedRegime& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const qsd::NotIdentityResolving& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const qsd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
