// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.
//
//   acceptance [--cli <octodyson binary>] [--workdir <dir>] [--seed <u64>]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "octodyson/octodyson.hpp"
#include "oracles.hpp"

using namespace octodyson;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;  // printed under the verdict line
};

struct Criterion {
    int id;
    std::string title;
    double limit_s;  // 0 = no limit
    std::function<Outcome()> run;
};

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

std::string summary(const IdentityReport& r) {
    return r.suite + " cases=" + std::to_string(r.cases) + " failures=" + std::to_string(r.failures) +
           " max=" + sci(r.max_residual);
}

Outcome from_reports(const std::vector<IdentityReport>& reports) {
    Outcome o;
    o.pass = true;
    for (const auto& r : reports) {
        o.pass = o.pass && r.passed();
        o.notes.push_back(summary(r));
    }
    return o;
}

IdentityReport multiplicity_sweep(ModelKind kind, Index n, std::uint64_t draws, std::uint64_t seed) {
    SimulationConfig cfg;
    cfg.model = kind;
    cfg.n = n;
    cfg.samples = draws;
    cfg.seed = seed;
    IdentityReport rep{.suite = "multiplicity_" + std::string(model_name(kind)) + "_n" + std::to_string(n)};
    for (const auto& s : sample_spectra(cfg)) {
        rep.record_exact(s.has_structure(n));
        rep.record(s.raw_spread / (1.0 + s.spectral_radius), 1e-8);
    }
    return rep;
}

Outcome gap_exponent(ModelKind kind, double lo, double hi, double oracle_ratio, double beta, std::uint64_t seed) {
    SimulationConfig cfg;
    cfg.model = kind;
    cfg.n = 2;
    cfg.t = 1.0;
    cfg.samples = 100000;
    cfg.seed = seed;
    const GapStatistics st = gap_statistics(sample_spectra(cfg), 1000, seed);
    const double quad = oracle::gap_ratio_by_quadrature(beta);
    Outcome o;
    const bool oracle_ok = std::abs(quad - oracle_ratio) < 1e-6 && std::abs(ratio_from_beta(beta) - quad) < 1e-6;
    o.pass = oracle_ok && st.implied_beta >= lo && st.implied_beta <= hi;
    o.detail = "implied_beta=" + format_double(st.implied_beta) + " stderr=" + sci(st.stderr_beta);
    o.notes.push_back("ratio=" + format_double(st.ratio) + " oracle ratio by quadrature=" + format_double(quad) +
                      " (closed form " + format_double(oracle_ratio) + ")");
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    return read_file(p.string());
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::filesystem::path workdir = std::filesystem::temp_directory_path() / "octodyson_acceptance";
    std::uint64_t seed = 42;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--cli") cli = argv[i + 1];
        else if (key == "--workdir") workdir = argv[i + 1];
        else if (key == "--seed") seed = std::stoull(argv[i + 1]);
        else {
            std::cerr << "unknown option " << key << "\n";
            return 2;
        }
    }

    const DiffusionModel model_a = DiffusionModel::model_a();
    const DiffusionModel model_b2 = DiffusionModel::model_b(2);
    const DiffusionModel model_b3 = DiffusionModel::model_b(3);

    std::vector<Criterion> criteria;

    criteria.push_back({1, "sign-table identities, exhaustive and exact", 1.0, [] {
        const SignIdentityReport s = verify_sign_identities(kOctonionSigns, true);
        std::vector<IdentityReport> reps{check_table_structure()};
        for (const auto& r : s.identities) reps.push_back(r);
        reps.push_back(*s.theta);
        return from_reports(reps);
    }});

    criteria.push_back({2, "Moufang / alternative laws and norm multiplicativity", 5.0, [seed] {
        const MoufangReport m = verify_moufang(kOctonionSigns, 10000, seed, 1e-12);
        Outcome o = from_reports({m.basis, m.random, verify_norm_multiplicativity(kOctonionSigns, 100000, seed, 1e-12)});
        o.pass = o.pass && m.basis.cases == 512 * 6;
        return o;
    }});

    criteria.push_back({3, "e^2 = -7 exactly", 0.0, [] {
        const Octonion e = imaginary_sum();
        const Octonion sq = e * e;
        Outcome o;
        o.pass = sq == Octonion::real(-7.0);
        o.detail = "real part " + format_double(sq[SubsetLabel(0)]) + ", max imaginary " +
                   format_double((sq - Octonion::real(sq[SubsetLabel(0)])).max_abs());
        return o;
    }});

    criteria.push_back({4, "octonionic inverse round trip, 1000 model A draws", 10.0, [&] {
        return from_reports({inverse_suite(model_a, 1000, seed)});
    }});

    criteria.push_back({5, "Gamma and L closed forms, model A", 30.0, [&] {
        const auto [g, l] = closed_form_suites(model_a, 100, seed);
        return from_reports({g, l});
    }});

    criteria.push_back({6, "Gamma and L closed forms, model B (n = 2, 3)", 30.0, [&] {
        const auto [g2, l2] = closed_form_suites(model_b2, 100, seed);
        const auto [g3, l3] = closed_form_suites(model_b3, 100, seed);
        return from_reports({g2, l2, g3, l3});
    }});

    criteria.push_back({7, "coefficient recovery, multiplicity a = 8, exponents", 0.0, [&] {
        Outcome o = from_reports({coefficient_suite(model_a, 10, seed), coefficient_suite(model_b2, 10, seed),
                                  coefficient_suite(model_b3, 10, seed)});
        const std::pair<ExponentProblem, double> cases[] = {{L_P_coefficients(model_a), 4.0},
                                                             {L_P_coefficients(model_b2), 1.0}};
        for (const auto& [p, kappa] : cases) {
            const MultiplicitySolution s = solve_multiplicity(p);
            const InvariantExponent e = invariant_exponent(p, s.a);
            const bool ok = s.a == 8.0 && s.residual < 1e-12 && e.kappa == kappa && e.beta == 2 * kappa;
            o.pass = o.pass && ok;
            o.notes.push_back("alphas (" + format_double(p.alpha1) + ", " + format_double(p.alpha2) + ", " +
                              format_double(p.alpha3) + ") -> a=" + format_double(s.a) + " residual=" +
                              sci(s.residual) + " kappa=" + format_double(e.kappa) + " beta=" +
                              format_double(e.beta));
        }
        return o;
    }});

    criteria.push_back({8, "multiplicity 8 on 1000 draws per model", 60.0, [seed] {
        return from_reports({multiplicity_sweep(ModelKind::A, 2, 1000, seed),
                             multiplicity_sweep(ModelKind::B, 2, 1000, seed),
                             multiplicity_sweep(ModelKind::B, 3, 1000, seed)});
    }});

    criteria.push_back({9, "model B spectrum is 8 copies of that of M^0 + i sqrt7 A", 0.0, [seed] {
        std::vector<IdentityReport> reps;
        for (Index n : {2, 3, 4}) {
            SimulationConfig cfg;
            cfg.model = ModelKind::B;
            cfg.n = n;
            cfg.samples = 1000;
            cfg.seed = seed;
            IdentityReport r{.suite = "hermitian_n" + std::to_string(n)};
            for (std::uint64_t k = 0; k < cfg.samples; ++k)
                r.record(hermitian_equivalence_check(sample_matrix(cfg, k)), 1e-9);
            reps.push_back(r);
        }
        return from_reports(reps);
    }});

    criteria.push_back({10, "gap exponent model A, 1e5 samples, beta in [7.5, 8.5]", 120.0, [seed] {
        return gap_exponent(ModelKind::A, 7.5, 8.5, 11.0 / 9.0, 8.0, seed);
    }});

    criteria.push_back({11, "gap exponent model B n = 2, 1e5 samples, beta in [1.8, 2.2]", 120.0, [seed] {
        return gap_exponent(ModelKind::B, 1.8, 2.2, 5.0 / 3.0, 2.0, seed);
    }});

    criteria.push_back({12, "dimension-2 trace equalities as stated, n = 3 counterexample", 0.0, [seed] {
        const Dim2Report d = dim2_remark_checks(1000, seed, 1e-10);
        Outcome o = from_reports({d.product_of_traces, d.sandwich_imaginary, d.sandwich_real, d.scalar_2x2,
                                  d.counterexample});
        o.pass = d.passed_as_written();
        o.notes.push_back("n=3 counterexample residual " + format_double(d.counterexample_residual));
        if (!d.product_of_traces.passed()) {
            o.notes.push_back("analysis: for n = 2 each U^C (C != {}) is a multiple of A0, so");
            o.notes.push_back("  tr(U(X)^C A0) tr(U(Y)^C A0) = 4 lambda mu while -tr(U(X)^C U(Y)^C) = 2 lambda mu;");
            o.notes.push_back("  the first equality is off by exactly 2 (relative residual 0.5). With the factor 2:");
            o.notes.push_back("  " + summary(d.product_of_traces_factor2));
        }
        return o;
    }});

    criteria.push_back({13, "log-det derivatives by central differences, h = 1e-5", 0.0, [seed] {
        return from_reports({logdet_suite(100, seed)});
    }});

    criteria.push_back({14, "sample-spectrum CSV identical for --threads 1 and 4", 0.0, [&] {
        Outcome o;
        if (!cli.empty()) {
            std::filesystem::create_directories(workdir);
            const auto one = workdir / "threads1.csv", four = workdir / "threads4.csv";
            const std::string base = "\"" + cli + "\" sample-spectrum --model b --n 2 --samples 5000 --seed " +
                                     std::to_string(seed) + " --out ";
            const int rc1 = std::system((base + "\"" + one.string() + "\" --threads 1 > /dev/null").c_str());
            const int rc4 = std::system((base + "\"" + four.string() + "\" --threads 4 > /dev/null").c_str());
            const std::string a = slurp(one), b = slurp(four);
            o.pass = rc1 == 0 && rc4 == 0 && !a.empty() && a == b;
            o.detail = "cli, " + std::to_string(a.size()) + " bytes, sha256 " + sha256_hex(a).substr(0, 16) +
                       (a == b ? " (equal)" : " vs " + sha256_hex(b).substr(0, 16));
        } else {
            SimulationConfig cfg;
            cfg.model = ModelKind::B;
            cfg.samples = 5000;
            cfg.seed = seed;
            std::ostringstream a, b;
            write_spectrum_csv(a, cfg, sample_spectra(cfg, 1));
            write_spectrum_csv(b, cfg, sample_spectra(cfg, 4));
            o.pass = a.str() == b.str();
            o.detail = "library, " + std::to_string(a.str().size()) + " bytes";
        }
        return o;
    }});

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %2d  %s  [%.2fs%s]%s%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                    c.limit_s > 0 ? (std::string(" < ") + std::to_string(static_cast<int>(c.limit_s)) + "s").c_str() : "",
                    o.detail.empty() ? "" : "  ", o.detail.c_str());
        if (!in_time) std::printf("        time limit exceeded\n");
        for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
