// octodyson: command-line driver for the verification suites and simulations.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "octodyson/octodyson.hpp"

namespace {

using namespace octodyson;

enum ExitCode : int {
    kOk = 0,
    kSuiteFailed = 1,
    kUsage = 2,
    kInsufficientData = 3,
    kIoError = 4,
};

struct CommonOptions {
    std::uint64_t seed = 0;
    bool json = false;
    std::string out;
    unsigned threads = 1;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--seed", opts.seed, "RNG seed (u64)");
    sub->add_flag("--json", opts.json, "Emit machine-readable JSON");
    sub->add_option("--out", opts.out, "Output path");
    sub->add_option("--threads", opts.threads, "Worker threads (never changes output bytes)")
        ->check(CLI::PositiveNumber);
}

ModelKind parse_model(const std::string& s) { return s == "a" ? ModelKind::A : ModelKind::B; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    os << text;
    os.close();
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
}

void write_manifest(const RunManifest& manifest, const std::string& out) {
    write_text(out + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

/// Prints or writes a report set; returns the suite exit code.
int emit_reports(const std::vector<IdentityReport>& reports, const CommonOptions& opts,
                 RunManifest manifest) {
    const json doc = to_json(reports);
    if (!opts.out.empty()) {
        write_text(opts.out, doc.dump(2) + "\n");
        manifest.add_output(opts.out);
        write_manifest(manifest, opts.out);
    }
    if (opts.json) {
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const auto& r : reports) {
            std::cout << (r.passed() ? "PASS " : "FAIL ") << r.suite << "  cases=" << r.cases
                      << " failures=" << r.failures << " max_residual=" << format_double(r.max_residual)
                      << " elapsed_ms=" << r.elapsed_ms << "\n";
        }
    }
    return all_passed(reports) ? kOk : kSuiteFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Octonionic matrices, Dyson diffusions and their spectral identities"};
    app.set_config("--config", "", "key=value config file (values act as defaults)");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    const std::vector<std::string> command_line(argv, argv + argc);
    auto manifest_base = [&](const CommonOptions& opts) {
        RunManifest m;
        m.command_line = command_line;
        m.seed = opts.seed;
        return m;
    };

    // verify-algebra
    CommonOptions algebra_opts;
    bool tamper = false;
    auto* algebra = app.add_subcommand("verify-algebra", "Exhaustive octonion algebra identities");
    add_common(algebra, algebra_opts);
    algebra->add_flag("--tamper-sign-table", tamper, "Negative control: flip one table cell");

    // verify-identities
    CommonOptions ident_opts;
    std::string ident_model = "a";
    Index ident_n = 2;
    std::uint64_t ident_trials = 100;
    auto* ident = app.add_subcommand("verify-identities", "Closed-form, trace and inverse residual suites");
    add_common(ident, ident_opts);
    ident->add_option("--model", ident_model, "Diffusion model")->check(CLI::IsMember({"a", "b"}));
    ident->add_option("--n", ident_n, "Matrix dimension")->check(CLI::Range(2, 64));
    ident->add_option("--trials", ident_trials, "Random draws per suite");

    // sample-spectrum
    CommonOptions sample_opts;
    sample_opts.out = "spectrum.csv";
    std::string sample_model = "a";
    SimulationConfig sample_cfg;
    std::string stats_path;
    std::uint32_t bootstrap = 1000;
    auto* sample = app.add_subcommand("sample-spectrum", "Exact Gaussian draws, spectra and gap statistics");
    add_common(sample, sample_opts);
    sample->add_option("--model", sample_model, "Diffusion model")->check(CLI::IsMember({"a", "b"}));
    sample->add_option("--n", sample_cfg.n, "Matrix dimension")->check(CLI::Range(2, 64));
    sample->add_option("--t", sample_cfg.t, "Time horizon")->check(CLI::PositiveNumber);
    sample->add_option("--samples", sample_cfg.samples, "Number of matrices")->check(CLI::PositiveNumber);
    sample->add_option("--cluster-tol", sample_cfg.cluster_tol, "Relative clustering tolerance");
    sample->add_option("--stats", stats_path, "Statistics JSON path (default <out>.stats.json)");
    sample->add_option("--bootstrap", bootstrap, "Bootstrap resamples");

    // simulate-path
    CommonOptions path_opts;
    path_opts.out = "path.csv";
    std::string path_model = "a";
    SimulationConfig path_cfg;
    path_cfg.mode = SamplingMode::EulerPath;
    path_cfg.steps = 1000;
    auto* path = app.add_subcommand("simulate-path", "Discrete-time Brownian paths of the spectrum");
    add_common(path, path_opts);
    path->add_option("--model", path_model, "Diffusion model")->check(CLI::IsMember({"a", "b"}));
    path->add_option("--n", path_cfg.n, "Matrix dimension")->check(CLI::Range(2, 64));
    path->add_option("--t", path_cfg.t, "Time horizon")->check(CLI::PositiveNumber);
    path->add_option("--steps", path_cfg.steps, "Steps per path")->check(CLI::PositiveNumber);
    path->add_option("--paths", path_cfg.samples, "Number of paths")->check(CLI::PositiveNumber);
    path->add_option("--cluster-tol", path_cfg.cluster_tol, "Relative clustering tolerance");

    // solve-exponents
    CommonOptions solve_opts;
    ExponentProblem problem;
    auto* solve = app.add_subcommand("solve-exponents", "Multiplicity and invariant-measure exponent");
    add_common(solve, solve_opts);
    solve->add_option("--alpha1", problem.alpha1)->required();
    solve->add_option("--alpha2", problem.alpha2)->required();
    solve->add_option("--alpha3", problem.alpha3)->required();

    // check-dim2
    CommonOptions dim2_opts;
    std::uint64_t dim2_trials = 1000;
    auto* dim2 = app.add_subcommand("check-dim2", "2x2 trace relations of the rank-one model and the n=3 obstruction");
    add_common(dim2, dim2_opts);
    dim2->add_option("--trials", dim2_trials, "Random draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*algebra) {
            SignTable table = kOctonionSigns;
            if (tamper) table = table.with_flipped(SubsetLabel(0b011), SubsetLabel(0b100));
            RunManifest m = manifest_base(algebra_opts);
            m.config = {{"command", "verify-algebra"}, {"tamper_sign_table", tamper}};
            return emit_reports(run_verify_algebra(table, algebra_opts.seed), algebra_opts, m);
        }

        if (*ident) {
            const ModelKind kind = parse_model(ident_model);
            if (kind == ModelKind::A && ident_n != 2) {
                std::cerr << "error: model a is defined for --n 2 only\n";
                return kUsage;
            }
            if (ident_trials == 0) std::cerr << "warning: --trials 0 runs no cases; passing vacuously\n";
            RunManifest m = manifest_base(ident_opts);
            m.config = {{"command", "verify-identities"}, {"model", ident_model}, {"n", ident_n},
                        {"trials", ident_trials}};
            return emit_reports(run_verify_identities(kind, ident_n, ident_trials, ident_opts.seed),
                                ident_opts, m);
        }

        if (*sample) {
            sample_cfg.model = parse_model(sample_model);
            sample_cfg.seed = sample_opts.seed;
            if (sample_cfg.model == ModelKind::A && sample_cfg.n != 2) {
                std::cerr << "error: model a is defined for --n 2 only\n";
                return kUsage;
            }
            sample_cfg.validate();
            const auto spectra = sample_spectra(sample_cfg, sample_opts.threads);
            std::ostringstream csv;
            write_spectrum_csv(csv, sample_cfg, spectra);
            write_text(sample_opts.out, csv.str());

            RunManifest m = manifest_base(sample_opts);
            m.config = {{"command", "sample-spectrum"}, {"model", sample_model}, {"n", sample_cfg.n},
                        {"t", sample_cfg.t}, {"samples", sample_cfg.samples},
                        {"cluster_tol", sample_cfg.cluster_tol}, {"bootstrap", bootstrap}};
            m.add_output(sample_opts.out);

            std::uint64_t bad = 0;
            for (const auto& s : spectra)
                if (!s.has_structure(sample_cfg.n)) ++bad;
            std::cout << "samples=" << spectra.size() << " multiplicity_failures=" << bad << "\n";

            int code = bad == 0 ? kOk : kSuiteFailed;
            if (sample_cfg.n == 2) {
                try {
                    const GapStatistics st =
                        gap_statistics(spectra, bootstrap, sample_cfg.seed, sample_opts.threads);
                    const std::string sp = stats_path.empty() ? sample_opts.out + ".stats.json" : stats_path;
                    const json doc = stats_json(sample_cfg, st);
                    write_text(sp, doc.dump(2) + "\n");
                    m.add_output(sp);
                    if (sample_opts.json) std::cout << doc.dump(2) << "\n";
                    std::cout << "implied_beta=" << format_double(st.implied_beta)
                              << " stderr=" << format_double(st.stderr_beta)
                              << " ratio=" << format_double(st.ratio) << "\n";
                } catch (const InsufficientData& e) {
                    std::cerr << "InsufficientData: " << e.what() << " (CSV written, no statistics)\n";
                    if (code == kOk) code = kInsufficientData;
                }
            } else {
                std::cout << "gap statistics are defined for n = 2 only; skipped\n";
            }
            write_manifest(m, sample_opts.out);
            return code;
        }

        if (*path) {
            path_cfg.model = parse_model(path_model);
            path_cfg.seed = path_opts.seed;
            if (path_cfg.model == ModelKind::A && path_cfg.n != 2) {
                std::cerr << "error: model a is defined for --n 2 only\n";
                return kUsage;
            }
            path_cfg.validate();
            std::vector<EulerPathResult> results(path_cfg.samples);
            parallel_for(path_cfg.samples, path_opts.threads,
                         [&](std::uint64_t p) { results[p] = euler_path(path_cfg, p); });

            std::ostringstream csv;
            csv << "path_id,step";
            for (Index i = 1; i <= path_cfg.n; ++i) csv << ",x" << i;
            for (Index i = 1; i <= path_cfg.n; ++i) csv << ",mult" << i;
            csv << ",spread\n";
            std::uint64_t structure_failures = 0, crossings = 0;
            double min_gap = std::numeric_limits<double>::infinity();
            for (std::uint64_t p = 0; p < results.size(); ++p) {
                const auto& r = results[p];
                structure_failures += r.structure_ok ? 0 : 1;
                crossings += r.crossing ? 1 : 0;
                min_gap = std::min(min_gap, r.min_gap);
                for (std::size_t k = 0; k < r.spectra.size(); ++k) {
                    const auto& s = r.spectra[k];
                    const bool shaped = static_cast<Index>(s.distinct.size()) == path_cfg.n;
                    csv << p << ',' << (k + 1);
                    for (Index i = 0; i < path_cfg.n; ++i)
                        csv << ',' << (shaped ? format_double(s.distinct[static_cast<std::size_t>(i)]) : "nan");
                    for (Index i = 0; i < path_cfg.n; ++i)
                        csv << ',' << (shaped ? s.multiplicities[static_cast<std::size_t>(i)] : 0);
                    csv << ',' << format_double(s.raw_spread) << '\n';
                }
            }
            write_text(path_opts.out, csv.str());
            RunManifest m = manifest_base(path_opts);
            m.config = {{"command", "simulate-path"}, {"model", path_model}, {"n", path_cfg.n},
                        {"t", path_cfg.t}, {"steps", path_cfg.steps}, {"paths", path_cfg.samples},
                        {"cluster_tol", path_cfg.cluster_tol}};
            m.add_output(path_opts.out);
            write_manifest(m, path_opts.out);
            const json summary{{"paths", path_cfg.samples},
                               {"steps", path_cfg.steps},
                               {"structure_failures", structure_failures},
                               {"crossings", crossings},
                               {"min_gap", min_gap}};
            std::cout << (path_opts.json ? summary.dump(2) : summary.dump()) << "\n";
            return structure_failures == 0 && crossings == 0 ? kOk : kSuiteFailed;
        }

        if (*solve) {
            MultiplicitySolution sol;
            try {
                sol = solve_multiplicity(problem);
            } catch (const NoAdmissibleRoot& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kSuiteFailed;
            }
            const InvariantExponent ex = invariant_exponent(problem, sol.a);
            json doc{{"alpha1", problem.alpha1}, {"alpha2", problem.alpha2}, {"alpha3", problem.alpha3},
                     {"roots", sol.roots},       {"a", sol.a},                {"a_is_integer", sol.is_integer},
                     {"residual", sol.residual}, {"kappa", ex.kappa},         {"beta", ex.beta}};
            if (solve_opts.json) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::cout << "roots:";
                for (double r : sol.roots) std::cout << ' ' << format_double(r);
                std::cout << "\na = " << format_double(sol.a) << (sol.is_integer ? " (integer)" : "")
                          << "\nkappa = " << format_double(ex.kappa) << "\nbeta = " << format_double(ex.beta)
                          << "\n";
            }
            if (!solve_opts.out.empty()) write_text(solve_opts.out, doc.dump(2) + "\n");
            return kOk;
        }

        if (*dim2) {
            const Dim2Report d = dim2_remark_checks(dim2_trials, dim2_opts.seed);
            std::vector<IdentityReport> reports{d.product_of_traces, d.product_of_traces_factor2,
                                                d.sandwich_imaginary, d.sandwich_real, d.scalar_2x2,
                                                d.counterexample};
            RunManifest m = manifest_base(dim2_opts);
            m.config = {{"command", "check-dim2"}, {"trials", dim2_trials}};
            const int code = emit_reports(reports, dim2_opts, m);
            if (!dim2_opts.json)
                std::cout << "n=3 counterexample residual " << format_double(d.counterexample_residual) << "\n";
            return code;
        }
    } catch (const std::system_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSuiteFailed;
    }
    return kUsage;
}
