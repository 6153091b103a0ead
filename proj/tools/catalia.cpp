// Command-line front end: catalia <file.smt2> [options]
#include "catalia/driver.hpp"
#include "catalia/error.hpp"
#include "catalia/smtlib.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace catalia;

namespace {

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

void print_proof(std::ostream& out, const SolveResult& r) {
    if (!r.counterexample) return;
    const ChcSystem& P = r.preprocessed;
    out << "; refutation over the original clauses:";
    for (std::size_t c : r.counterexample->provenance) out << " " << c;
    out << "\n";
    for (std::size_t c : r.counterexample->provenance) out << ";   " << c << ": " << P.clauses[c].to_string() << "\n";
    if (r.proof) out << "; abstract proof: " << r.proof->to_string() << "\n";
    out << "; counterexample\n(assert " << r.counterexample->constraint.to_string() << ")\n";
    out << "; witness\n";
    for (const auto& [name, value] : r.witness) out << "(define-const " << name << " " << value.sort().to_string()
                                                    << " " << value.to_string() << ")\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CHC satisfiability over algebraic data types via catamorphism abstraction"};
    std::string file;
    std::string backend, backend_args, backend_config, bench_dir, csv_path;
    SolveConfig cfg;
    bool print_model = false, print_proof_flag = false, no_adm = false, verbose = false;
    std::size_t bmc_depth = 0;

    app.add_option("file", file, "SMT-LIB2 HORN problem ('-' or omitted: stdin)");
    app.add_option("--timeout", cfg.timeout, "global timeout in seconds")->check(CLI::PositiveNumber);
    app.add_option("--backend", backend, "solver executable (env CATALIA_BACKEND overrides)");
    app.add_option("--backend-args", backend_args, "arguments for CHC queries (replaces the portfolio)");
    app.add_option("--backend-config", backend_config, "key=value backend configuration file");
    app.add_option("--call-timeout", cfg.backend.timeout, "cap per backend call in seconds")
        ->check(CLI::PositiveNumber);
    app.add_option("--default-test-timeout", cfg.default_test_timeout, "testing timeout in seconds")
        ->check(CLI::PositiveNumber);
    app.add_option("--ladder-cap", cfg.ladder_cap, "number of templates tried");
    app.add_option("--samples", cfg.samples, "ground samples per clause for the model check");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_flag("--print-model", print_model, "print the model as SMT-LIB2");
    app.add_flag("--print-proof", print_proof_flag, "print the refutation");
    app.add_option("--dump-cex", cfg.dump_cex, "directory for counterexample scripts");
    app.add_option("--internal-bmc-depth", bmc_depth, "depth of the internal unfolder fallback");
    app.add_option("--transcripts", cfg.backend.transcripts, "directory of recorded backend transcripts");
    app.add_flag("--no-timeout", cfg.no_timeout, "never time out testing queries");
    app.add_flag("--no-degree-cap", cfg.raise_degree, "raise the degree along the template ladder");
    app.add_flag("--no-admissibility", no_adm, "debug: skip admissibility augmentation");
    app.add_flag("-v,--verbose", verbose, "progress on stderr");
    app.add_option("--bench", bench_dir, "solve every .smt2 file of a directory and print a table");
    app.add_option("--csv", csv_path, "with --bench: write the table as CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!backend_config.empty()) {
            BackendConfig b = BackendConfig::from_file(backend_config);
            if (cfg.backend.transcripts.size()) b.transcripts = cfg.backend.transcripts;
            cfg.backend = b;
        }
        if (!backend.empty()) cfg.backend.executable = backend;
        if (!backend_args.empty()) cfg.backend.chc_portfolio = {words(backend_args)};
        if (bmc_depth) cfg.backend.unfold_depth = bmc_depth;
        cfg.backend.apply_env();
        cfg.admissibility = !no_adm;
        if (verbose) cfg.log = &std::cerr;

        if (!bench_dir.empty()) {
            auto rows = benchmark_run(bench_dir, cfg);
            if (!csv_path.empty()) {
                std::ofstream out(csv_path);
                write_csv(out, rows);
            } else {
                write_csv(std::cout, rows);
            }
            write_summary(std::cout, rows);
            for (const auto& r : rows)
                if (r.hard_mismatch) return 1;
            return 0;
        }

        ChcSystem sys;
        if (file.empty() || file == "-") {
            std::stringstream ss;
            ss << std::cin.rdbuf();
            sys = parse_system(ss.str(), "<stdin>");
        } else {
            sys = parse_system_file(file);
        }
        SolveResult r = solve(sys, cfg);
        std::cout << to_string(r.verdict) << "\n";
        if (r.verdict == Verdict::Unknown) std::cerr << "reason: " << r.reason << "\n";
        if (print_model && r.model) std::cout << r.model->to_smtlib();
        if (print_proof_flag) print_proof(std::cout, r);
        return r.verdict == Verdict::Unknown ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
