#include "catalia/driver.hpp"
#include "catalia/error.hpp"
#include "catalia/process.hpp"
#include "catalia/proof.hpp"
#include "catalia/smtlib.hpp"
#include "test_systems.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace catalia;
using namespace catalia::testing;

namespace {

std::string expected_verdict(const std::string& name) {
    std::ifstream in(corpus_path(name.substr(0, name.size() - 5) + ".expected"));
    std::string v;
    in >> v;
    return v;
}

std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(CATALIA_CORPUS_DIR))
        if (e.path().extension() == ".smt2") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

// Sat carries a sampled model, unsat a feasible counterexample that the unfolder also finds.
void check_sound(const std::string& name, const ChcSystem& sys, const SolveResult& r, std::size_t samples) {
    if (r.verdict == Verdict::Sat) {
        ASSERT_TRUE(r.model.has_value()) << name;
        EXPECT_TRUE(r.model_check.ok()) << name;
        EXPECT_EQ(r.model_check.checked, samples * r.preprocessed.clauses.size()) << name;
        EXPECT_LT(r.model_check.vacuous, r.model_check.checked) << name;
    } else if (r.verdict == Verdict::Unsat) {
        ASSERT_TRUE(r.counterexample.has_value()) << name;
        EXPECT_FALSE(r.witness.empty() && !r.counterexample->vars.empty()) << name;
        EXPECT_TRUE(internal_unfold_unsat(sys, ground_oracle(sys.adts), {6, 50000}).has_value()) << name;
    }
}

class CorpusSeeds : public ::testing::TestWithParam<std::uint64_t> {};

} // namespace

TEST_P(CorpusSeeds, VerdictsAgreeWithExpectedAndAreSound) {
    // Each seed (and ladder cap) must agree with the recorded verdict or give up; no two runs can then
    // contradict each other.
    SolveConfig cfg;
    cfg.seed = GetParam();
    cfg.ladder_cap = GetParam() == 1 ? 3 : 6;
    for (const auto& name : corpus_files()) {
        ChcSystem sys = corpus(name);
        SolveResult r = solve(sys, cfg);
        std::string want = expected_verdict(name);
        if (GetParam() == 0) {
            EXPECT_EQ(to_string(r.verdict), want) << name << " " << r.reason;
        } else if (r.verdict != Verdict::Unknown) {
            EXPECT_EQ(to_string(r.verdict), want) << name;
        }
        EXPECT_LT(r.seconds, 60.0) << name;
        check_sound(name, sys, r, cfg.samples);
    }
}

INSTANTIATE_TEST_SUITE_P(Driver, CorpusSeeds, ::testing::Values(0U, 1U, 2U));

TEST(Driver, ObligationsGrowAndThetaResetsAtTemplateChange) {
    SolveConfig cfg;
    SolveResult r = solve(corpus("len_sum.smt2"), cfg);
    ASSERT_EQ(r.verdict, Verdict::Sat) << r.reason;
    ASSERT_FALSE(r.trace.empty());
    EXPECT_GE(r.template_index, 1U);
    std::size_t templates_seen = 1;
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        const auto& a = r.trace[i - 1];
        const auto& b = r.trace[i];
        EXPECT_GE(b.obligations, a.obligations);
        EXPECT_GE(b.template_index, a.template_index);
        if (b.template_index == a.template_index) {
            EXPECT_GE(b.theta_size, a.theta_size);
        } else {
            ++templates_seen;
            // Θ starts from true: everything in it came from the first synthesis call of the new template.
            EXPECT_LE(b.theta_size, b.obligations * 8);
        }
    }
    EXPECT_GE(templates_seen, 2U);
    EXPECT_EQ(r.iterations, r.trace.size());
}

TEST(Driver, IntegerSystemUsesIdentityAbstraction) {
    SolveResult r = solve(corpus("plus_int.smt2"), SolveConfig{});
    EXPECT_EQ(r.verdict, Verdict::Sat);
    EXPECT_EQ(r.iterations, 0U);
}

TEST(Driver, TimeoutGivesUnknown) {
    SolveConfig cfg;
    cfg.timeout = 1e-9;
    SolveResult r = solve(corpus("list_sum.smt2"), cfg);
    EXPECT_EQ(r.verdict, Verdict::Unknown);
    EXPECT_EQ(r.reason.rfind("timeout", 0), 0U) << r.reason;
    cfg.timeout = 0;
    EXPECT_THROW(solve(corpus("list_sum.smt2"), cfg), Error);
}

TEST(Driver, BrokenBackendGivesUnknown) {
    SolveConfig cfg;
    cfg.backend.executable = "/nonexistent/solver";
    SolveResult r = solve(corpus("plusnat.smt2"), cfg);
    EXPECT_EQ(r.verdict, Verdict::Unknown);
    EXPECT_EQ(r.reason.rfind("backend-failure", 0), 0U) << r.reason;
}

TEST(Driver, DumpsCounterexamples) {
    auto dir = std::filesystem::temp_directory_path() / "catalia_dump_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    SolveConfig cfg;
    cfg.dump_cex = dir.string();
    SolveResult r = solve(corpus("list_sum.smt2"), cfg);
    ASSERT_EQ(r.verdict, Verdict::Sat);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        ++files;
        std::ifstream in(e.path());
        std::stringstream ss;
        ss << in.rdbuf();
        EXPECT_NE(ss.str().find("(check-sat)"), std::string::npos);
    }
    EXPECT_EQ(files, r.iterations);
    std::filesystem::remove_all(dir);
}

TEST(Driver, BenchmarkHarness) {
    auto dir = std::filesystem::temp_directory_path() / "catalia_bench_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    EXPECT_TRUE(benchmark_run(dir.string(), SolveConfig{}).empty());
    std::filesystem::copy_file(corpus_path("plusnat_unsat.smt2"), dir / "a.smt2");
    std::ofstream(dir / "a.expected") << "sat\n";
    std::filesystem::copy_file(corpus_path("s_eq_z.smt2"), dir / "b.smt2");
    std::ofstream(dir / "c.smt2") << "(assert (forall ((x Int)) (=> (> x 0) false))";
    auto rows = benchmark_run(dir.string(), SolveConfig{});
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_TRUE(rows[0].hard_mismatch);
    EXPECT_EQ(rows[1].verdict, Verdict::Sat);
    EXPECT_FALSE(rows[1].hard_mismatch);
    EXPECT_EQ(rows[2].verdict, Verdict::Unknown);
    std::ostringstream csv, summary;
    write_csv(csv, rows);
    write_summary(summary, rows);
    std::string table = csv.str();
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
    EXPECT_NE(summary.str().find("1 wrong"), std::string::npos) << summary.str();
    std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodesAndOutput) {
    auto run = [](std::vector<std::string> args, const std::string& input = "") {
        args.insert(args.begin(), CATALIA_CLI);
        return run_process(args, input, 120);
    };
    auto help = run({"--help"});
    EXPECT_EQ(help.exit_code, 0);
    EXPECT_NE(help.out.find("--print-model"), std::string::npos);
    EXPECT_EQ(run({corpus_path("missing.smt2")}).exit_code, 1);
    EXPECT_EQ(run({"--no-such-flag"}).exit_code, 1);

    auto sat = run({corpus_path("plusnat.smt2"), "--print-model"});
    EXPECT_EQ(sat.exit_code, 0);
    EXPECT_EQ(sat.out.substr(0, 4), "sat\n");
    EXPECT_NE(sat.out.find("define-funs-rec"), std::string::npos);
    EXPECT_NE(sat.out.find("(define-fun PlusNat"), std::string::npos);

    auto unsat = run({"-", "--print-proof"}, "(set-logic HORN)\n" + std::string(kNatDecl) +
                                                 "(assert (forall ((x nat)) (=> (= x (S Z)) false)))\n(check-sat)\n");
    EXPECT_EQ(unsat.exit_code, 0);
    EXPECT_EQ(unsat.out.substr(0, 6), "unsat\n");
    EXPECT_NE(unsat.out.find("(assert"), std::string::npos);

    auto unknown = run({corpus_path("list_sum.smt2"), "--timeout", "0.000001"});
    EXPECT_EQ(unknown.exit_code, 2);
    EXPECT_EQ(unknown.out, "unknown\n");

    ::setenv("CATALIA_BACKEND", "/nonexistent/solver", 1);
    auto overridden = run({corpus_path("plusnat.smt2"), "--backend", BackendConfig{}.executable});
    ::unsetenv("CATALIA_BACKEND");
    EXPECT_EQ(overridden.exit_code, 2);
    EXPECT_NE(overridden.err.find("backend-failure"), std::string::npos) << overridden.err;
}
