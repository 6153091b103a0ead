#pragma once

#include "catalia/abstraction.hpp"
#include "catalia/backend.hpp"
#include "catalia/catamorphism.hpp"
#include "catalia/counterexample.hpp"
#include "catalia/proof.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace catalia {

struct SolveConfig {
    BackendConfig backend;
    /// Wall-clock budget for the whole solve, seconds.
    double timeout = 60;
    /// Testing timeout after the first test of each synthesis call.
    double default_test_timeout = 1.0;
    std::size_t ladder_cap = 6;
    /// Grow the degree instead of the bounds past the fifth ladder element.
    bool raise_degree = false;
    /// Testing never times out.
    bool no_timeout = false;
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    /// Debug switch: skip admissibility augmentation.
    bool admissibility = true;
    /// Spurious-with-unknown-feasibility counterexamples tolerated per template.
    std::size_t max_unknown_feasibility = 3;
    /// Directory receiving one SMT-LIB2 file per counterexample; empty disables.
    std::string dump_cex;
    std::ostream* log = nullptr;
};

enum class Verdict { Sat, Unsat, Unknown };

[[nodiscard]] const char* to_string(Verdict v);

struct IterationRecord {
    std::size_t template_index = 0;
    std::size_t obligations = 0;
    std::size_t theta_size = 0;
};

struct SolveResult {
    Verdict verdict = Verdict::Unknown;
    /// ladder-exhausted, timeout or backend-failure, with detail.
    std::string reason;
    std::optional<ConcreteModel> model;
    ModelCheckReport model_check;
    Catamorphism cata;
    std::optional<Counterexample> counterexample;
    GroundEnv witness;
    /// Abstract refutation of the final iteration, in ids of the preprocessed system.
    std::optional<ResolutionProof> proof;
    ChcSystem preprocessed;
    std::size_t iterations = 0;
    std::size_t template_index = 0;
    std::size_t repeated_counterexamples = 0;
    std::vector<IterationRecord> trace;
    double seconds = 0;
};

SolveResult solve(const ChcSystem& sys, const SolveConfig& cfg);

struct BenchRow {
    std::string instance;
    std::string expected;
    Verdict verdict = Verdict::Unknown;
    std::string reason;
    double seconds = 0;
    std::size_t iterations = 0;
    std::size_t template_index = 0;
    /// sat reported where unsat was expected or the other way round.
    bool hard_mismatch = false;
};

/// Solves every .smt2 file of a directory (sorted by name); `name.expected` holds the expected verdict.
std::vector<BenchRow> benchmark_run(const std::string& directory, const SolveConfig& cfg);
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_summary(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace catalia
