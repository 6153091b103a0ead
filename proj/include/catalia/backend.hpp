#pragma once

#include "catalia/abstraction.hpp"
#include "catalia/ast.hpp"
#include "catalia/catamorphism.hpp"
#include "catalia/eval.hpp"
#include "catalia/proof.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace catalia {

struct BackendConfig {
    std::string executable;
    /// Sequential fallback list of argument sets for CHC queries; each entry but the last gets `slice`.
    std::vector<std::vector<std::string>> chc_portfolio{
        {"-in", "fp.spacer.global=true"}, {"-in", "fp.spacer.use_iuc=false"}, {"-in"}};
    double slice = 5;
    std::vector<std::string> smt_args{"-in"};
    /// Per-call cap in seconds.
    double timeout = 30;
    bool proofs = true;
    /// Internal unfolder depth used when the backend proof is missing or unreadable.
    std::size_t unfold_depth = 8;
    /// Cache directory of (query hash -> response) files; empty disables recording.
    std::string transcripts;

    BackendConfig();

    /// key=value lines: executable, chc-args (alternatives separated by '|'), smt-args, timeout, slice, proofs,
    /// unfold-depth, transcripts.
    static BackendConfig from_file(const std::string& path);
    /// CATALIA_BACKEND, if set, replaces the executable.
    void apply_env();
};

inline constexpr double kNoTimeout = std::numeric_limits<double>::infinity();

enum class ChcStatus { Sat, Unsat, Unknown };

struct ChcResult {
    ChcStatus status = ChcStatus::Unknown;
    AbstractModel model;
    std::optional<ResolutionProof> proof;
    std::string reason;
};

/// Decides an ADT-free system. Unsat results carry a proof (backend proof, else the internal unfolder).
ChcResult chc_check_sat(const ChcSystem& sys, const BackendConfig& cfg, double timeout);

enum class SmtStatus { Sat, Unsat, Unknown, Timeout };

struct SmtQuery {
    std::vector<TypedVar> vars;
    Formula constraint;
    const AdtSignature* adts = nullptr;
    /// Emitted as define-funs-rec when the constraint mentions catamorphism applications.
    const Catamorphism* cata = nullptr;
    std::string logic = "ALL";
};

struct SmtResult {
    SmtStatus status = SmtStatus::Unknown;
    GroundEnv assignment;
    std::string reason;
};

/// One-shot satisfiability query with a model for every declared variable.
SmtResult smt_check_sat(const SmtQuery& q, const BackendConfig& cfg, double timeout);

/// SMT-backed oracle for the proof and unfolding code.
ConstraintOracle smt_oracle(const AdtSignature& adts, const BackendConfig& cfg, double timeout);

/// Script text sent for a CHC query (exposed for transcripts and tests).
std::string chc_script(const ChcSystem& sys, bool proofs);
std::string smt_script(const SmtQuery& q);

} // namespace catalia
