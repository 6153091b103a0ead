#pragma once

#include "catalia/ast.hpp"
#include "catalia/backend.hpp"
#include "catalia/proof.hpp"

#include <string>
#include <vector>

namespace catalia {

struct Counterexample {
    std::vector<TypedVar> vars;
    Formula constraint;
    /// Original clause ids used by the replay (goal first, admissibility steps excluded).
    std::vector<std::size_t> provenance;

    /// SMT-LIB2 script asserting the constraint, for diagnostics dumps.
    [[nodiscard]] std::string to_smtlib(const AdtSignature& adts) const;
};

/// Performs the proof's resolution steps on the original clauses. `clause_map` sends abstract clause ids
/// to original ids. Steps on admissibility atoms are skipped. Throws ReplayMismatch.
Counterexample replay_proof(const ResolutionProof& proof, const ChcSystem& original,
                            const std::vector<std::size_t>& clause_map);

/// Equality propagation and constant folding; variables that disappear are dropped.
Counterexample simplify(const Counterexample& cex);

/// Sat: the counterexample is real. Unsat: spurious. Backend failures come back as Unknown.
SmtResult feasibility(const Counterexample& cex, const AdtSignature& adts, const BackendConfig& cfg, double timeout);

} // namespace catalia
