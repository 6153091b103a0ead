#pragma once

#include "catalia/ast.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace catalia {

/// One SLD step: resolve atom `position` of the accumulated goal against the head of `clause`.
struct ProofStep {
    std::size_t clause = 0;
    std::size_t position = 0;
    bool admissibility = false;
    /// Ground instance of the resolved atom when the backend reported one.
    std::vector<Term> instance;
};

/// SLD refutation rooted at a goal clause.
struct ResolutionProof {
    std::size_t goal = 0;
    std::vector<ProofStep> steps;

    [[nodiscard]] std::string to_string() const;
    /// Multiset of clause ids used, goal included, sorted.
    [[nodiscard]] std::vector<std::size_t> clause_multiset() const;
};

/// Hyper-resolution tree: `clause` applied with one subtree per body atom, in body order.
struct Derivation {
    std::size_t clause = 0;
    std::vector<Term> instance;
    std::vector<Derivation> premises;
};

/// Leftmost-first linearization of a derivation rooted at a goal clause.
ResolutionProof linearize(const Derivation& root, const ChcSystem& sys);

/// Accumulated goal after an SLD prefix: constraint conjuncts and pending atoms.
struct Resolvent {
    std::vector<TypedVar> vars;
    std::vector<Formula> constraint;
    std::vector<Atom> atoms;
    /// Derivation-tree level of each pending atom (goal body atoms are at level 1).
    std::vector<std::size_t> levels;
    /// Steps applied so far, for the proof record.
    ResolutionProof proof;
    std::size_t depth = 0;
};

/// Starts a resolvent from a goal clause with variables renamed apart.
Resolvent start_resolvent(const ChcSystem& sys, std::size_t goal);
/// Resolves the atom at `position` with a renamed copy of `clause`. Throws ReplayMismatch on head mismatch.
Resolvent resolve(const Resolvent& r, const ChcSystem& sys, std::size_t position, std::size_t clause);

/// Replaces the atom at `position` by the clause's body atoms without adding any constraint.
/// Used to step over admissibility atoms during replay.
Resolvent skip_atom(const Resolvent& r, const ChcSystem& sys, std::size_t position, std::size_t clause);

/// Cheap syntactic refutation: literal comparisons, constructor clashes.
bool quick_refute(const std::vector<Formula>& constraint);

enum class OracleAnswer { Sat, Unsat, Unknown };
using ConstraintOracle = std::function<OracleAnswer(const std::vector<TypedVar>&, const Formula&)>;

struct UnfoldLimits {
    /// Bound on the height of the derivation tree.
    std::size_t max_depth = 6;
    std::size_t max_nodes = 20000;
};

/// Bounds for the enumeration oracle.
struct GroundSearch {
    std::size_t max_size = 4;
    long int_lo = -3;
    long int_hi = 3;
    std::size_t max_points = 200000;
};

/// Backend-free oracle: Sat when some assignment inside the bounds satisfies the constraint,
/// Unsat when it simplifies to false, Unknown otherwise.
ConstraintOracle ground_oracle(const AdtSignature& adts, GroundSearch bounds = {});

/// Breadth-first SLD unfolding from each goal clause (clause id ascending, leftmost atom).
/// Returns the first complete derivation whose constraint the oracle reports Sat.
std::optional<ResolutionProof> internal_unfold_unsat(const ChcSystem& sys, const ConstraintOracle& oracle,
                                                     const UnfoldLimits& limits = {});

/// Replays a proof on the system it refers to and returns the residual constraint.
Resolvent replay_on(const ChcSystem& sys, const ResolutionProof& proof);

/// Parses a z3 fixedpoint hyper-resolution proof for the queried (ADT-free) system.
/// Clause identity is recovered from the ground premises; `oracle` breaks ties between candidates.
ResolutionProof parse_proof(const std::string& text, const ChcSystem& sys, const ConstraintOracle& oracle);

} // namespace catalia
