#pragma once

#include "catalia/ast.hpp"
#include "catalia/backend.hpp"
#include "catalia/catamorphism.hpp"
#include "catalia/counterexample.hpp"
#include "catalia/eval.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace catalia {

/// Closed formula forall vars. body, body quantifier-free (may contain negation).
struct ProofObligation {
    std::vector<TypedVar> vars;
    Formula body;

    [[nodiscard]] std::string to_string() const;
};

/// forall vars. not theta, for a spurious counterexample.
ProofObligation obligation_from(const Counterexample& cex);

/// Constraint-generation map: ADT (dis)equalities become tuple (dis)equalities of catamorphism
/// applications; everything else is kept.
Formula encode(const Formula& phi, std::size_t degree);

/// Unfolds each catamorphism application on a ground argument through the template's structure maps,
/// after applying `ground`. The result mentions template parameters only. Throws NonGroundApplication.
Formula reduce_ground(const Formula& encoded, const TemplateCatamorphism& tmpl, const GroundEnv& ground);

/// Symbolic catamorphism value of a ground term under a template.
std::vector<Term> symbolic_value(const TemplateCatamorphism& tmpl, const Term& ground);

enum class TestVerdict { Counterexample, Valid, TimeoutAssumedValid };

struct TestOutcome {
    TestVerdict verdict = TestVerdict::Valid;
    GroundEnv witness;
};

/// Looks for ground values falsifying the encoding of `body` under `cata`.
TestOutcome test_candidate(const ProofObligation& ob, const Catamorphism& cata, const AdtSignature& adts,
                           const BackendConfig& cfg, double timeout);

/// Conjunction of parameter constraints accumulated by the synthesis loop.
struct ParamConstraint {
    std::vector<Formula> conjuncts;

    [[nodiscard]] Formula formula() const { return Formula::conj(conjuncts); }
    [[nodiscard]] bool holds(const ParamAssignment& m) const;
};

/// Number of grid points over the parameters the constraint mentions; nullopt past `max_points`.
std::optional<std::uint64_t> grid_points(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                         std::uint64_t max_points = 20'000'000);

/// Lexicographically first grid point satisfying the constraint, or nullopt.
/// Requires a bounded template; gives up past `max_points`.
std::optional<ParamAssignment> grid_search(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                           std::uint64_t max_points = 20'000'000);
/// Same result, grid split over OpenMP threads.
std::optional<ParamAssignment> grid_search_parallel(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                                    std::uint64_t max_points = 20'000'000);

enum class ThetaStatus { Sat, Unsat, Unknown };

struct ThetaSolution {
    ThetaStatus status = ThetaStatus::Unknown;
    ParamAssignment model;
};

/// Solves the constraint over the template's parameters: grids of up to 200k points are searched
/// directly, larger ones go to the backend (NIA) with the grid as fallback.
ThetaSolution solve_theta(const ParamConstraint& theta, const TemplateCatamorphism& tmpl, const BackendConfig& cfg,
                          double timeout, bool parallel_grid = true);

struct SynthConfig {
    double default_timeout = 1.0;
    /// No testing timeout at all (otherwise only the first test is unbounded).
    bool no_timeout = false;
    /// Samples tried when the backend gives no witness on the first test.
    std::size_t fallback_samples = 20000;
    std::uint64_t seed = 0;
    bool parallel_grid = true;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class SynthStatus { Refined, Exhausted, Stuck };

struct SynthResult {
    SynthStatus status = SynthStatus::Stuck;
    Catamorphism cata;
    ParamConstraint theta;
    ParamAssignment assignment;
    std::size_t iterations = 0;
    /// Assignments refuted during the call, each falsifying the returned constraint.
    std::vector<ParamAssignment> refuted;
    std::string reason;
};

/// CEGIS over the template: test the current catamorphism against the obligations, add the grounded
/// encodings to the parameter constraint, solve it, repeat until testing finds nothing.
SynthResult synthesize(const std::vector<ProofObligation>& obligations, const Catamorphism& current,
                       const ParamConstraint& theta, const TemplateCatamorphism& tmpl, const AdtSignature& adts,
                       const BackendConfig& cfg, const SynthConfig& scfg,
                       const std::optional<ParamAssignment>& current_assignment = std::nullopt);

} // namespace catalia
