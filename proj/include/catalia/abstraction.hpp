#pragma once

#include "catalia/ast.hpp"
#include "catalia/catamorphism.hpp"
#include "catalia/eval.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace catalia {

/// ADT variable -> its N integer variables.
using AbstractionEnv = std::map<std::string, std::vector<Term>, std::less<>>;

/// Abstract value of a term: one integer term for integers, N for ADT terms.
std::vector<Term> abstract_term(const AbstractionEnv& eta, const Catamorphism& cata, const Term& t);
Formula abstract_constraint(const AbstractionEnv& eta, const Catamorphism& cata, const Formula& f);
/// Abstracts one clause; the ADT variable x becomes x!0 ... x!(N-1).
Clause abstract_clause(const Catamorphism& cata, const Clause& c, AbstractionEnv* env_out = nullptr);

struct AbstractSystem {
    ChcSystem system;
    /// abstract clause id -> original clause id (the identity, kept explicit for replay).
    std::vector<std::size_t> clause_map;
    std::vector<AbstractionEnv> envs;
};

AbstractSystem abstract_system(const Catamorphism& cata, const ChcSystem& sys);

/// Predicate interpretation as a formula over named parameters.
struct PredicateDefinition {
    std::vector<TypedVar> params;
    Formula body;
};

struct AbstractModel {
    std::map<std::string, PredicateDefinition, std::less<>> defs;
};

struct ConcreteModel {
    Catamorphism cata;
    AdtSignature adts;
    std::map<std::string, PredicateDefinition, std::less<>> defs;

    /// True if the predicate holds for the given ground arguments.
    [[nodiscard]] bool holds(const std::string& pred, const std::vector<Term>& args) const;
    /// SMT-LIB2: catamorphism definitions followed by one define-fun per predicate.
    [[nodiscard]] std::string to_smtlib() const;
};

/// Model transfer: P(x1..xk) := P^(cata(x1)..cata(xk)). Throws MissingDefinition.
ConcreteModel concretize_model(const AbstractModel& model, const Catamorphism& cata, const ChcSystem& original);

struct ModelViolation {
    std::size_t clause = 0;
    std::size_t sample = 0;
    GroundEnv witness;
};

struct ModelCheckReport {
    std::size_t checked = 0;
    std::size_t vacuous = 0;  // samples whose body was false
    std::vector<ModelViolation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

struct SampleConfig {
    std::size_t samples = 500;
    std::size_t max_term_size = 8;
    long int_lo = -16;
    long int_hi = 16;
    std::uint64_t seed = 0;
};

/// Random ground instances of every clause evaluated under the model (serial reference).
ModelCheckReport check_model_on_ground_instances(const ConcreteModel& model, const ChcSystem& sys,
                                                 const SampleConfig& cfg);
/// Same result as the serial version, samples distributed over OpenMP threads.
ModelCheckReport check_model_on_ground_instances_parallel(const ConcreteModel& model, const ChcSystem& sys,
                                                          const SampleConfig& cfg);

} // namespace catalia
