#pragma once

#include "catalia/ast.hpp"

#include <set>
#include <string>
#include <string_view>

namespace catalia {

/// Simultaneous substitution. Bound variables of quantified formulas are renamed when they would capture.
[[nodiscard]] Term substitute(const Term& t, const Subst& mapping);
[[nodiscard]] Formula substitute(const Formula& f, const Subst& mapping);
[[nodiscard]] Atom substitute(const Atom& a, const Subst& mapping);

void collect_free_vars(const Term& t, VarSet& out);
void collect_free_vars(const Formula& f, VarSet& out);
[[nodiscard]] VarSet free_vars(const Term& t);
[[nodiscard]] VarSet free_vars(const Formula& f);
/// Free variables of head, constraint and body atoms.
[[nodiscard]] VarSet free_vars(const Clause& c);

[[nodiscard]] bool is_ground(const Term& t);
/// Number of constructor applications in a term.
[[nodiscard]] std::size_t term_size(const Term& t);
[[nodiscard]] bool is_quantifier_free(const Formula& f);
[[nodiscard]] bool contains_not(const Formula& f);

/// Conjunction of the comparisons `lhs[i] = rhs[i]`.
[[nodiscard]] Formula pointwise_eq(const std::vector<Term>& lhs, const std::vector<Term>& rhs);

/// Deterministic fresh-name generator.
class NameSupply {
public:
    NameSupply() = default;
    explicit NameSupply(std::set<std::string> used) : used_(std::move(used)) {}

    void reserve(std::string name) { used_.insert(std::move(name)); }
    [[nodiscard]] bool used(std::string_view name) const { return used_.count(std::string(name)) != 0; }
    /// `base` if unused, otherwise `base!k` for the smallest unused k.
    std::string fresh(std::string_view base);

private:
    std::set<std::string> used_;
};

/// Names of all variables (bound and free) appearing in a clause.
[[nodiscard]] std::set<std::string> clause_names(const Clause& c);

/// Returns the sort of a term under the given variable scope; throws SortError.
Sort check_term(const ChcSystem& sys, const Term& t, const VarSet& scope);
void check_formula(const ChcSystem& sys, const Formula& f, const VarSet& scope);
void check_clause(const ChcSystem& sys, const Clause& c);
/// Validates every clause of the system; throws SortError on the first problem.
void check_sorts(const ChcSystem& sys);

/// Equality up to a positional renaming of the clause variables.
[[nodiscard]] bool alpha_equivalent(const Clause& a, const Clause& b);
[[nodiscard]] bool alpha_equivalent(const ChcSystem& a, const ChcSystem& b);

} // namespace catalia

namespace catalia {

/// Arithmetic constructors that fold literal operands and the units 0 and 1.
[[nodiscard]] Term fold_arith(ArithOp op, const Term& a, const Term& b);
[[nodiscard]] inline Term fold_add(const Term& a, const Term& b) { return fold_arith(ArithOp::Add, a, b); }
[[nodiscard]] inline Term fold_sub(const Term& a, const Term& b) { return fold_arith(ArithOp::Sub, a, b); }
[[nodiscard]] inline Term fold_mul(const Term& a, const Term& b) { return fold_arith(ArithOp::Mul, a, b); }

/// Integer division and modulus with SMT-LIB semantics (remainder is nonnegative). Division by zero yields 0.
[[nodiscard]] Integer smt_div(const Integer& a, const Integer& b);
[[nodiscard]] Integer smt_mod(const Integer& a, const Integer& b);

} // namespace catalia
