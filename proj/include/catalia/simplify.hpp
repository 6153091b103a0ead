#pragma once

#include "catalia/ast.hpp"

namespace catalia {

/// Folds literal arithmetic and comparisons between literals or identical terms.
Term fold_constants(const Term& t);
Formula fold_constants(const Formula& f);

/// Equality propagation (x := t for conjuncts x = t with x not in t), constant folding and
/// removal of trivially true conjuncts. Syntactic only; no constructor-clash reasoning.
Formula simplify(const Formula& f);

/// Applies equality propagation to a clause constraint, substituting into atoms and dropping the
/// eliminated variables. The result has the same ground instances modulo the eliminated variables.
Clause propagate_equalities(const Clause& c);

} // namespace catalia
