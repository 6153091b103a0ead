#pragma once

#include "catalia/ast.hpp"

#include <string>
#include <string_view>

namespace catalia {

/// Parses a HORN-logic SMT-LIB2 script.
/// Throws ParseError (with position), SortError or UnsupportedFeature.
ChcSystem parse_system(std::string_view text, std::string source = {});
ChcSystem parse_system_file(const std::string& path);

struct SExpr;

/// Elaborates a quantifier-free formula over the given variables (used for solver models).
Formula parse_formula(const SExpr& e, const std::vector<TypedVar>& scope, const AdtSignature& adts);
/// Elaborates a term over the given variables (used for solver witnesses).
Term parse_term(const SExpr& e, const std::vector<TypedVar>& scope, const AdtSignature& adts);

/// Deterministic SMT-LIB2 rendering; `parse_system` reads it back to an alpha-equivalent system.
std::string print_system(const ChcSystem& sys);

/// `(declare-datatypes ...)` commands, one per family.
std::string print_datatypes(const AdtSignature& adts);
/// `(assert (forall ... (=> body head)))` for one clause.
std::string print_clause(const Clause& c);

} // namespace catalia
