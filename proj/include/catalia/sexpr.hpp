#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace catalia {

/// A parsed SMT-LIB2 s-expression with its source position.
struct SExpr {
    enum class Kind { Symbol, Numeral, Decimal, String, Keyword, List };

    Kind kind = Kind::List;
    std::string text;  // atom text; for quoted symbols the unquoted contents
    std::vector<SExpr> items;
    int line = 0;
    int column = 0;

    [[nodiscard]] bool is_list() const { return kind == Kind::List; }
    [[nodiscard]] bool is_symbol() const { return kind == Kind::Symbol; }
    [[nodiscard]] bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
    [[nodiscard]] bool is_numeral() const { return kind == Kind::Numeral; }
    [[nodiscard]] std::size_t size() const { return items.size(); }
    [[nodiscard]] const SExpr& operator[](std::size_t i) const { return items[i]; }

    /// True if this is a list whose head is the given symbol.
    [[nodiscard]] bool is_app(std::string_view head) const {
        return is_list() && !items.empty() && items.front().is_symbol(head);
    }

    [[nodiscard]] std::string to_string() const;
};

/// Parses every top-level s-expression of an SMT-LIB2 text. Throws ParseError.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Quotes a symbol with |...| when it is not a legal simple symbol.
std::string quote_symbol(std::string_view name);

} // namespace catalia
