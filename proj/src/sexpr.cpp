#include "catalia/sexpr.hpp"

#include "catalia/error.hpp"

#include <cctype>

namespace catalia {

namespace {

bool is_simple_symbol_char(char c) {
    if (std::isalnum(static_cast<unsigned char>(c))) return true;
    switch (c) {
        case '~': case '!': case '@': case '$': case '%': case '^': case '&': case '*':
        case '_': case '-': case '+': case '=': case '<': case '>': case '.': case '?':
        case '/': case '\'':
            return true;
        default:
            return false;
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_ws();
        while (pos_ < text_.size()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = peek();
            if (c == ';') {
                while (pos_ < text_.size() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        e.line = line_;
        e.column = col_;
        char c = peek();
        if (c == '(') {
            advance();
            e.kind = SExpr::Kind::List;
            skip_ws();
            while (true) {
                if (pos_ >= text_.size()) throw ParseError("unterminated list", e.line, e.column);
                if (peek() == ')') {
                    advance();
                    break;
                }
                e.items.push_back(read());
                skip_ws();
            }
            return e;
        }
        if (c == ')') throw ParseError("unexpected ')'", line_, col_);
        if (c == '|') {
            advance();
            e.kind = SExpr::Kind::Symbol;
            while (true) {
                if (pos_ >= text_.size()) throw ParseError("unterminated quoted symbol", e.line, e.column);
                if (peek() == '|') {
                    advance();
                    break;
                }
                e.text.push_back(peek());
                advance();
            }
            return e;
        }
        if (c == '"') {
            advance();
            e.kind = SExpr::Kind::String;
            while (true) {
                if (pos_ >= text_.size()) throw ParseError("unterminated string literal", e.line, e.column);
                if (peek() == '"') {
                    advance();
                    if (pos_ < text_.size() && peek() == '"') {
                        e.text.push_back('"');
                        advance();
                        continue;
                    }
                    break;
                }
                e.text.push_back(peek());
                advance();
            }
            return e;
        }
        std::string tok;
        while (pos_ < text_.size()) {
            char d = peek();
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '"' ||
                d == '|')
                break;
            tok.push_back(d);
            advance();
        }
        if (tok.empty()) throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        e.text = tok;
        if (tok[0] == ':') {
            e.kind = SExpr::Kind::Keyword;
        } else if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
            bool digits = true;
            bool decimal = false;
            for (char d : tok) {
                if (d == '.' && !decimal) {
                    decimal = true;
                } else if (!std::isdigit(static_cast<unsigned char>(d))) {
                    digits = false;
                }
            }
            if (!digits) throw ParseError("malformed numeral '" + tok + "'", e.line, e.column);
            e.kind = decimal ? SExpr::Kind::Decimal : SExpr::Kind::Numeral;
        } else {
            e.kind = SExpr::Kind::Symbol;
        }
        return e;
    }
};

} // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::string quote_symbol(std::string_view name) {
    bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
    for (char c : name) simple = simple && is_simple_symbol_char(c);
    if (simple) return std::string(name);
    return "|" + std::string(name) + "|";
}

std::string SExpr::to_string() const {
    switch (kind) {
        case Kind::Symbol: return quote_symbol(text);
        case Kind::String: return "\"" + text + "\"";
        case Kind::List: {
            std::string s = "(";
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) s += ' ';
                s += items[i].to_string();
            }
            return s + ")";
        }
        default: return text;
    }
}

} // namespace catalia
