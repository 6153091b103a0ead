#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace catalia {

using Integer = mpz_class;

enum class SortKind { Int, Bool, Adt };

class Sort {
public:
    Sort() = default;

    static Sort integer() { return Sort(); }
    static Sort boolean() {
        Sort s;
        s.kind_ = SortKind::Bool;
        return s;
    }
    static Sort adt(std::string name) {
        Sort s;
        s.kind_ = SortKind::Adt;
        s.name_ = std::move(name);
        return s;
    }

    [[nodiscard]] SortKind kind() const { return kind_; }
    [[nodiscard]] bool is_int() const { return kind_ == SortKind::Int; }
    [[nodiscard]] bool is_bool() const { return kind_ == SortKind::Bool; }
    [[nodiscard]] bool is_adt() const { return kind_ == SortKind::Adt; }
    /// ADT name; empty for Int and Bool.
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Sort&, const Sort&) = default;
    friend auto operator<=>(const Sort&, const Sort&) = default;

private:
    SortKind kind_ = SortKind::Int;
    std::string name_;
};

struct Field {
    std::string selector;
    Sort sort;
};

struct Constructor {
    std::string name;
    std::string owner;
    std::vector<Field> fields;

    [[nodiscard]] std::size_t arity() const { return fields.size(); }
    [[nodiscard]] Sort sort() const { return Sort::adt(owner); }
};

struct AdtDecl {
    std::string name;
    std::vector<Constructor> constructors;
};

/// A group of mutually recursive datatype declarations.
using AdtFamily = std::vector<AdtDecl>;

class AdtSignature {
public:
    struct SelectorRef {
        const Constructor* ctor;
        std::size_t field;
    };

    /// Throws SortError on duplicate sort/constructor/selector names or unknown field sorts.
    void add_family(AdtFamily family);

    [[nodiscard]] const std::vector<AdtFamily>& families() const { return families_; }
    [[nodiscard]] const AdtDecl* find_adt(std::string_view name) const;
    [[nodiscard]] const Constructor* find_constructor(std::string_view name) const;
    [[nodiscard]] std::optional<SelectorRef> find_selector(std::string_view name) const;
    /// Index of the family declaring the sort, or npos.
    [[nodiscard]] std::size_t family_of(std::string_view adt) const;
    /// ADT names in declaration order.
    [[nodiscard]] std::vector<std::string> adt_names() const;
    [[nodiscard]] bool empty() const { return families_.empty(); }

    friend bool operator==(const AdtSignature& a, const AdtSignature& b);

private:
    std::vector<AdtFamily> families_;
    std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> adts_;
    std::map<std::string, std::tuple<std::size_t, std::size_t, std::size_t>, std::less<>> ctors_;
    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> selectors_;
};

struct TermNode;
struct FormulaNode;
class Formula;

enum class TermKind { Var, Lit, Cons, Arith, Select, Cata, Ite };
enum class ArithOp { Add, Sub, Mul, Div, Mod };

/// Immutable, structurally shared term.
class Term {
public:
    Term();

    static Term var(std::string name, Sort sort);
    static Term lit(Integer value);
    static Term lit(long value) { return lit(Integer(value)); }
    static Term cons(std::string ctor, Sort adt, std::vector<Term> args = {});
    static Term arith(ArithOp op, Term lhs, Term rhs);
    static Term select(std::string selector, std::string ctor, std::size_t field, Sort result, Term arg);
    /// Application of component `component` of the catamorphism for `adt`.
    static Term cata(std::string adt, std::size_t component, Term arg);
    static Term ite(Formula cond, Term then_term, Term else_term);

    [[nodiscard]] TermKind kind() const;
    [[nodiscard]] const Sort& sort() const;
    /// Variable, constructor, selector or catamorphism-ADT name.
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const Integer& value() const;
    [[nodiscard]] ArithOp op() const;
    [[nodiscard]] const std::vector<Term>& args() const;
    /// Field index for Select, component index for Cata.
    [[nodiscard]] std::size_t index() const;
    /// Owning constructor for Select.
    [[nodiscard]] const std::string& ctor() const;
    [[nodiscard]] Formula cond() const;

    [[nodiscard]] bool is_var() const { return kind() == TermKind::Var; }
    [[nodiscard]] bool is_lit() const { return kind() == TermKind::Lit; }
    [[nodiscard]] bool is_cons() const { return kind() == TermKind::Cons; }
    [[nodiscard]] const TermNode* node() const { return node_.get(); }

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator<(const Term& a, const Term& b);

private:
    explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const TermNode> node_;
};

enum class FormulaKind { True, False, And, Or, Not, Cmp, Test, Exists, Forall };

/// Comparison predicates. `<` and `>=` are normalised to `>` and `<=` on construction.
enum class CmpOp { Eq, Ne, Gt, Le, EqAdt, NeAdt };

struct TypedVar {
    std::string name;
    Sort sort;

    friend bool operator==(const TypedVar&, const TypedVar&) = default;
    friend auto operator<=>(const TypedVar&, const TypedVar&) = default;
};

/// Immutable constraint formula. Clause bodies use the Not-free, quantifier-free fragment.
class Formula {
public:
    Formula();

    static Formula top();
    static Formula bottom();
    static Formula boolean(bool b) { return b ? top() : bottom(); }
    /// Flattening conjunction: drops `true`, absorbs `false`.
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    /// Raw negation node (extended form). See `negate` for negation normal form.
    static Formula negation(Formula f);
    static Formula cmp(CmpOp op, Term lhs, Term rhs);
    /// `=` choosing the int or ADT comparison from the operand sort.
    static Formula eq(Term lhs, Term rhs);
    static Formula ne(Term lhs, Term rhs);
    static Formula lt(Term lhs, Term rhs) { return cmp(CmpOp::Gt, std::move(rhs), std::move(lhs)); }
    static Formula ge(Term lhs, Term rhs) { return cmp(CmpOp::Le, std::move(rhs), std::move(lhs)); }
    static Formula gt(Term lhs, Term rhs) { return cmp(CmpOp::Gt, std::move(lhs), std::move(rhs)); }
    static Formula le(Term lhs, Term rhs) { return cmp(CmpOp::Le, std::move(lhs), std::move(rhs)); }
    static Formula test(std::string ctor, Term arg);
    static Formula exists(std::vector<TypedVar> vars, Formula body);
    static Formula forall(std::vector<TypedVar> vars, Formula body);

    [[nodiscard]] FormulaKind kind() const;
    [[nodiscard]] const std::vector<Formula>& children() const;
    [[nodiscard]] CmpOp op() const;
    [[nodiscard]] const Term& lhs() const;
    [[nodiscard]] const Term& rhs() const;
    /// Tester argument.
    [[nodiscard]] const Term& arg() const;
    /// Tester constructor.
    [[nodiscard]] const std::string& ctor() const;
    [[nodiscard]] const std::vector<TypedVar>& bound() const;
    [[nodiscard]] const Formula& body() const;

    [[nodiscard]] bool is_true() const { return kind() == FormulaKind::True; }
    [[nodiscard]] bool is_false() const { return kind() == FormulaKind::False; }
    [[nodiscard]] const FormulaNode* node() const { return node_.get(); }

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Formula& a, const Formula& b);

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
    friend class Term;
};

struct TermNode {
    TermKind kind = TermKind::Lit;
    Sort sort;
    std::string name;
    Integer value;
    ArithOp op = ArithOp::Add;
    std::size_t index = 0;
    std::string ctor;
    std::vector<Term> args;
    std::shared_ptr<const FormulaNode> cond;
};

struct FormulaNode {
    FormulaKind kind = FormulaKind::True;
    std::vector<Formula> children;
    CmpOp op = CmpOp::Eq;
    Term lhs;
    Term rhs;
    std::string ctor;
    std::vector<TypedVar> bound;
};

inline TermKind Term::kind() const { return node_->kind; }
inline const Sort& Term::sort() const { return node_->sort; }
inline const std::string& Term::name() const { return node_->name; }
inline const Integer& Term::value() const { return node_->value; }
inline ArithOp Term::op() const { return node_->op; }
inline const std::vector<Term>& Term::args() const { return node_->args; }
inline std::size_t Term::index() const { return node_->index; }
inline const std::string& Term::ctor() const { return node_->ctor; }

inline FormulaKind Formula::kind() const { return node_->kind; }
inline const std::vector<Formula>& Formula::children() const { return node_->children; }
inline CmpOp Formula::op() const { return node_->op; }
inline const Term& Formula::lhs() const { return node_->lhs; }
inline const Term& Formula::rhs() const { return node_->rhs; }
inline const Term& Formula::arg() const { return node_->lhs; }
inline const std::string& Formula::ctor() const { return node_->ctor; }
inline const std::vector<TypedVar>& Formula::bound() const { return node_->bound; }
inline const Formula& Formula::body() const { return node_->children.front(); }

/// Predicate application.
struct Atom {
    std::string pred;
    std::vector<Term> args;

    [[nodiscard]] std::string to_string() const;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// `forall vars. head <= constraint /\ body[0] /\ ...`; a missing head means `false`.
struct Clause {
    std::vector<TypedVar> vars;
    std::optional<Atom> head;
    Formula constraint;
    std::vector<Atom> body;

    [[nodiscard]] bool is_goal() const { return !head.has_value(); }
    [[nodiscard]] const Sort* var_sort(std::string_view name) const;
    [[nodiscard]] std::string to_string() const;
};

struct PredicateDecl {
    std::string name;
    std::vector<Sort> args;

    friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct ChcSystem {
    AdtSignature adts;
    std::vector<PredicateDecl> predicates;
    std::vector<Clause> clauses;
    std::string source;
    bool selectors_eliminated = false;
    bool diseq_encoded = false;
    bool augmented = false;

    [[nodiscard]] const PredicateDecl* find_predicate(std::string_view name) const;
    /// Adds or replaces a declaration, keeping declaration order.
    void declare_predicate(PredicateDecl decl);
};

using Subst = std::map<std::string, Term, std::less<>>;
using VarSet = std::map<std::string, Sort, std::less<>>;

Formula negate(const Formula& f);

[[nodiscard]] std::string to_string(CmpOp op);
[[nodiscard]] std::string to_string(ArithOp op);

} // namespace catalia
