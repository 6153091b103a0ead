#include "catalia/ast.hpp"

#include "catalia/error.hpp"
#include "catalia/sexpr.hpp"

#include <algorithm>

namespace catalia {

std::string Sort::to_string() const {
    switch (kind_) {
        case SortKind::Int: return "Int";
        case SortKind::Bool: return "Bool";
        case SortKind::Adt: return quote_symbol(name_);
    }
    return "?";
}

void AdtSignature::add_family(AdtFamily family) {
    const std::size_t fam = families_.size();
    for (std::size_t m = 0; m < family.size(); ++m) {
        const auto& decl = family[m];
        if (adts_.count(decl.name)) throw SortError("duplicate datatype '" + decl.name + "'");
        adts_[decl.name] = {fam, m};
    }
    for (std::size_t m = 0; m < family.size(); ++m) {
        auto& decl = family[m];
        if (decl.constructors.empty()) throw SortError("datatype '" + decl.name + "' has no constructors");
        for (std::size_t c = 0; c < decl.constructors.size(); ++c) {
            auto& ctor = decl.constructors[c];
            ctor.owner = decl.name;
            if (ctors_.count(ctor.name)) throw SortError("duplicate constructor '" + ctor.name + "'");
            ctors_[ctor.name] = {fam, m, c};
            for (std::size_t f = 0; f < ctor.fields.size(); ++f) {
                const auto& field = ctor.fields[f];
                if (field.sort.is_bool())
                    throw UnsupportedFeature("Bool-sorted datatype field '" + field.selector + "'");
                if (field.sort.is_adt() && !adts_.count(field.sort.name()))
                    throw SortError("unknown sort '" + field.sort.name() + "' in constructor '" + ctor.name + "'");
                if (selectors_.count(field.selector))
                    throw SortError("duplicate selector '" + field.selector + "'");
                selectors_[field.selector] = {ctor.name, f};
            }
        }
    }
    families_.push_back(std::move(family));
}

const AdtDecl* AdtSignature::find_adt(std::string_view name) const {
    auto it = adts_.find(name);
    if (it == adts_.end()) return nullptr;
    return &families_[it->second.first][it->second.second];
}

const Constructor* AdtSignature::find_constructor(std::string_view name) const {
    auto it = ctors_.find(name);
    if (it == ctors_.end()) return nullptr;
    auto [f, m, c] = it->second;
    return &families_[f][m].constructors[c];
}

std::optional<AdtSignature::SelectorRef> AdtSignature::find_selector(std::string_view name) const {
    auto it = selectors_.find(name);
    if (it == selectors_.end()) return std::nullopt;
    return SelectorRef{find_constructor(it->second.first), it->second.second};
}

std::size_t AdtSignature::family_of(std::string_view adt) const {
    auto it = adts_.find(adt);
    return it == adts_.end() ? static_cast<std::size_t>(-1) : it->second.first;
}

std::vector<std::string> AdtSignature::adt_names() const {
    std::vector<std::string> out;
    for (const auto& fam : families_)
        for (const auto& d : fam) out.push_back(d.name);
    return out;
}

bool operator==(const AdtSignature& a, const AdtSignature& b) {
    if (a.families_.size() != b.families_.size()) return false;
    for (std::size_t i = 0; i < a.families_.size(); ++i) {
        const auto& fa = a.families_[i];
        const auto& fb = b.families_[i];
        if (fa.size() != fb.size()) return false;
        for (std::size_t j = 0; j < fa.size(); ++j) {
            if (fa[j].name != fb[j].name || fa[j].constructors.size() != fb[j].constructors.size()) return false;
            for (std::size_t k = 0; k < fa[j].constructors.size(); ++k) {
                const auto& ca = fa[j].constructors[k];
                const auto& cb = fb[j].constructors[k];
                if (ca.name != cb.name || ca.fields.size() != cb.fields.size()) return false;
                for (std::size_t f = 0; f < ca.fields.size(); ++f)
                    if (ca.fields[f].selector != cb.fields[f].selector || ca.fields[f].sort != cb.fields[f].sort)
                        return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Terms

namespace {

std::shared_ptr<const TermNode> zero_node() {
    static const auto node = [] {
        auto n = std::make_shared<TermNode>();
        n->kind = TermKind::Lit;
        n->sort = Sort::integer();
        n->value = 0;
        return n;
    }();
    return node;
}

std::shared_ptr<const FormulaNode> constant_node(bool value) {
    static const auto t = [] {
        auto n = std::make_shared<FormulaNode>();
        n->kind = FormulaKind::True;
        return n;
    }();
    static const auto f = [] {
        auto n = std::make_shared<FormulaNode>();
        n->kind = FormulaKind::False;
        return n;
    }();
    return value ? t : f;
}

int compare_terms(const Term& a, const Term& b);
int compare_formulas(const Formula& a, const Formula& b);

template <typename T>
int cmp3(const T& x, const T& y) {
    return x < y ? -1 : (y < x ? 1 : 0);
}

int compare_terms(const Term& a, const Term& b) {
    if (a.node() == b.node()) return 0;
    if (int c = cmp3(static_cast<int>(a.kind()), static_cast<int>(b.kind()))) return c;
    if (int c = cmp3(a.sort(), b.sort())) return c;
    if (int c = cmp3(a.name(), b.name())) return c;
    if (int c = ::cmp(a.value(), b.value())) return c < 0 ? -1 : 1;
    if (int c = cmp3(static_cast<int>(a.op()), static_cast<int>(b.op()))) return c;
    if (int c = cmp3(a.index(), b.index())) return c;
    if (int c = cmp3(a.ctor(), b.ctor())) return c;
    if (int c = cmp3(a.args().size(), b.args().size())) return c;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (int c = compare_terms(a.args()[i], b.args()[i])) return c;
    if (a.kind() == TermKind::Ite) return compare_formulas(a.cond(), b.cond());
    return 0;
}

int compare_formulas(const Formula& a, const Formula& b) {
    if (a.node() == b.node()) return 0;
    if (int c = cmp3(static_cast<int>(a.kind()), static_cast<int>(b.kind()))) return c;
    switch (a.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return 0;
        case FormulaKind::Cmp:
            if (int c = cmp3(static_cast<int>(a.op()), static_cast<int>(b.op()))) return c;
            if (int c = compare_terms(a.lhs(), b.lhs())) return c;
            return compare_terms(a.rhs(), b.rhs());
        case FormulaKind::Test:
            if (int c = cmp3(a.ctor(), b.ctor())) return c;
            return compare_terms(a.arg(), b.arg());
        default: break;
    }
    if (int c = cmp3(a.bound(), b.bound())) return c;
    if (int c = cmp3(a.children().size(), b.children().size())) return c;
    for (std::size_t i = 0; i < a.children().size(); ++i)
        if (int c = compare_formulas(a.children()[i], b.children()[i])) return c;
    return 0;
}

} // namespace

Term::Term() : node_(zero_node()) {}

Term Term::var(std::string name, Sort sort) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Var;
    n->name = std::move(name);
    n->sort = std::move(sort);
    return Term(std::move(n));
}

Term Term::lit(Integer value) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Lit;
    n->sort = Sort::integer();
    n->value = std::move(value);
    return Term(std::move(n));
}

Term Term::cons(std::string ctor, Sort adt, std::vector<Term> args) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Cons;
    n->name = std::move(ctor);
    n->sort = std::move(adt);
    n->args = std::move(args);
    return Term(std::move(n));
}

Term Term::arith(ArithOp op, Term lhs, Term rhs) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Arith;
    n->op = op;
    n->sort = Sort::integer();
    n->args = {std::move(lhs), std::move(rhs)};
    return Term(std::move(n));
}

Term Term::select(std::string selector, std::string ctor, std::size_t field, Sort result, Term arg) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Select;
    n->name = std::move(selector);
    n->ctor = std::move(ctor);
    n->index = field;
    n->sort = std::move(result);
    n->args = {std::move(arg)};
    return Term(std::move(n));
}

Term Term::cata(std::string adt, std::size_t component, Term arg) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Cata;
    n->name = std::move(adt);
    n->index = component;
    n->sort = Sort::integer();
    n->args = {std::move(arg)};
    return Term(std::move(n));
}

Term Term::ite(Formula cond, Term then_term, Term else_term) {
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Ite;
    n->sort = then_term.sort();
    n->args = {std::move(then_term), std::move(else_term)};
    n->cond = cond.node_;
    return Term(std::move(n));
}

Formula Term::cond() const { return node_->cond ? Formula(node_->cond) : Formula(); }

bool operator==(const Term& a, const Term& b) { return compare_terms(a, b) == 0; }
bool operator<(const Term& a, const Term& b) { return compare_terms(a, b) < 0; }

std::string to_string(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "div";
        case ArithOp::Mod: return "mod";
    }
    return "?";
}

std::string to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "distinct";
        case CmpOp::Gt: return ">";
        case CmpOp::Le: return "<=";
        case CmpOp::EqAdt: return "=";
        case CmpOp::NeAdt: return "distinct";
    }
    return "?";
}

std::string Term::to_string() const {
    switch (kind()) {
        case TermKind::Var: return quote_symbol(name());
        case TermKind::Lit: return value() >= 0 ? value().get_str() : "(- " + Integer(-value()).get_str() + ")";
        case TermKind::Cons: {
            if (args().empty()) return quote_symbol(name());
            std::string s = "(" + quote_symbol(name());
            for (const auto& a : args()) s += " " + a.to_string();
            return s + ")";
        }
        case TermKind::Arith:
            return "(" + catalia::to_string(op()) + " " + args()[0].to_string() + " " + args()[1].to_string() + ")";
        case TermKind::Select: return "(" + quote_symbol(name()) + " " + args()[0].to_string() + ")";
        case TermKind::Cata:
            return "(" + quote_symbol("cata!" + name() + "!" + std::to_string(index())) + " " +
                   args()[0].to_string() + ")";
        case TermKind::Ite:
            return "(ite " + cond().to_string() + " " + args()[0].to_string() + " " + args()[1].to_string() + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Formulas

Formula::Formula() : node_(constant_node(true)) {}

Formula Formula::top() { return Formula(constant_node(true)); }
Formula Formula::bottom() { return Formula(constant_node(false)); }

Formula Formula::conj(std::vector<Formula> parts) {
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.is_true()) continue;
        if (p.is_false()) return bottom();
        if (p.kind() == FormulaKind::And) {
            for (const auto& c : p.children()) flat.push_back(c);
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) return top();
    if (flat.size() == 1) return flat.front();
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::And;
    n->children = std::move(flat);
    return Formula(std::move(n));
}

Formula Formula::disj(std::vector<Formula> parts) {
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.is_false()) continue;
        if (p.is_true()) return top();
        if (p.kind() == FormulaKind::Or) {
            for (const auto& c : p.children()) flat.push_back(c);
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) return bottom();
    if (flat.size() == 1) return flat.front();
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Or;
    n->children = std::move(flat);
    return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
    if (f.is_true()) return bottom();
    if (f.is_false()) return top();
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Not;
    n->children = {std::move(f)};
    return Formula(std::move(n));
}

Formula Formula::cmp(CmpOp op, Term lhs, Term rhs) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Cmp;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Formula(std::move(n));
}

Formula Formula::eq(Term lhs, Term rhs) {
    const bool adt = lhs.sort().is_adt();
    return cmp(adt ? CmpOp::EqAdt : CmpOp::Eq, std::move(lhs), std::move(rhs));
}

Formula Formula::ne(Term lhs, Term rhs) {
    const bool adt = lhs.sort().is_adt();
    return cmp(adt ? CmpOp::NeAdt : CmpOp::Ne, std::move(lhs), std::move(rhs));
}

Formula Formula::test(std::string ctor, Term arg) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Test;
    n->ctor = std::move(ctor);
    n->lhs = std::move(arg);
    return Formula(std::move(n));
}

Formula Formula::exists(std::vector<TypedVar> vars, Formula body) {
    if (vars.empty()) return body;
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Exists;
    n->bound = std::move(vars);
    n->children = {std::move(body)};
    return Formula(std::move(n));
}

Formula Formula::forall(std::vector<TypedVar> vars, Formula body) {
    if (vars.empty()) return body;
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Forall;
    n->bound = std::move(vars);
    n->children = {std::move(body)};
    return Formula(std::move(n));
}

bool operator==(const Formula& a, const Formula& b) { return compare_formulas(a, b) == 0; }

namespace {

std::string print_bound(const std::vector<TypedVar>& vars) {
    std::string s = "(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) s += ' ';
        s += "(" + quote_symbol(vars[i].name) + " " + vars[i].sort.to_string() + ")";
    }
    return s + ")";
}

std::string join_children(const char* head, const std::vector<Formula>& kids) {
    std::string s = std::string("(") + head;
    for (const auto& k : kids) s += " " + k.to_string();
    return s + ")";
}

} // namespace

std::string Formula::to_string() const {
    switch (kind()) {
        case FormulaKind::True: return "true";
        case FormulaKind::False: return "false";
        case FormulaKind::And: return join_children("and", children());
        case FormulaKind::Or: return join_children("or", children());
        case FormulaKind::Not: return "(not " + body().to_string() + ")";
        case FormulaKind::Cmp:
            switch (op()) {
                case CmpOp::Eq:
                case CmpOp::EqAdt: return "(= " + lhs().to_string() + " " + rhs().to_string() + ")";
                case CmpOp::Ne:
                case CmpOp::NeAdt: return "(not (= " + lhs().to_string() + " " + rhs().to_string() + "))";
                case CmpOp::Gt: return "(> " + lhs().to_string() + " " + rhs().to_string() + ")";
                case CmpOp::Le: return "(<= " + lhs().to_string() + " " + rhs().to_string() + ")";
            }
            break;
        case FormulaKind::Test: return "((_ is " + quote_symbol(ctor()) + ") " + arg().to_string() + ")";
        case FormulaKind::Exists: return "(exists " + print_bound(bound()) + " " + body().to_string() + ")";
        case FormulaKind::Forall: return "(forall " + print_bound(bound()) + " " + body().to_string() + ")";
    }
    return "?";
}

Formula negate(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True: return Formula::bottom();
        case FormulaKind::False: return Formula::top();
        case FormulaKind::And: {
            std::vector<Formula> parts;
            for (const auto& c : f.children()) parts.push_back(negate(c));
            return Formula::disj(std::move(parts));
        }
        case FormulaKind::Or: {
            std::vector<Formula> parts;
            for (const auto& c : f.children()) parts.push_back(negate(c));
            return Formula::conj(std::move(parts));
        }
        case FormulaKind::Not: return f.body();
        case FormulaKind::Cmp:
            switch (f.op()) {
                case CmpOp::Eq: return Formula::cmp(CmpOp::Ne, f.lhs(), f.rhs());
                case CmpOp::Ne: return Formula::cmp(CmpOp::Eq, f.lhs(), f.rhs());
                case CmpOp::Gt: return Formula::cmp(CmpOp::Le, f.lhs(), f.rhs());
                case CmpOp::Le: return Formula::cmp(CmpOp::Gt, f.lhs(), f.rhs());
                case CmpOp::EqAdt: return Formula::cmp(CmpOp::NeAdt, f.lhs(), f.rhs());
                case CmpOp::NeAdt: return Formula::cmp(CmpOp::EqAdt, f.lhs(), f.rhs());
            }
            break;
        case FormulaKind::Test: return Formula::negation(f);
        case FormulaKind::Exists: return Formula::forall(f.bound(), negate(f.body()));
        case FormulaKind::Forall: return Formula::exists(f.bound(), negate(f.body()));
    }
    return Formula::negation(f);
}

// ---------------------------------------------------------------------------
// Clauses and systems

std::string Atom::to_string() const {
    if (args.empty()) return quote_symbol(pred);
    std::string s = "(" + quote_symbol(pred);
    for (const auto& a : args) s += " " + a.to_string();
    return s + ")";
}

const Sort* Clause::var_sort(std::string_view name) const {
    for (const auto& v : vars)
        if (v.name == name) return &v.sort;
    return nullptr;
}

std::string Clause::to_string() const {
    std::vector<std::string> parts;
    if (!constraint.is_true()) parts.push_back(constraint.to_string());
    for (const auto& a : body) parts.push_back(a.to_string());
    std::string b;
    if (parts.empty()) {
        b = "true";
    } else if (parts.size() == 1) {
        b = parts.front();
    } else {
        b = "(and";
        for (const auto& p : parts) b += " " + p;
        b += ")";
    }
    std::string h = head ? head->to_string() : "false";
    std::string imp = b == "true" ? h : "(=> " + b + " " + h + ")";
    if (vars.empty()) return imp;
    return "(forall " + print_bound(vars) + " " + imp + ")";
}

const PredicateDecl* ChcSystem::find_predicate(std::string_view name) const {
    for (const auto& p : predicates)
        if (p.name == name) return &p;
    return nullptr;
}

void ChcSystem::declare_predicate(PredicateDecl decl) {
    for (auto& p : predicates) {
        if (p.name == decl.name) {
            p = std::move(decl);
            return;
        }
    }
    predicates.push_back(std::move(decl));
}

} // namespace catalia
