#include "catalia/smtlib.hpp"

#include "catalia/error.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/term_ops.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace catalia {

namespace {

constexpr std::size_t kMaxDisjuncts = 4096;

// Boolean structure of an assertion before it is cut into clauses.
struct BNode;
using BPtr = std::shared_ptr<const BNode>;

struct BNode {
    enum class K { Constraint, Atom, And, Or, Not, Implies, Exists, Forall };
    K k = K::Constraint;
    Formula f;
    Atom atom;
    std::vector<BPtr> kids;
    std::vector<TypedVar> vars;
};

BPtr mk_constraint(Formula f) {
    auto n = std::make_shared<BNode>();
    n->f = std::move(f);
    return n;
}

BPtr mk_node(BNode::K k, std::vector<BPtr> kids, std::vector<TypedVar> vars = {}) {
    auto n = std::make_shared<BNode>();
    n->k = k;
    n->kids = std::move(kids);
    n->vars = std::move(vars);
    return n;
}

BPtr mk_atom(Atom a) {
    auto n = std::make_shared<BNode>();
    n->k = BNode::K::Atom;
    n->atom = std::move(a);
    return n;
}

bool is_pure(const BPtr& b) { return b->k == BNode::K::Constraint; }

bool has_atoms(const BPtr& b) {
    if (b->k == BNode::K::Atom) return true;
    for (const auto& k : b->kids)
        if (has_atoms(k)) return true;
    return false;
}

struct Disjunct {
    std::vector<Formula> lits;
    std::vector<Atom> atoms;
};
using Dnf = std::vector<Disjunct>;

Dnf product(const Dnf& a, const Dnf& b) {
    if (a.size() * b.size() > kMaxDisjuncts) throw UnsupportedFeature("clause body too large after disjunctive splitting");
    Dnf out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) {
            Disjunct d = x;
            d.lits.insert(d.lits.end(), y.lits.begin(), y.lits.end());
            d.atoms.insert(d.atoms.end(), y.atoms.begin(), y.atoms.end());
            out.push_back(std::move(d));
        }
    return out;
}

void append(Dnf& a, Dnf b) {
    if (a.size() + b.size() > kMaxDisjuncts) throw UnsupportedFeature("clause body too large after disjunctive splitting");
    for (auto& d : b) a.push_back(std::move(d));
}

std::optional<Term> find_ite(const Formula& f);

std::optional<Term> find_ite(const Term& t) {
    for (const auto& a : t.args())
        if (auto r = find_ite(a)) return r;
    if (t.kind() == TermKind::Ite) return t;
    return std::nullopt;
}

std::optional<Term> find_ite(const Formula& f) {
    if (f.kind() == FormulaKind::Cmp) {
        if (auto r = find_ite(f.lhs())) return r;
        return find_ite(f.rhs());
    }
    if (f.kind() == FormulaKind::Test) return find_ite(f.arg());
    for (const auto& c : f.children())
        if (auto r = find_ite(c)) return r;
    return std::nullopt;
}

Formula replace_term(const Formula& f, const Term& from, const Term& to);

Term replace_term(const Term& t, const Term& from, const Term& to) {
    if (t == from) return to;
    switch (t.kind()) {
        case TermKind::Var:
        case TermKind::Lit: return t;
        case TermKind::Cons: {
            std::vector<Term> args;
            for (const auto& a : t.args()) args.push_back(replace_term(a, from, to));
            return Term::cons(t.name(), t.sort(), std::move(args));
        }
        case TermKind::Arith:
            return Term::arith(t.op(), replace_term(t.args()[0], from, to), replace_term(t.args()[1], from, to));
        case TermKind::Select:
            return Term::select(t.name(), t.ctor(), t.index(), t.sort(), replace_term(t.args()[0], from, to));
        case TermKind::Cata: return Term::cata(t.name(), t.index(), replace_term(t.args()[0], from, to));
        case TermKind::Ite:
            return Term::ite(replace_term(t.cond(), from, to), replace_term(t.args()[0], from, to),
                             replace_term(t.args()[1], from, to));
    }
    return t;
}

Formula replace_term(const Formula& f, const Term& from, const Term& to) {
    switch (f.kind()) {
        case FormulaKind::Cmp:
            return Formula::cmp(f.op(), replace_term(f.lhs(), from, to), replace_term(f.rhs(), from, to));
        case FormulaKind::Test: return Formula::test(f.ctor(), replace_term(f.arg(), from, to));
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(replace_term(c, from, to));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Not: return Formula::negation(replace_term(f.body(), from, to));
        default: return f;
    }
}

Atom replace_term(const Atom& a, const Term& from, const Term& to) {
    Atom out{a.pred, {}};
    for (const auto& t : a.args) out.args.push_back(replace_term(t, from, to));
    return out;
}

class Parser {
public:
    explicit Parser(std::string source) { sys_.source = std::move(source); }
    explicit Parser(const AdtSignature& adts) { sys_.adts = adts; }

    Formula formula_in_scope(const SExpr& e, const std::vector<TypedVar>& scope) {
        bind(scope);
        BPtr b = as_bool(e);
        if (!is_pure(b)) throw UnsupportedFeature("quantifier or predicate application in " + e.to_string());
        return b->f;
    }

    Term term_in_scope(const SExpr& e, const std::vector<TypedVar>& scope) {
        bind(scope);
        return as_term(e);
    }

    ChcSystem run(std::string_view text) {
        for (const auto& cmd : parse_sexprs(text)) command(cmd);
        check_sorts(sys_);
        return std::move(sys_);
    }

private:
    struct Binding {
        std::string name;
        std::optional<Term> term;
        BPtr boolean;
    };

    // Elaborated expression: either a term or a boolean structure.
    struct Value {
        std::optional<Term> term;
        BPtr boolean;
    };

    ChcSystem sys_;
    std::vector<Binding> scope_;

    void bind(const std::vector<TypedVar>& scope) {
        for (const auto& v : scope) {
            names_.reserve(v.name);
            scope_.push_back(Binding{v.name, Term::var(v.name, v.sort), nullptr});
        }
    }

    NameSupply names_;
    std::vector<TypedVar> binders_;

    [[noreturn]] static void fail(const SExpr& e, const std::string& msg) { throw ParseError(msg, e.line, e.column); }

    static const std::string& symbol(const SExpr& e, const char* what) {
        if (!e.is_symbol()) fail(e, std::string("expected ") + what);
        return e.text;
    }

    // ------------------------------------------------------------------ commands

    void command(const SExpr& cmd) {
        if (!cmd.is_list() || cmd.items.empty() || !cmd[0].is_symbol()) fail(cmd, "expected a command");
        const std::string& head = cmd[0].text;
        if (head == "set-logic" || head == "set-info" || head == "set-option" || head == "check-sat" ||
            head == "exit" || head == "get-model" || head == "get-info" || head == "get-proof")
            return;
        if (head == "declare-datatypes") return declare_datatypes(cmd);
        if (head == "declare-datatype") {
            if (cmd.size() != 3) fail(cmd, "malformed declare-datatype");
            std::string name = symbol(cmd[1], "datatype name");
            AdtFamily fam{AdtDecl{name, {}}};
            pending_adts_ = {name};
            fam[0].constructors = constructors(cmd[2]);
            sys_.adts.add_family(std::move(fam));
            pending_adts_.clear();
            return;
        }
        if (head == "declare-fun") return declare_fun(cmd);
        if (head == "assert") {
            if (cmd.size() != 2) fail(cmd, "malformed assert");
            return assertion(cmd[1]);
        }
        if (head == "declare-sort" || head == "define-sort")
            throw UnsupportedFeature("uninterpreted sorts are not supported");
        if (head == "declare-const") throw UnsupportedFeature("declare-const is not supported");
        if (head == "define-fun" || head == "define-fun-rec" || head == "define-funs-rec")
            throw UnsupportedFeature("function definitions are not supported");
        if (head == "push" || head == "pop" || head == "get-value" || head == "check-sat-assuming")
            throw UnsupportedFeature("'" + head + "' is not supported");
        fail(cmd, "unknown command '" + head + "'");
    }

    std::vector<std::string> pending_adts_;

    Sort sort(const SExpr& e) {
        if (e.is_symbol()) {
            if (e.text == "Int") return Sort::integer();
            if (e.text == "Bool") return Sort::boolean();
            if (e.text == "Real" || e.text == "String" || e.text == "RegLan")
                throw UnsupportedFeature("sort " + e.text + " is not supported");
            if (sys_.adts.find_adt(e.text)) return Sort::adt(e.text);
            for (const auto& p : pending_adts_)
                if (p == e.text) return Sort::adt(e.text);
            throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": unknown sort '" + e.text +
                            "'");
        }
        if (e.is_app("Array")) throw UnsupportedFeature("arrays are not supported");
        if (e.is_app("_") && e.size() >= 2 && e[1].is_symbol("BitVec"))
            throw UnsupportedFeature("bitvectors are not supported");
        if (e.is_app("_") && e.size() >= 2 && e[1].is_symbol("FloatingPoint"))
            throw UnsupportedFeature("floating point is not supported");
        throw UnsupportedFeature("parametric sort " + e.to_string() + " is not supported");
    }

    std::vector<Constructor> constructors(const SExpr& list) {
        if (!list.is_list()) fail(list, "expected constructor list");
        if (list.is_app("par")) throw UnsupportedFeature("parametric datatypes are not supported");
        std::vector<Constructor> out;
        for (const auto& c : list.items) out.push_back(constructor(c));
        return out;
    }

    Constructor constructor(const SExpr& c) {
        Constructor ctor;
        if (c.is_symbol()) {
            ctor.name = c.text;
            return ctor;
        }
        if (!c.is_list() || c.items.empty()) fail(c, "expected constructor declaration");
        ctor.name = symbol(c[0], "constructor name");
        for (std::size_t i = 1; i < c.size(); ++i) {
            const SExpr& f = c[i];
            if (!f.is_list() || f.size() != 2) fail(f, "expected (selector sort)");
            Sort s = sort(f[1]);
            if (s.is_bool()) throw UnsupportedFeature("Bool-sorted datatype field '" + f[0].text + "'");
            ctor.fields.push_back(Field{symbol(f[0], "selector name"), s});
        }
        return ctor;
    }

    void declare_datatypes(const SExpr& cmd) {
        if (cmd.size() != 3) fail(cmd, "malformed declare-datatypes");
        AdtFamily fam;
        if (cmd[1].is_list() && cmd[1].items.empty()) {
            // Legacy form: (declare-datatypes () ((name ctor...) ...))
            if (!cmd[2].is_list()) fail(cmd[2], "expected datatype list");
            for (const auto& d : cmd[2].items) {
                if (!d.is_list() || d.items.empty()) fail(d, "expected datatype declaration");
                pending_adts_.push_back(symbol(d[0], "datatype name"));
            }
            for (const auto& d : cmd[2].items) {
                AdtDecl decl{d[0].text, {}};
                for (std::size_t i = 1; i < d.size(); ++i) decl.constructors.push_back(constructor(d[i]));
                fam.push_back(std::move(decl));
            }
        } else {
            if (!cmd[1].is_list() || !cmd[2].is_list() || cmd[1].size() != cmd[2].size())
                fail(cmd, "malformed declare-datatypes");
            for (const auto& d : cmd[1].items) {
                if (d.is_list() && d.size() == 2 && d[1].is_numeral()) {
                    if (d[1].text != "0") throw UnsupportedFeature("parametric datatypes are not supported");
                    pending_adts_.push_back(symbol(d[0], "datatype name"));
                } else if (d.is_symbol()) {
                    pending_adts_.push_back(d.text);
                } else {
                    fail(d, "expected (name arity)");
                }
            }
            for (std::size_t i = 0; i < cmd[2].size(); ++i)
                fam.push_back(AdtDecl{pending_adts_[i], constructors(cmd[2][i])});
        }
        pending_adts_.clear();
        sys_.adts.add_family(std::move(fam));
    }

    void declare_fun(const SExpr& cmd) {
        if (cmd.size() != 4 || !cmd[2].is_list()) fail(cmd, "malformed declare-fun");
        const std::string& name = symbol(cmd[1], "function name");
        if (sort(cmd[3]) != Sort::boolean())
            throw UnsupportedFeature("uninterpreted function '" + name + "' with non-Bool codomain");
        PredicateDecl decl{name, {}};
        for (const auto& s : cmd[2].items) {
            Sort srt = sort(s);
            if (srt.is_bool()) throw UnsupportedFeature("Bool-sorted argument of predicate '" + name + "'");
            decl.args.push_back(srt);
        }
        if (sys_.find_predicate(name)) fail(cmd[1], "predicate '" + name + "' declared twice");
        sys_.declare_predicate(std::move(decl));
    }

    // ------------------------------------------------------------------ expressions

    const Binding* lookup(std::string_view name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    Term as_term(const SExpr& e) {
        Value v = elab(e);
        if (!v.term) fail(e, "expected a term, got a Boolean expression");
        return *v.term;
    }

    Term as_int(const SExpr& e) {
        Term t = as_term(e);
        if (!t.sort().is_int())
            throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": expected Int, got " +
                            t.sort().to_string());
        return t;
    }

    BPtr as_bool(const SExpr& e) {
        Value v = elab(e);
        if (!v.boolean) fail(e, "expected a Boolean expression");
        return v.boolean;
    }

    static Value term_value(Term t) { return Value{std::move(t), nullptr}; }
    static Value bool_value(BPtr b) { return Value{std::nullopt, std::move(b)}; }

    Value elab(const SExpr& e) {
        switch (e.kind) {
            case SExpr::Kind::Numeral: return term_value(Term::lit(Integer(e.text)));
            case SExpr::Kind::Decimal: throw UnsupportedFeature("real literals are not supported");
            case SExpr::Kind::String: throw UnsupportedFeature("string literals are not supported");
            case SExpr::Kind::Keyword: fail(e, "unexpected keyword");
            case SExpr::Kind::Symbol: return elab_symbol(e);
            case SExpr::Kind::List: break;
        }
        if (e.items.empty()) fail(e, "empty application");
        const SExpr& head = e[0];
        if (head.is_list()) {
            if (head.is_app("_") && head.size() == 3 && head[1].is_symbol("is")) {
                if (e.size() != 2) fail(e, "tester expects one argument");
                return tester(e, head[2].text, e[1]);
            }
            if (head.is_app("as") && head.size() == 3) return apply(e, symbol(head[1], "constructor"));
            fail(head, "unsupported indexed function");
        }
        return apply(e, symbol(head, "function symbol"));
    }

    Value elab_symbol(const SExpr& e) {
        if (const Binding* b = lookup(e.text)) return Value{b->term, b->boolean};
        if (e.text == "true") return bool_value(mk_constraint(Formula::top()));
        if (e.text == "false") return bool_value(mk_constraint(Formula::bottom()));
        if (const Constructor* c = sys_.adts.find_constructor(e.text)) {
            if (c->arity() != 0) fail(e, "constructor '" + e.text + "' expects arguments");
            return term_value(Term::cons(c->name, c->sort()));
        }
        if (const PredicateDecl* p = sys_.find_predicate(e.text)) {
            if (!p->args.empty()) fail(e, "predicate '" + e.text + "' expects arguments");
            return bool_value(mk_atom(Atom{p->name, {}}));
        }
        fail(e, "unknown identifier '" + e.text + "'");
    }

    Value tester(const SExpr& e, const std::string& ctor, const SExpr& arg) {
        const Constructor* c = sys_.adts.find_constructor(ctor);
        if (!c) fail(e, "unknown constructor '" + ctor + "' in tester");
        Term t = as_term(arg);
        if (t.sort() != c->sort())
            throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": tester for '" + ctor +
                            "' applied to " + t.sort().to_string());
        return bool_value(mk_constraint(Formula::test(c->name, t)));
    }

    Value quantifier(const SExpr& e, bool universal) {
        if (e.size() != 3 || !e[1].is_list()) fail(e, "malformed quantifier");
        std::vector<TypedVar> vars;
        const std::size_t mark = scope_.size();
        for (const auto& b : e[1].items) {
            if (!b.is_list() || b.size() != 2) fail(b, "expected (name sort)");
            const std::string& name = symbol(b[0], "variable name");
            Sort s = sort(b[1]);
            if (s.is_bool()) throw UnsupportedFeature("Bool-sorted variable '" + name + "'");
            TypedVar v{names_.fresh(name), s};
            vars.push_back(v);
            binders_.push_back(v);
            scope_.push_back(Binding{name, Term::var(v.name, v.sort), nullptr});
        }
        BPtr body = as_bool(e[2]);
        scope_.resize(mark);
        return bool_value(mk_node(universal ? BNode::K::Forall : BNode::K::Exists, {body}, std::move(vars)));
    }

    Value let(const SExpr& e) {
        if (e.size() != 3 || !e[1].is_list()) fail(e, "malformed let");
        std::vector<Binding> bound;
        for (const auto& b : e[1].items) {
            if (!b.is_list() || b.size() != 2) fail(b, "expected (name expr)");
            Value v = elab(b[1]);
            bound.push_back(Binding{symbol(b[0], "variable name"), v.term, v.boolean});
        }
        const std::size_t mark = scope_.size();
        for (auto& b : bound) scope_.push_back(std::move(b));
        Value out = elab(e[2]);
        scope_.resize(mark);
        return out;
    }

    Value connective(const SExpr& e, BNode::K k) {
        std::vector<BPtr> kids;
        bool pure = true;
        for (std::size_t i = 1; i < e.size(); ++i) {
            kids.push_back(as_bool(e[i]));
            pure = pure && is_pure(kids.back());
        }
        if (pure) {
            std::vector<Formula> fs;
            for (const auto& k2 : kids) fs.push_back(k2->f);
            return bool_value(mk_constraint(k == BNode::K::And ? Formula::conj(std::move(fs))
                                                                : Formula::disj(std::move(fs))));
        }
        return bool_value(mk_node(k, std::move(kids)));
    }

    static BPtr implies(BPtr a, BPtr b) {
        if (is_pure(a) && is_pure(b)) return mk_constraint(Formula::disj({negate(a->f), b->f}));
        return mk_node(BNode::K::Implies, {std::move(a), std::move(b)});
    }

    static BPtr negation(BPtr a) {
        if (is_pure(a)) return mk_constraint(negate(a->f));
        return mk_node(BNode::K::Not, {std::move(a)});
    }

    static BPtr conjunction(std::vector<BPtr> kids) {
        bool pure = true;
        for (const auto& k : kids) pure = pure && is_pure(k);
        if (!pure) return mk_node(BNode::K::And, std::move(kids));
        std::vector<Formula> fs;
        for (const auto& k : kids) fs.push_back(k->f);
        return mk_constraint(Formula::conj(std::move(fs)));
    }

    void check_same_sort(const SExpr& e, const Term& a, const Term& b) {
        if (a.sort() != b.sort())
            throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": operands of sorts " +
                            a.sort().to_string() + " and " + b.sort().to_string() + " in " + e.to_string());
    }

    Value equality(const SExpr& e, bool distinct) {
        if (e.size() < 3) fail(e, "equality needs at least two arguments");
        std::vector<Value> vals;
        for (std::size_t i = 1; i < e.size(); ++i) vals.push_back(elab(e[i]));
        const bool boolean = vals[0].boolean != nullptr;
        for (const auto& v : vals)
            if ((v.boolean != nullptr) != boolean)
                throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) +
                                ": mixing Bool and non-Bool operands in " + e.to_string());
        std::vector<Formula> parts;
        if (boolean) {
            for (const auto& v : vals)
                if (!is_pure(v.boolean))
                    throw UnsupportedFeature("equality between predicate applications is not supported");
            auto iff = [](const Formula& a, const Formula& b) {
                return Formula::disj({Formula::conj({a, b}), Formula::conj({negate(a), negate(b)})});
            };
            if (distinct) {
                if (vals.size() != 2) throw UnsupportedFeature("distinct over more than two Bool operands");
                parts.push_back(negate(iff(vals[0].boolean->f, vals[1].boolean->f)));
            } else {
                for (std::size_t i = 0; i + 1 < vals.size(); ++i)
                    parts.push_back(iff(vals[i].boolean->f, vals[i + 1].boolean->f));
            }
            return bool_value(mk_constraint(Formula::conj(std::move(parts))));
        }
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) check_same_sort(e, *vals[i].term, *vals[i + 1].term);
        if (distinct) {
            for (std::size_t i = 0; i < vals.size(); ++i)
                for (std::size_t j = i + 1; j < vals.size(); ++j)
                    parts.push_back(Formula::ne(*vals[i].term, *vals[j].term));
        } else {
            for (std::size_t i = 0; i + 1 < vals.size(); ++i)
                parts.push_back(Formula::eq(*vals[i].term, *vals[i + 1].term));
        }
        return bool_value(mk_constraint(Formula::conj(std::move(parts))));
    }

    Value comparison(const SExpr& e, const std::string& op) {
        if (e.size() < 3) fail(e, "comparison needs at least two arguments");
        std::vector<Term> ts;
        for (std::size_t i = 1; i < e.size(); ++i) ts.push_back(as_int(e[i]));
        std::vector<Formula> parts;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const Term& a = ts[i];
            const Term& b = ts[i + 1];
            if (op == "<") parts.push_back(Formula::lt(a, b));
            else if (op == "<=") parts.push_back(Formula::le(a, b));
            else if (op == ">") parts.push_back(Formula::gt(a, b));
            else parts.push_back(Formula::ge(a, b));
        }
        return bool_value(mk_constraint(Formula::conj(std::move(parts))));
    }

    Value arithmetic(const SExpr& e, const std::string& op) {
        if (e.size() < 2) fail(e, "arithmetic needs arguments");
        std::vector<Term> ts;
        for (std::size_t i = 1; i < e.size(); ++i) ts.push_back(as_int(e[i]));
        if (op == "-" && ts.size() == 1) {
            if (ts[0].is_lit()) return term_value(Term::lit(Integer(-ts[0].value())));
            return term_value(Term::arith(ArithOp::Sub, Term::lit(0), ts[0]));
        }
        if (op == "abs") {
            if (ts.size() != 1) fail(e, "abs expects one argument");
            return term_value(Term::ite(Formula::ge(ts[0], Term::lit(0)), ts[0],
                                        Term::arith(ArithOp::Sub, Term::lit(0), ts[0])));
        }
        ArithOp aop = op == "+"     ? ArithOp::Add
                      : op == "-"   ? ArithOp::Sub
                      : op == "*"   ? ArithOp::Mul
                      : op == "div" ? ArithOp::Div
                                    : ArithOp::Mod;
        if ((aop == ArithOp::Div || aop == ArithOp::Mod) && ts.size() != 2) fail(e, op + " expects two arguments");
        if (ts.size() == 1) return term_value(ts[0]);
        Term acc = ts[0];
        for (std::size_t i = 1; i < ts.size(); ++i) acc = Term::arith(aop, acc, ts[i]);
        return term_value(acc);
    }

    Value ite(const SExpr& e) {
        if (e.size() != 4) fail(e, "ite expects three arguments");
        BPtr c = as_bool(e[1]);
        Value a = elab(e[2]);
        Value b = elab(e[3]);
        if (a.term && b.term) {
            check_same_sort(e, *a.term, *b.term);
            if (!is_pure(c)) throw UnsupportedFeature("predicate application inside an ite condition");
            return term_value(Term::ite(c->f, *a.term, *b.term));
        }
        if (!a.boolean || !b.boolean) throw SortError("ite branches have different sorts: " + e.to_string());
        if (is_pure(c) && is_pure(a.boolean) && is_pure(b.boolean))
            return bool_value(mk_constraint(Formula::disj(
                {Formula::conj({c->f, a.boolean->f}), Formula::conj({negate(c->f), b.boolean->f})})));
        return bool_value(conjunction({implies(c, a.boolean), implies(negation(c), b.boolean)}));
    }

    Value apply(const SExpr& e, const std::string& f) {
        if (f == "let") return let(e);
        if (f == "forall") return quantifier(e, true);
        if (f == "exists") return quantifier(e, false);
        if (f == "!") {
            if (e.size() < 2) fail(e, "malformed annotation");
            return elab(e[1]);
        }
        if (f == "and") return connective(e, BNode::K::And);
        if (f == "or") return connective(e, BNode::K::Or);
        if (f == "not") {
            if (e.size() != 2) fail(e, "not expects one argument");
            return bool_value(negation(as_bool(e[1])));
        }
        if (f == "=>") {
            if (e.size() < 3) fail(e, "=> expects at least two arguments");
            BPtr acc = as_bool(e[e.size() - 1]);
            for (std::size_t i = e.size() - 1; i-- > 1;) acc = implies(as_bool(e[i]), acc);
            return bool_value(acc);
        }
        if (f == "xor") throw UnsupportedFeature("xor is not supported");
        if (f == "ite") return ite(e);
        if (f == "=") return equality(e, false);
        if (f == "distinct") return equality(e, true);
        if (f == "<" || f == "<=" || f == ">" || f == ">=") return comparison(e, f);
        if (f == "+" || f == "-" || f == "*" || f == "div" || f == "mod" || f == "abs") return arithmetic(e, f);
        if (f.rfind("is-", 0) == 0 && !lookup(f) && sys_.adts.find_constructor(f.substr(3))) {
            if (e.size() != 2) fail(e, "tester expects one argument");
            return tester(e, f.substr(3), e[1]);
        }
        if (const Constructor* c = sys_.adts.find_constructor(f)) {
            if (e.size() - 1 != c->arity())
                throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": constructor '" + f +
                                "' expects " + std::to_string(c->arity()) + " arguments");
            std::vector<Term> args;
            for (std::size_t i = 1; i < e.size(); ++i) {
                Term t = as_term(e[i]);
                if (t.sort() != c->fields[i - 1].sort)
                    throw SortError(std::to_string(e[i].line) + ":" + std::to_string(e[i].column) + ": argument " +
                                    std::to_string(i - 1) + " of '" + f + "' must be " +
                                    c->fields[i - 1].sort.to_string() + ", got " + t.sort().to_string());
                args.push_back(std::move(t));
            }
            return term_value(Term::cons(c->name, c->sort(), std::move(args)));
        }
        if (auto sel = sys_.adts.find_selector(f)) {
            if (e.size() != 2) fail(e, "selector expects one argument");
            Term t = as_term(e[1]);
            if (t.sort() != sel->ctor->sort())
                throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": selector '" + f +
                                "' applied to " + t.sort().to_string());
            return term_value(
                Term::select(f, sel->ctor->name, sel->field, sel->ctor->fields[sel->field].sort, std::move(t)));
        }
        if (const PredicateDecl* p = sys_.find_predicate(f)) {
            if (e.size() - 1 != p->args.size())
                throw SortError(std::to_string(e.line) + ":" + std::to_string(e.column) + ": predicate '" + f +
                                "' expects " + std::to_string(p->args.size()) + " arguments");
            Atom a{p->name, {}};
            for (std::size_t i = 1; i < e.size(); ++i) {
                Term t = as_term(e[i]);
                if (t.sort() != p->args[i - 1])
                    throw SortError(std::to_string(e[i].line) + ":" + std::to_string(e[i].column) + ": argument " +
                                    std::to_string(i - 1) + " of '" + f + "' must be " +
                                    p->args[i - 1].to_string() + ", got " + t.sort().to_string());
                a.args.push_back(std::move(t));
            }
            return bool_value(mk_atom(std::move(a)));
        }
        if (f == "select" || f == "store") throw UnsupportedFeature("arrays are not supported");
        fail(e[0], "unknown function '" + f + "'");
    }

    // ------------------------------------------------------------------ clause extraction

    Dnf dnf_formula(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True: return Dnf{Disjunct{}};
            case FormulaKind::False: return {};
            case FormulaKind::Cmp:
            case FormulaKind::Test: return Dnf{Disjunct{{f}, {}}};
            case FormulaKind::And: {
                Dnf acc{Disjunct{}};
                for (const auto& c : f.children()) acc = product(acc, dnf_formula(c));
                return acc;
            }
            case FormulaKind::Or: {
                Dnf acc;
                for (const auto& c : f.children()) append(acc, dnf_formula(c));
                return acc;
            }
            case FormulaKind::Not: {
                const Formula& g = f.body();
                if (g.kind() != FormulaKind::Test) return dnf_formula(negate(g));
                const Constructor* c = sys_.adts.find_constructor(g.ctor());
                Dnf acc;
                for (const auto& other : sys_.adts.find_adt(c->owner)->constructors)
                    if (other.name != c->name) acc.push_back(Disjunct{{Formula::test(other.name, g.arg())}, {}});
                return acc;
            }
            case FormulaKind::Exists:
            case FormulaKind::Forall: break;
        }
        throw UnsupportedFeature("quantifier inside a constraint");
    }

    Dnf dnf(const BPtr& n, bool pos) {
        using K = BNode::K;
        switch (n->k) {
            case K::Constraint: return dnf_formula(pos ? n->f : negate(n->f));
            case K::Atom:
                if (!pos) throw UnsupportedFeature("negated predicate application in clause body (not Horn)");
                return Dnf{Disjunct{{}, {n->atom}}};
            case K::Not: return dnf(n->kids[0], !pos);
            case K::And:
            case K::Or: {
                const bool conj = (n->k == K::And) == pos;
                Dnf acc;
                if (conj) acc.push_back(Disjunct{});
                for (const auto& k : n->kids) {
                    if (conj) acc = product(acc, dnf(k, pos));
                    else append(acc, dnf(k, pos));
                }
                return acc;
            }
            case K::Implies:
                if (pos) {
                    Dnf acc = dnf(n->kids[0], false);
                    append(acc, dnf(n->kids[1], true));
                    return acc;
                }
                return product(dnf(n->kids[0], true), dnf(n->kids[1], false));
            case K::Exists:
            case K::Forall:
                if ((n->k == K::Exists) != pos)
                    throw UnsupportedFeature("universal quantifier in clause body (not Horn)");
                return dnf(n->kids[0], pos);
        }
        return {};
    }

    void emit_head(const BPtr& h, const Disjunct& body) {
        using K = BNode::K;
        switch (h->k) {
            case K::Atom: return finish(body, h->atom);
            case K::Constraint:
                if (h->f.is_true()) return;
                for (const auto& e : dnf_formula(negate(h->f))) finish(product({body}, {e}).front(), std::nullopt);
                return;
            case K::And:
                for (const auto& k : h->kids) emit_head(k, body);
                return;
            case K::Implies:
                for (const auto& e : dnf(h->kids[0], true)) emit_head(h->kids[1], product({body}, {e}).front());
                return;
            case K::Not:
                for (const auto& e : dnf(h->kids[0], true)) finish(product({body}, {e}).front(), std::nullopt);
                return;
            case K::Forall: return emit_head(h->kids[0], body);
            case K::Exists: throw UnsupportedFeature("existential quantifier in clause head");
            case K::Or: {
                BPtr positive;
                Dnf extra{Disjunct{}};
                for (const auto& k : h->kids) {
                    if (has_atoms(k) && k->k != K::Not) {
                        if (positive) throw UnsupportedFeature("disjunctive clause head");
                        positive = k;
                    } else {
                        extra = product(extra, dnf(k, false));
                    }
                }
                for (const auto& e : extra) {
                    Disjunct d = product({body}, {e}).front();
                    if (positive) emit_head(positive, d);
                    else finish(d, std::nullopt);
                }
                return;
            }
        }
    }

    // Replaces integer/ADT if-then-else terms by fresh variables with a case split.
    void finish(Disjunct body, std::optional<Atom> head) {
        std::optional<Term> ite;
        for (const auto& l : body.lits)
            if (!ite) ite = find_ite(l);
        for (const auto& a : body.atoms)
            for (const auto& t : a.args)
                if (!ite) ite = find_ite(t);
        if (head)
            for (const auto& t : head->args)
                if (!ite) ite = find_ite(t);
        if (!ite) return build(body, head);

        TypedVar v{names_.fresh("ite"), ite->sort()};
        binders_.push_back(v);
        Term fresh = Term::var(v.name, v.sort);
        Disjunct base;
        for (const auto& l : body.lits) base.lits.push_back(replace_term(l, *ite, fresh));
        for (const auto& a : body.atoms) base.atoms.push_back(replace_term(a, *ite, fresh));
        std::optional<Atom> new_head;
        if (head) new_head = replace_term(*head, *ite, fresh);
        const Formula& c = ite->cond();
        for (int branch = 0; branch < 2; ++branch) {
            Dnf side = dnf_formula(branch == 0 ? c : negate(c));
            for (auto& d : side) {
                d.lits.push_back(Formula::eq(fresh, ite->args()[branch]));
                finish(product({base}, {d}).front(), new_head);
            }
        }
    }

    void build(const Disjunct& body, const std::optional<Atom>& head) {
        Clause c;
        c.head = head;
        c.constraint = Formula::conj(body.lits);
        c.body = body.atoms;
        VarSet fv = free_vars(c);
        for (const auto& b : binders_)
            if (fv.count(b.name)) c.vars.push_back(b);
        if (c.vars.size() != fv.size()) throw SortError("clause with unbound variables: " + c.to_string());
        sys_.clauses.push_back(std::move(c));
    }

    void assertion(const SExpr& e) {
        scope_.clear();
        names_ = NameSupply{};
        binders_.clear();
        BPtr f = as_bool(e);
        emit_head(f, Disjunct{});
    }
};

} // namespace

ChcSystem parse_system(std::string_view text, std::string source) {
    return Parser(std::move(source)).run(text);
}

Formula parse_formula(const SExpr& e, const std::vector<TypedVar>& scope, const AdtSignature& adts) {
    return Parser(adts).formula_in_scope(e, scope);
}

Term parse_term(const SExpr& e, const std::vector<TypedVar>& scope, const AdtSignature& adts) {
    return Parser(adts).term_in_scope(e, scope);
}

ChcSystem parse_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str(), path);
}

std::string print_datatypes(const AdtSignature& adts) {
    std::string out;
    for (const auto& fam : adts.families()) {
        out += "(declare-datatypes (";
        for (std::size_t i = 0; i < fam.size(); ++i) out += (i ? " (" : "(") + quote_symbol(fam[i].name) + " 0)";
        out += ") (";
        for (std::size_t i = 0; i < fam.size(); ++i) {
            out += i ? " (" : "(";
            for (std::size_t c = 0; c < fam[i].constructors.size(); ++c) {
                const auto& ctor = fam[i].constructors[c];
                out += (c ? " (" : "(") + quote_symbol(ctor.name);
                for (const auto& f : ctor.fields) out += " (" + quote_symbol(f.selector) + " " + f.sort.to_string() + ")";
                out += ")";
            }
            out += ")";
        }
        out += "))\n";
    }
    return out;
}

std::string print_clause(const Clause& c) {
    std::vector<std::string> parts;
    if (c.constraint.kind() == FormulaKind::And) {
        for (const auto& k : c.constraint.children()) parts.push_back(k.to_string());
    } else if (!c.constraint.is_true()) {
        parts.push_back(c.constraint.to_string());
    }
    for (const auto& a : c.body) parts.push_back(a.to_string());
    std::string head = c.head ? c.head->to_string() : "false";
    std::string matrix;
    if (parts.empty()) {
        matrix = head;
    } else {
        std::string body = parts.size() == 1 ? parts[0] : "(and";
        if (parts.size() > 1) {
            for (const auto& p : parts) body += " " + p;
            body += ")";
        }
        matrix = "(=> " + body + " " + head + ")";
    }
    if (c.vars.empty()) return "(assert " + matrix + ")";
    std::string vars;
    for (std::size_t i = 0; i < c.vars.size(); ++i)
        vars += (i ? " (" : "(") + quote_symbol(c.vars[i].name) + " " + c.vars[i].sort.to_string() + ")";
    return "(assert (forall (" + vars + ") " + matrix + "))";
}

std::string print_system(const ChcSystem& sys) {
    std::string out = "(set-logic HORN)\n";
    out += print_datatypes(sys.adts);
    for (const auto& p : sys.predicates) {
        out += "(declare-fun " + quote_symbol(p.name) + " (";
        for (std::size_t i = 0; i < p.args.size(); ++i) out += (i ? " " : "") + p.args[i].to_string();
        out += ") Bool)\n";
    }
    for (const auto& c : sys.clauses) out += print_clause(c) + "\n";
    out += "(check-sat)\n";
    return out;
}

} // namespace catalia
