#include "catalia/term_ops.hpp"

#include "catalia/error.hpp"

namespace catalia {

namespace {

Term subst_term(const Term& t, const Subst& m);
Formula subst_formula(const Formula& f, const Subst& m);

Term subst_term(const Term& t, const Subst& m) {
    switch (t.kind()) {
        case TermKind::Var: {
            auto it = m.find(t.name());
            return it == m.end() ? t : it->second;
        }
        case TermKind::Lit: return t;
        case TermKind::Cons: {
            if (t.args().empty()) return t;
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(subst_term(a, m));
            return Term::cons(t.name(), t.sort(), std::move(args));
        }
        case TermKind::Arith:
            return Term::arith(t.op(), subst_term(t.args()[0], m), subst_term(t.args()[1], m));
        case TermKind::Select:
            return Term::select(t.name(), t.ctor(), t.index(), t.sort(), subst_term(t.args()[0], m));
        case TermKind::Cata: return Term::cata(t.name(), t.index(), subst_term(t.args()[0], m));
        case TermKind::Ite:
            return Term::ite(subst_formula(t.cond(), m), subst_term(t.args()[0], m), subst_term(t.args()[1], m));
    }
    return t;
}

Formula subst_quantified(const Formula& f, const Subst& m) {
    Subst inner;
    VarSet range_fv;
    for (const auto& [k, v] : m) {
        bool is_bound = false;
        for (const auto& b : f.bound()) is_bound = is_bound || b.name == k;
        if (!is_bound) {
            inner.emplace(k, v);
            collect_free_vars(v, range_fv);
        }
    }
    std::vector<TypedVar> bound = f.bound();
    std::set<std::string> avoid;
    for (const auto& [k, _] : range_fv) avoid.insert(k);
    VarSet body_fv = free_vars(f.body());
    for (const auto& [k, _] : body_fv) avoid.insert(k);
    for (const auto& [k, _] : inner) avoid.insert(k);
    NameSupply names(avoid);
    for (auto& b : bound) {
        if (range_fv.count(b.name)) {
            std::string fresh = names.fresh(b.name + "!q");
            inner.insert_or_assign(b.name, Term::var(fresh, b.sort));
            b.name = fresh;
        }
    }
    Formula body = subst_formula(f.body(), inner);
    return f.kind() == FormulaKind::Exists ? Formula::exists(std::move(bound), std::move(body))
                                           : Formula::forall(std::move(bound), std::move(body));
}

Formula subst_formula(const Formula& f, const Subst& m) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return f;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            kids.reserve(f.children().size());
            for (const auto& c : f.children()) kids.push_back(subst_formula(c, m));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Not: return Formula::negation(subst_formula(f.body(), m));
        case FormulaKind::Cmp: return Formula::cmp(f.op(), subst_term(f.lhs(), m), subst_term(f.rhs(), m));
        case FormulaKind::Test: return Formula::test(f.ctor(), subst_term(f.arg(), m));
        case FormulaKind::Exists:
        case FormulaKind::Forall: return subst_quantified(f, m);
    }
    return f;
}

} // namespace

Term substitute(const Term& t, const Subst& mapping) {
    if (mapping.empty()) return t;
    return subst_term(t, mapping);
}

Formula substitute(const Formula& f, const Subst& mapping) {
    if (mapping.empty()) return f;
    return subst_formula(f, mapping);
}

Atom substitute(const Atom& a, const Subst& mapping) {
    Atom out{a.pred, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(substitute(t, mapping));
    return out;
}

void collect_free_vars(const Term& t, VarSet& out) {
    if (t.kind() == TermKind::Var) {
        out.emplace(t.name(), t.sort());
        return;
    }
    for (const auto& a : t.args()) collect_free_vars(a, out);
    if (t.kind() == TermKind::Ite) collect_free_vars(t.cond(), out);
}

void collect_free_vars(const Formula& f, VarSet& out) {
    switch (f.kind()) {
        case FormulaKind::Cmp:
            collect_free_vars(f.lhs(), out);
            collect_free_vars(f.rhs(), out);
            return;
        case FormulaKind::Test: collect_free_vars(f.arg(), out); return;
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            VarSet inner;
            collect_free_vars(f.body(), inner);
            for (const auto& b : f.bound()) inner.erase(b.name);
            out.insert(inner.begin(), inner.end());
            return;
        }
        default:
            for (const auto& c : f.children()) collect_free_vars(c, out);
    }
}

VarSet free_vars(const Term& t) {
    VarSet out;
    collect_free_vars(t, out);
    return out;
}

VarSet free_vars(const Formula& f) {
    VarSet out;
    collect_free_vars(f, out);
    return out;
}

VarSet free_vars(const Clause& c) {
    VarSet out;
    if (c.head)
        for (const auto& t : c.head->args) collect_free_vars(t, out);
    collect_free_vars(c.constraint, out);
    for (const auto& a : c.body)
        for (const auto& t : a.args) collect_free_vars(t, out);
    return out;
}

bool is_ground(const Term& t) {
    if (t.kind() == TermKind::Var) return false;
    for (const auto& a : t.args())
        if (!is_ground(a)) return false;
    if (t.kind() == TermKind::Ite) return free_vars(t.cond()).empty();
    return true;
}

std::size_t term_size(const Term& t) {
    std::size_t n = t.kind() == TermKind::Cons ? 1 : 0;
    for (const auto& a : t.args()) n += term_size(a);
    return n;
}

bool is_quantifier_free(const Formula& f) {
    if (f.kind() == FormulaKind::Exists || f.kind() == FormulaKind::Forall) return false;
    for (const auto& c : f.children())
        if (!is_quantifier_free(c)) return false;
    return true;
}

bool contains_not(const Formula& f) {
    if (f.kind() == FormulaKind::Not) return true;
    for (const auto& c : f.children())
        if (contains_not(c)) return true;
    return false;
}

Formula pointwise_eq(const std::vector<Term>& lhs, const std::vector<Term>& rhs) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < lhs.size() && i < rhs.size(); ++i) parts.push_back(Formula::eq(lhs[i], rhs[i]));
    return Formula::conj(std::move(parts));
}

std::string NameSupply::fresh(std::string_view base) {
    std::string name(base);
    if (!used_.count(name)) {
        used_.insert(name);
        return name;
    }
    for (std::size_t k = 0;; ++k) {
        std::string cand = name + "!" + std::to_string(k);
        if (!used_.count(cand)) {
            used_.insert(cand);
            return cand;
        }
    }
}

namespace {

void collect_names(const Term& t, std::set<std::string>& out);

void collect_names(const Formula& f, std::set<std::string>& out) {
    if (f.kind() == FormulaKind::Cmp) {
        collect_names(f.lhs(), out);
        collect_names(f.rhs(), out);
        return;
    }
    if (f.kind() == FormulaKind::Test) {
        collect_names(f.arg(), out);
        return;
    }
    for (const auto& b : f.bound()) out.insert(b.name);
    for (const auto& c : f.children()) collect_names(c, out);
}

void collect_names(const Term& t, std::set<std::string>& out) {
    if (t.kind() == TermKind::Var) out.insert(t.name());
    for (const auto& a : t.args()) collect_names(a, out);
    if (t.kind() == TermKind::Ite) collect_names(t.cond(), out);
}

} // namespace

std::set<std::string> clause_names(const Clause& c) {
    std::set<std::string> out;
    for (const auto& v : c.vars) out.insert(v.name);
    if (c.head)
        for (const auto& t : c.head->args) collect_names(t, out);
    collect_names(c.constraint, out);
    for (const auto& a : c.body)
        for (const auto& t : a.args) collect_names(t, out);
    return out;
}

// ---------------------------------------------------------------------------
// Sort checking

Sort check_term(const ChcSystem& sys, const Term& t, const VarSet& scope) {
    switch (t.kind()) {
        case TermKind::Var: {
            auto it = scope.find(t.name());
            if (it == scope.end()) throw SortError("unbound variable '" + t.name() + "'");
            if (it->second != t.sort())
                throw SortError("variable '" + t.name() + "' used at sort " + t.sort().to_string() +
                                " but declared " + it->second.to_string());
            return t.sort();
        }
        case TermKind::Lit: return Sort::integer();
        case TermKind::Cons: {
            const Constructor* c = sys.adts.find_constructor(t.name());
            if (!c) throw SortError("unknown constructor '" + t.name() + "'");
            if (t.sort() != c->sort()) throw SortError("constructor '" + t.name() + "' has the wrong result sort");
            if (t.args().size() != c->arity())
                throw SortError("constructor '" + t.name() + "' expects " + std::to_string(c->arity()) +
                                " arguments");
            for (std::size_t i = 0; i < t.args().size(); ++i) {
                Sort s = check_term(sys, t.args()[i], scope);
                if (s != c->fields[i].sort)
                    throw SortError("argument " + std::to_string(i) + " of '" + t.name() + "' must be " +
                                    c->fields[i].sort.to_string() + ", got " + s.to_string());
            }
            return t.sort();
        }
        case TermKind::Arith:
            for (const auto& a : t.args())
                if (!check_term(sys, a, scope).is_int())
                    throw SortError("arithmetic on non-integer term " + a.to_string());
            return Sort::integer();
        case TermKind::Select: {
            auto sel = sys.adts.find_selector(t.name());
            if (!sel) throw SortError("unknown selector '" + t.name() + "'");
            if (check_term(sys, t.args()[0], scope) != sel->ctor->sort())
                throw SortError("selector '" + t.name() + "' applied to the wrong sort");
            if (t.sort() != sel->ctor->fields[sel->field].sort)
                throw SortError("selector '" + t.name() + "' has the wrong result sort");
            return t.sort();
        }
        case TermKind::Cata: {
            Sort s = check_term(sys, t.args()[0], scope);
            if (!s.is_adt() || s.name() != t.name())
                throw SortError("catamorphism for '" + t.name() + "' applied to sort " + s.to_string());
            return Sort::integer();
        }
        case TermKind::Ite: {
            check_formula(sys, t.cond(), scope);
            Sort a = check_term(sys, t.args()[0], scope);
            Sort b = check_term(sys, t.args()[1], scope);
            if (a != b) throw SortError("ite branches have different sorts");
            return a;
        }
    }
    return t.sort();
}

void check_formula(const ChcSystem& sys, const Formula& f, const VarSet& scope) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return;
        case FormulaKind::Cmp: {
            Sort a = check_term(sys, f.lhs(), scope);
            Sort b = check_term(sys, f.rhs(), scope);
            const bool adt_op = f.op() == CmpOp::EqAdt || f.op() == CmpOp::NeAdt;
            if (adt_op) {
                if (!a.is_adt() || a != b) throw SortError("ADT comparison on mismatched sorts: " + f.to_string());
            } else if (!a.is_int() || !b.is_int()) {
                throw SortError("integer comparison on non-integer operands: " + f.to_string());
            }
            return;
        }
        case FormulaKind::Test: {
            const Constructor* c = sys.adts.find_constructor(f.ctor());
            if (!c) throw SortError("unknown tester constructor '" + f.ctor() + "'");
            if (check_term(sys, f.arg(), scope) != c->sort())
                throw SortError("tester for '" + f.ctor() + "' applied to the wrong sort");
            return;
        }
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            VarSet inner = scope;
            for (const auto& b : f.bound()) inner.insert_or_assign(b.name, b.sort);
            check_formula(sys, f.body(), inner);
            return;
        }
        default:
            for (const auto& c : f.children()) check_formula(sys, c, scope);
    }
}

namespace {

void check_atom(const ChcSystem& sys, const Atom& a, const VarSet& scope) {
    const PredicateDecl* p = sys.find_predicate(a.pred);
    if (!p) throw SortError("undeclared predicate '" + a.pred + "'");
    if (p->args.size() != a.args.size())
        throw SortError("predicate '" + a.pred + "' expects " + std::to_string(p->args.size()) + " arguments");
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        Sort s = check_term(sys, a.args[i], scope);
        if (s != p->args[i])
            throw SortError("argument " + std::to_string(i) + " of '" + a.pred + "' must be " +
                            p->args[i].to_string() + ", got " + s.to_string());
    }
}

} // namespace

void check_clause(const ChcSystem& sys, const Clause& c) {
    VarSet scope;
    for (const auto& v : c.vars) {
        if (v.sort.is_adt() && !sys.adts.find_adt(v.sort.name()))
            throw SortError("variable '" + v.name + "' has undeclared sort " + v.sort.name());
        if (v.sort.is_bool()) throw SortError("Bool-sorted clause variable '" + v.name + "'");
        if (!scope.emplace(v.name, v.sort).second) throw SortError("duplicate clause variable '" + v.name + "'");
    }
    if (c.head) check_atom(sys, *c.head, scope);
    if (!is_quantifier_free(c.constraint)) throw SortError("quantifier in clause constraint");
    check_formula(sys, c.constraint, scope);
    for (const auto& a : c.body) check_atom(sys, a, scope);
}

void check_sorts(const ChcSystem& sys) {
    for (const auto& p : sys.predicates)
        for (const auto& s : p.args)
            if (s.is_adt() && !sys.adts.find_adt(s.name()))
                throw SortError("predicate '" + p.name + "' uses undeclared sort " + s.name());
    for (std::size_t i = 0; i < sys.clauses.size(); ++i) {
        try {
            check_clause(sys, sys.clauses[i]);
        } catch (const SortError& e) {
            throw SortError("clause " + std::to_string(i) + ": " + e.what());
        }
    }
}

bool alpha_equivalent(const Clause& a, const Clause& b) {
    if (a.vars.size() != b.vars.size()) return false;
    Subst rename;
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
        if (a.vars[i].sort != b.vars[i].sort) return false;
        rename.emplace(b.vars[i].name, Term::var(a.vars[i].name, a.vars[i].sort));
    }
    if (a.head.has_value() != b.head.has_value()) return false;
    if (a.head && !(*a.head == substitute(*b.head, rename))) return false;
    if (!(a.constraint == substitute(b.constraint, rename))) return false;
    if (a.body.size() != b.body.size()) return false;
    for (std::size_t i = 0; i < a.body.size(); ++i)
        if (!(a.body[i] == substitute(b.body[i], rename))) return false;
    return true;
}

bool alpha_equivalent(const ChcSystem& a, const ChcSystem& b) {
    if (!(a.adts == b.adts)) return false;
    if (a.predicates != b.predicates) return false;
    if (a.clauses.size() != b.clauses.size()) return false;
    for (std::size_t i = 0; i < a.clauses.size(); ++i)
        if (!alpha_equivalent(a.clauses[i], b.clauses[i])) return false;
    return true;
}

} // namespace catalia

namespace catalia {

Integer smt_div(const Integer& a, const Integer& b) {
    if (b == 0) return 0;
    Integer q;
    Integer r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    // floor division leaves r with the sign of b; SMT-LIB wants 0 <= r < |b|
    if (r < 0) {
        q += 1;
    }
    return q;
}

Integer smt_mod(const Integer& a, const Integer& b) {
    if (b == 0) return a;
    return a - b * smt_div(a, b);
}

Term fold_arith(ArithOp op, const Term& a, const Term& b) {
    if (a.is_lit() && b.is_lit()) {
        switch (op) {
            case ArithOp::Add: return Term::lit(Integer(a.value() + b.value()));
            case ArithOp::Sub: return Term::lit(Integer(a.value() - b.value()));
            case ArithOp::Mul: return Term::lit(Integer(a.value() * b.value()));
            case ArithOp::Div: return Term::lit(smt_div(a.value(), b.value()));
            case ArithOp::Mod: return Term::lit(smt_mod(a.value(), b.value()));
        }
    }
    switch (op) {
        case ArithOp::Add:
            if (a.is_lit() && a.value() == 0) return b;
            if (b.is_lit() && b.value() == 0) return a;
            break;
        case ArithOp::Sub:
            if (b.is_lit() && b.value() == 0) return a;
            break;
        case ArithOp::Mul:
            if ((a.is_lit() && a.value() == 0) || (b.is_lit() && b.value() == 0)) return Term::lit(0);
            if (a.is_lit() && a.value() == 1) return b;
            if (b.is_lit() && b.value() == 1) return a;
            break;
        default: break;
    }
    return Term::arith(op, a, b);
}

} // namespace catalia
