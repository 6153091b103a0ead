#include "catalia/simplify.hpp"

#include "catalia/term_ops.hpp"

namespace catalia {

Term fold_constants(const Term& t) {
    switch (t.kind()) {
        case TermKind::Var:
        case TermKind::Lit: return t;
        case TermKind::Arith: return fold_arith(t.op(), fold_constants(t.args()[0]), fold_constants(t.args()[1]));
        case TermKind::Cons: {
            if (t.args().empty()) return t;
            std::vector<Term> args;
            for (const auto& a : t.args()) args.push_back(fold_constants(a));
            return Term::cons(t.name(), t.sort(), std::move(args));
        }
        case TermKind::Select: {
            Term a = fold_constants(t.args()[0]);
            if (a.is_cons() && a.name() == t.ctor()) return a.args()[t.index()];
            return Term::select(t.name(), t.ctor(), t.index(), t.sort(), a);
        }
        case TermKind::Cata: return Term::cata(t.name(), t.index(), fold_constants(t.args()[0]));
        case TermKind::Ite: {
            Formula c = fold_constants(t.cond());
            if (c.is_true()) return fold_constants(t.args()[0]);
            if (c.is_false()) return fold_constants(t.args()[1]);
            return Term::ite(c, fold_constants(t.args()[0]), fold_constants(t.args()[1]));
        }
    }
    return t;
}

Formula fold_constants(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return f;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(fold_constants(c));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Not: {
            Formula b = fold_constants(f.body());
            if (b.is_true()) return Formula::bottom();
            if (b.is_false()) return Formula::top();
            return Formula::negation(b);
        }
        case FormulaKind::Cmp: {
            Term a = fold_constants(f.lhs());
            Term b = fold_constants(f.rhs());
            if (a.is_lit() && b.is_lit()) {
                switch (f.op()) {
                    case CmpOp::Eq: return Formula::boolean(a.value() == b.value());
                    case CmpOp::Ne: return Formula::boolean(a.value() != b.value());
                    case CmpOp::Gt: return Formula::boolean(a.value() > b.value());
                    case CmpOp::Le: return Formula::boolean(a.value() <= b.value());
                    default: break;
                }
            }
            if (a == b) {
                switch (f.op()) {
                    case CmpOp::Eq:
                    case CmpOp::EqAdt:
                    case CmpOp::Le: return Formula::top();
                    case CmpOp::Ne:
                    case CmpOp::NeAdt:
                    case CmpOp::Gt: return Formula::bottom();
                }
            }
            return Formula::cmp(f.op(), a, b);
        }
        case FormulaKind::Test: {
            Term a = fold_constants(f.arg());
            if (a.is_cons()) return Formula::boolean(a.name() == f.ctor());
            return Formula::test(f.ctor(), a);
        }
        case FormulaKind::Exists:
        case FormulaKind::Forall: return f;
    }
    return f;
}

namespace {

std::vector<Formula> conjuncts(const Formula& f) {
    if (f.kind() == FormulaKind::And) return f.children();
    if (f.is_true()) return {};
    return {f};
}

bool occurs(const std::string& v, const Term& t) { return free_vars(t).count(v) != 0; }

// Finds a conjunct v = t usable for propagation; returns its index and the binding.
std::optional<std::pair<std::size_t, std::pair<std::string, Term>>> find_binding(
    const std::vector<Formula>& parts, const VarSet* allowed) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Formula& p = parts[i];
        if (p.kind() != FormulaKind::Cmp || (p.op() != CmpOp::Eq && p.op() != CmpOp::EqAdt)) continue;
        for (int side = 0; side < 2; ++side) {
            const Term& v = side == 0 ? p.lhs() : p.rhs();
            const Term& t = side == 0 ? p.rhs() : p.lhs();
            if (!v.is_var() || occurs(v.name(), t)) continue;
            if (allowed && !allowed->count(v.name())) continue;
            return std::make_pair(i, std::make_pair(v.name(), t));
        }
    }
    return std::nullopt;
}

} // namespace

Formula simplify(const Formula& f) {
    std::vector<Formula> parts = conjuncts(fold_constants(f));
    while (auto b = find_binding(parts, nullptr)) {
        Subst s{{b->second.first, b->second.second}};
        std::vector<Formula> next;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (i != b->first) next.push_back(substitute(parts[i], s));
        parts = std::move(next);
    }
    return fold_constants(Formula::conj(std::move(parts)));
}

Clause propagate_equalities(const Clause& c) {
    VarSet vars;
    for (const auto& v : c.vars) vars.emplace(v.name, v.sort);
    std::vector<Formula> parts = conjuncts(fold_constants(c.constraint));
    Clause out = c;
    while (auto b = find_binding(parts, &vars)) {
        Subst s{{b->second.first, b->second.second}};
        std::vector<Formula> next;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (i != b->first) next.push_back(substitute(parts[i], s));
        parts = std::move(next);
        if (out.head) out.head = substitute(*out.head, s);
        for (auto& a : out.body) a = substitute(a, s);
        vars.erase(b->second.first);
        std::erase_if(out.vars, [&](const TypedVar& v) { return v.name == b->second.first; });
    }
    out.constraint = fold_constants(Formula::conj(std::move(parts)));
    return out;
}

} // namespace catalia
