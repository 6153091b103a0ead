#include "catalia/preprocess.hpp"

#include "catalia/error.hpp"
#include "catalia/term_ops.hpp"

#include <deque>
#include <optional>
#include <set>

namespace catalia {

std::string admissibility_pred_name(const std::string& adt) { return "adm!" + adt; }
std::string diseq_pred_name(const std::string& adt) { return "diseq!" + adt; }
bool is_admissibility_pred(std::string_view pred) { return pred.rfind("adm!", 0) == 0; }

std::string PreprocessReport::to_string() const {
    std::string s = "selectors eliminated: " + std::to_string(eliminated_selectors) +
                    "\ntesters eliminated: " + std::to_string(eliminated_testers) + "\ndisequality predicates:";
    for (const auto& d : diseq_predicates) s += " " + d;
    s += "\nadmissibility predicates:";
    for (const auto& [sort, p] : admissibility_preds) s += " " + sort + "->" + p;
    s += "\nfresh variables: " + std::to_string(fresh_var_count) + "\n";
    return s;
}

namespace {

// ---------------------------------------------------------------------------
// Selector / tester elimination

std::optional<Term> find_split_target(const Term& t) {
    for (const auto& a : t.args())
        if (auto r = find_split_target(a)) return r;
    if (t.kind() == TermKind::Select) return t.args()[0];
    return std::nullopt;
}

std::optional<Term> find_split_target(const Formula& f) {
    if (f.kind() == FormulaKind::Cmp) {
        if (auto r = find_split_target(f.lhs())) return r;
        return find_split_target(f.rhs());
    }
    if (f.kind() == FormulaKind::Test) {
        if (auto r = find_split_target(f.arg())) return r;
        return f.arg();
    }
    for (const auto& c : f.children())
        if (auto r = find_split_target(c)) return r;
    return std::nullopt;
}

std::optional<Term> find_split_target(const Clause& c) {
    if (auto r = find_split_target(c.constraint)) return r;
    for (const auto& a : c.body)
        for (const auto& t : a.args)
            if (auto r = find_split_target(t)) return r;
    if (c.head)
        for (const auto& t : c.head->args)
            if (auto r = find_split_target(t)) return r;
    return std::nullopt;
}

// Rewrites selector applications and testers on `target` for the case target = ctor(fields).
struct CaseRewriter {
    const Term& target;
    const Constructor& ctor;
    const std::vector<Term>& fields;
    // Fresh variables standing for selectors of other constructors, created on demand.
    std::map<std::string, Term, std::less<>>& other;
    NameSupply& names;
    std::vector<TypedVar>& new_vars;
    PreprocessReport& report;

    Term term(const Term& t) {
        switch (t.kind()) {
            case TermKind::Var:
            case TermKind::Lit: return t;
            case TermKind::Select: {
                Term arg = term(t.args()[0]);
                if (!(arg == target)) return Term::select(t.name(), t.ctor(), t.index(), t.sort(), arg);
                ++report.eliminated_selectors;
                if (t.ctor() == ctor.name) return fields[t.index()];
                auto it = other.find(t.name());
                if (it != other.end()) return it->second;
                TypedVar v{names.fresh(t.name()), t.sort()};
                ++report.fresh_var_count;
                new_vars.push_back(v);
                Term fresh = Term::var(v.name, v.sort);
                other.emplace(t.name(), fresh);
                return fresh;
            }
            case TermKind::Cons: {
                std::vector<Term> args;
                for (const auto& a : t.args()) args.push_back(term(a));
                return Term::cons(t.name(), t.sort(), std::move(args));
            }
            case TermKind::Arith: return Term::arith(t.op(), term(t.args()[0]), term(t.args()[1]));
            case TermKind::Cata: return Term::cata(t.name(), t.index(), term(t.args()[0]));
            case TermKind::Ite: return Term::ite(formula(t.cond()), term(t.args()[0]), term(t.args()[1]));
        }
        return t;
    }

    Formula formula(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::Cmp: return Formula::cmp(f.op(), term(f.lhs()), term(f.rhs()));
            case FormulaKind::Test: {
                Term arg = term(f.arg());
                if (!(arg == target)) return Formula::test(f.ctor(), arg);
                ++report.eliminated_testers;
                return Formula::boolean(f.ctor() == ctor.name);
            }
            case FormulaKind::And:
            case FormulaKind::Or: {
                std::vector<Formula> kids;
                for (const auto& c : f.children()) kids.push_back(formula(c));
                return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
            }
            case FormulaKind::Not: {
                Formula b = formula(f.body());
                if (b.is_true()) return Formula::bottom();
                if (b.is_false()) return Formula::top();
                return Formula::negation(b);
            }
            default: return f;
        }
    }

    Atom atom(const Atom& a) {
        Atom out{a.pred, {}};
        for (const auto& t : a.args) out.args.push_back(term(t));
        return out;
    }
};

} // namespace

PreprocessResult eliminate_selectors_testers(const ChcSystem& sys) {
    PreprocessResult out{sys, {}};
    out.system.clauses.clear();
    std::deque<Clause> work(sys.clauses.begin(), sys.clauses.end());
    while (!work.empty()) {
        Clause c = std::move(work.front());
        work.pop_front();
        auto target = find_split_target(c);
        if (!target) {
            out.system.clauses.push_back(std::move(c));
            continue;
        }
        const AdtDecl* adt = sys.adts.find_adt(target->sort().name());
        std::vector<Clause> cases;
        // Case clauses go to the front so the relative clause order is preserved.
        for (const auto& ctor : adt->constructors) {
            NameSupply names(clause_names(c));
            Clause k;
            k.vars = c.vars;
            std::vector<Term> fields;
            for (const auto& f : ctor.fields) {
                TypedVar v{names.fresh(f.selector), f.sort};
                ++out.report.fresh_var_count;
                k.vars.push_back(v);
                fields.push_back(Term::var(v.name, v.sort));
            }
            std::map<std::string, Term, std::less<>> other;
            std::vector<TypedVar> extra;
            CaseRewriter rw{*target, ctor, fields, other, names, extra, out.report};
            Formula rewritten = rw.formula(c.constraint);
            if (rewritten.is_false()) continue;
            k.vars.insert(k.vars.end(), extra.begin(), extra.end());
            k.constraint = Formula::conj({Formula::eq(*target, Term::cons(ctor.name, ctor.sort(), fields)), rewritten});
            for (const auto& a : c.body) k.body.push_back(rw.atom(a));
            if (c.head) k.head = rw.atom(*c.head);
            cases.push_back(std::move(k));
        }
        for (auto it = cases.rbegin(); it != cases.rend(); ++it) work.push_front(std::move(*it));
    }
    out.system.selectors_eliminated = true;
    return out;
}

// ---------------------------------------------------------------------------
// ADT disequality

namespace {

void collect_diseq(const Formula& f, bool top, std::vector<Formula>& keep, std::vector<Formula>& diseqs) {
    if (f.kind() == FormulaKind::And && top) {
        for (const auto& c : f.children()) collect_diseq(c, true, keep, diseqs);
        return;
    }
    if (f.kind() == FormulaKind::Cmp && f.op() == CmpOp::NeAdt) {
        if (!top) throw UnsupportedFeature("ADT disequality below a disjunction");
        diseqs.push_back(f);
        return;
    }
    for (const auto& c : f.children()) collect_diseq(c, false, keep, diseqs);
    if (top) keep.push_back(f);
}

std::vector<Clause> diseq_clauses(const AdtDecl& adt, std::set<std::string>& needed) {
    std::vector<Clause> out;
    const std::string pred = diseq_pred_name(adt.name);
    auto instance = [](const Constructor& c, const char* prefix, std::vector<TypedVar>& vars) {
        std::vector<Term> args;
        for (std::size_t i = 0; i < c.fields.size(); ++i) {
            TypedVar v{prefix + std::to_string(i), c.fields[i].sort};
            vars.push_back(v);
            args.push_back(Term::var(v.name, v.sort));
        }
        return Term::cons(c.name, c.sort(), std::move(args));
    };
    for (const auto& a : adt.constructors)
        for (const auto& b : adt.constructors) {
            if (a.name == b.name) continue;
            Clause c;
            Term ta = instance(a, "x", c.vars);
            Term tb = instance(b, "y", c.vars);
            c.head = Atom{pred, {ta, tb}};
            out.push_back(std::move(c));
        }
    for (const auto& a : adt.constructors)
        for (std::size_t j = 0; j < a.fields.size(); ++j) {
            Clause c;
            Term ta = instance(a, "x", c.vars);
            Term tb = instance(a, "y", c.vars);
            c.head = Atom{pred, {ta, tb}};
            const Sort& s = a.fields[j].sort;
            Term xj = ta.args()[j];
            Term yj = tb.args()[j];
            if (s.is_int()) {
                c.constraint = Formula::ne(xj, yj);
            } else {
                c.body.push_back(Atom{diseq_pred_name(s.name()), {xj, yj}});
                needed.insert(s.name());
            }
            out.push_back(std::move(c));
        }
    return out;
}

} // namespace

PreprocessResult encode_adt_disequality(const ChcSystem& sys) {
    PreprocessResult out{sys, {}};
    std::set<std::string> needed;
    for (auto& c : out.system.clauses) {
        std::vector<Formula> keep;
        std::vector<Formula> diseqs;
        collect_diseq(c.constraint, true, keep, diseqs);
        if (diseqs.empty()) continue;
        c.constraint = Formula::conj(std::move(keep));
        for (const auto& d : diseqs) {
            const std::string& adt = d.lhs().sort().name();
            needed.insert(adt);
            c.body.push_back(Atom{diseq_pred_name(adt), {d.lhs(), d.rhs()}});
        }
    }
    std::vector<Clause> defining;
    std::set<std::string> done;
    std::vector<std::string> order;
    while (true) {
        std::string next;
        for (const auto& name : sys.adts.adt_names())
            if (needed.count(name) && !done.count(name)) {
                next = name;
                break;
            }
        if (next.empty()) break;
        done.insert(next);
        order.push_back(next);
        auto cl = diseq_clauses(*sys.adts.find_adt(next), needed);
        defining.insert(defining.end(), cl.begin(), cl.end());
    }
    for (const auto& name : sys.adts.adt_names()) {
        if (!done.count(name)) continue;
        Sort s = Sort::adt(name);
        out.system.declare_predicate(PredicateDecl{diseq_pred_name(name), {s, s}});
        out.report.diseq_predicates.push_back(diseq_pred_name(name));
    }
    out.system.clauses.insert(out.system.clauses.end(), defining.begin(), defining.end());
    out.system.diseq_encoded = true;
    return out;
}

// ---------------------------------------------------------------------------
// Admissibility

namespace {

void collect_sorts(const Term& t, std::set<std::string>& out) {
    if (t.sort().is_adt()) out.insert(t.sort().name());
    for (const auto& a : t.args()) collect_sorts(a, out);
}

void collect_sorts(const Formula& f, std::set<std::string>& out) {
    if (f.kind() == FormulaKind::Cmp) {
        collect_sorts(f.lhs(), out);
        collect_sorts(f.rhs(), out);
    } else if (f.kind() == FormulaKind::Test) {
        collect_sorts(f.arg(), out);
    }
    for (const auto& c : f.children()) collect_sorts(c, out);
}

} // namespace

PreprocessResult augment_admissibility(const ChcSystem& sys) {
    PreprocessResult out{sys, {}};
    std::set<std::string> occurring;
    for (const auto& p : sys.predicates)
        for (const auto& s : p.args)
            if (s.is_adt()) occurring.insert(s.name());
    for (const auto& c : sys.clauses) {
        for (const auto& v : c.vars)
            if (v.sort.is_adt()) occurring.insert(v.sort.name());
        collect_sorts(c.constraint, occurring);
    }
    // Close under constructor fields: the defining clauses mention the child sorts.
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& name : std::set<std::string>(occurring))
            for (const auto& ctor : sys.adts.find_adt(name)->constructors)
                for (const auto& f : ctor.fields)
                    if (f.sort.is_adt() && occurring.insert(f.sort.name()).second) grew = true;
    }

    for (auto& c : out.system.clauses) {
        std::vector<Atom> body;
        for (const auto& v : c.vars)
            if (v.sort.is_adt())
                body.push_back(Atom{admissibility_pred_name(v.sort.name()), {Term::var(v.name, v.sort)}});
        body.insert(body.end(), c.body.begin(), c.body.end());
        c.body = std::move(body);
    }
    for (const auto& name : sys.adts.adt_names()) {
        if (!occurring.count(name)) continue;
        const std::string pred = admissibility_pred_name(name);
        out.system.declare_predicate(PredicateDecl{pred, {Sort::adt(name)}});
        out.report.admissibility_preds[name] = pred;
        for (const auto& ctor : sys.adts.find_adt(name)->constructors) {
            Clause c;
            std::vector<Term> args;
            for (std::size_t i = 0; i < ctor.fields.size(); ++i) {
                TypedVar v{"x" + std::to_string(i), ctor.fields[i].sort};
                c.vars.push_back(v);
                args.push_back(Term::var(v.name, v.sort));
                if (v.sort.is_adt()) c.body.push_back(Atom{admissibility_pred_name(v.sort.name()), {args.back()}});
            }
            c.head = Atom{pred, {Term::cons(ctor.name, ctor.sort(), std::move(args))}};
            out.system.clauses.push_back(std::move(c));
        }
    }
    out.system.augmented = true;
    return out;
}

PreprocessResult preprocess(const ChcSystem& sys, bool admissibility) {
    PreprocessResult a = eliminate_selectors_testers(sys);
    PreprocessResult b = encode_adt_disequality(a.system);
    PreprocessResult out{std::move(b.system), a.report};
    out.report.diseq_predicates = b.report.diseq_predicates;
    if (admissibility) {
        PreprocessResult c = augment_admissibility(out.system);
        out.system = std::move(c.system);
        out.report.admissibility_preds = c.report.admissibility_preds;
    }
    return out;
}

} // namespace catalia
