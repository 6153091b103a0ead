#include "catalia/proof.hpp"

#include "catalia/error.hpp"
#include "catalia/eval.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/simplify.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/term_ops.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>

namespace catalia {

std::string ResolutionProof::to_string() const {
    std::string out = "goal " + std::to_string(goal);
    for (const auto& s : steps) {
        out += "; atom " + std::to_string(s.position) + " <- clause " + std::to_string(s.clause);
        if (s.admissibility) out += " (adm)";
    }
    return out;
}

std::vector<std::size_t> ResolutionProof::clause_multiset() const {
    std::vector<std::size_t> out{goal};
    for (const auto& s : steps) out.push_back(s.clause);
    std::sort(out.begin(), out.end());
    return out;
}

ResolutionProof linearize(const Derivation& root, const ChcSystem& sys) {
    ResolutionProof p;
    p.goal = root.clause;
    if (root.clause >= sys.clauses.size() || !sys.clauses[root.clause].is_goal())
        throw ReplayMismatch("derivation root is not a goal clause");
    std::deque<const Derivation*> pending;
    for (const auto& d : root.premises) pending.push_back(&d);
    while (!pending.empty()) {
        const Derivation* d = pending.front();
        pending.pop_front();
        const Clause& c = sys.clauses.at(d->clause);
        if (!c.head || d->premises.size() != c.body.size())
            throw ReplayMismatch("derivation node does not fit clause " + std::to_string(d->clause));
        p.steps.push_back({d->clause, 0, is_admissibility_pred(c.head->pred), d->instance});
        for (auto it = d->premises.rbegin(); it != d->premises.rend(); ++it) pending.push_front(&*it);
    }
    return p;
}

namespace {

struct Renamed {
    std::vector<TypedVar> vars;
    Clause clause;
};

Renamed rename_apart(const Clause& c, std::vector<TypedVar>& used, std::size_t step) {
    std::set<std::string> names;
    for (const auto& v : used) names.insert(v.name);
    NameSupply supply(std::move(names));
    Subst s;
    Renamed out;
    for (const auto& v : c.vars) {
        TypedVar nv{supply.fresh(v.name + "!" + std::to_string(step)), v.sort};
        supply.reserve(nv.name);
        s.insert_or_assign(v.name, Term::var(nv.name, nv.sort));
        out.vars.push_back(nv);
        used.push_back(nv);
    }
    out.clause.vars = out.vars;
    if (c.head) out.clause.head = substitute(*c.head, s);
    out.clause.constraint = substitute(c.constraint, s);
    for (const auto& a : c.body) out.clause.body.push_back(substitute(a, s));
    return out;
}

} // namespace

Resolvent start_resolvent(const ChcSystem& sys, std::size_t goal) {
    const Clause& c = sys.clauses.at(goal);
    if (!c.is_goal()) throw ReplayMismatch("clause " + std::to_string(goal) + " is not a goal");
    Resolvent r;
    Renamed g = rename_apart(c, r.vars, 0);
    r.constraint.push_back(g.clause.constraint);
    r.atoms = g.clause.body;
    r.levels.assign(r.atoms.size(), 1);
    r.proof.goal = goal;
    return r;
}

Resolvent resolve(const Resolvent& r, const ChcSystem& sys, std::size_t position, std::size_t clause) {
    if (position >= r.atoms.size()) throw ReplayMismatch("no atom at position " + std::to_string(position));
    if (clause >= sys.clauses.size()) throw ReplayMismatch("no clause " + std::to_string(clause));
    const Clause& c = sys.clauses[clause];
    const Atom& atom = r.atoms[position];
    if (!c.head || c.head->pred != atom.pred || c.head->args.size() != atom.args.size())
        throw ReplayMismatch("clause " + std::to_string(clause) + " cannot resolve " + atom.to_string());
    Resolvent out;
    out.vars = r.vars;
    out.depth = r.depth + 1;
    Renamed k = rename_apart(c, out.vars, out.depth);
    out.constraint = r.constraint;
    for (std::size_t i = 0; i < atom.args.size(); ++i)
        out.constraint.push_back(Formula::eq(atom.args[i], k.clause.head->args[i]));
    out.constraint.push_back(k.clause.constraint);
    out.atoms.assign(r.atoms.begin(), r.atoms.begin() + static_cast<long>(position));
    out.atoms.insert(out.atoms.end(), k.clause.body.begin(), k.clause.body.end());
    out.atoms.insert(out.atoms.end(), r.atoms.begin() + static_cast<long>(position) + 1, r.atoms.end());
    const auto at = static_cast<long>(position);
    out.levels.assign(r.levels.begin(), r.levels.begin() + at);
    out.levels.insert(out.levels.end(), k.clause.body.size(), r.levels[position] + 1);
    out.levels.insert(out.levels.end(), r.levels.begin() + at + 1, r.levels.end());
    out.proof = r.proof;
    out.proof.steps.push_back({clause, position, is_admissibility_pred(atom.pred), {}});
    return out;
}

Resolvent skip_atom(const Resolvent& r, const ChcSystem& sys, std::size_t position, std::size_t clause) {
    if (position >= r.atoms.size()) throw ReplayMismatch("no atom at position " + std::to_string(position));
    if (clause >= sys.clauses.size()) throw ReplayMismatch("no clause " + std::to_string(clause));
    const Clause& c = sys.clauses[clause];
    if (!c.head || c.head->pred != r.atoms[position].pred)
        throw ReplayMismatch("clause " + std::to_string(clause) + " cannot resolve " + r.atoms[position].to_string());
    Resolvent out = r;
    const auto at = static_cast<long>(position);
    out.atoms.erase(out.atoms.begin() + at);
    out.atoms.insert(out.atoms.begin() + at, c.body.begin(), c.body.end());
    out.levels.erase(out.levels.begin() + at);
    out.levels.insert(out.levels.begin() + at, c.body.size(), r.levels[position] + 1);
    out.proof.steps.push_back({clause, position, true, {}});
    return out;
}

namespace {

bool clash(const Term& a, const Term& b) {
    if (a.is_lit() && b.is_lit()) return a.value() != b.value();
    if (!a.is_cons() || !b.is_cons()) return false;
    if (a.name() != b.name()) return true;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (clash(a.args()[i], b.args()[i])) return true;
    return false;
}

bool refuted(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::False: return true;
        case FormulaKind::And:
            return std::any_of(f.children().begin(), f.children().end(), refuted);
        case FormulaKind::Or:
            return std::all_of(f.children().begin(), f.children().end(), refuted);
        case FormulaKind::Cmp:
            if (f.op() == CmpOp::EqAdt || f.op() == CmpOp::Eq) return clash(f.lhs(), f.rhs());
            return false;
        default: return false;
    }
}

} // namespace

bool quick_refute(const std::vector<Formula>& constraint) { return refuted(simplify(Formula::conj(constraint))); }

ConstraintOracle ground_oracle(const AdtSignature& adts, GroundSearch bounds) {
    auto domains = std::make_shared<std::map<std::string, std::vector<Term>, std::less<>>>();
    return [adts, bounds, domains](const std::vector<TypedVar>&, const Formula& phi) {
        Formula f = simplify(phi);
        if (f.is_false()) return OracleAnswer::Unsat;
        if (f.is_true()) return OracleAnswer::Sat;
        std::vector<std::string> names;
        std::vector<const std::vector<Term>*> doms;
        for (const auto& [name, sort] : free_vars(f)) {
            std::string key = sort.is_adt() ? sort.name() : std::string("Int");
            auto it = domains->find(key);
            if (it == domains->end()) {
                std::vector<Term> d;
                if (sort.is_adt()) {
                    d = enumerate_terms(adts, key, bounds.max_size, bounds.int_lo, bounds.int_hi);
                } else {
                    for (long v = bounds.int_lo; v <= bounds.int_hi; ++v) d.push_back(Term::lit(v));
                }
                it = domains->emplace(key, std::move(d)).first;
            }
            if (it->second.empty()) return OracleAnswer::Unknown;
            names.push_back(name);
            doms.push_back(&it->second);
        }
        std::vector<std::size_t> idx(names.size(), 0);
        GroundEnv env;
        for (std::size_t n = 0; n < bounds.max_points; ++n) {
            for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = (*doms[i])[idx[i]];
            try {
                if (eval_formula(f, env)) return OracleAnswer::Sat;
            } catch (const Error&) {
                return OracleAnswer::Unknown;
            }
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == doms[i]->size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
        return OracleAnswer::Unknown;
    };
}

std::optional<ResolutionProof> internal_unfold_unsat(const ChcSystem& sys, const ConstraintOracle& oracle,
                                                     const UnfoldLimits& limits) {
    std::deque<Resolvent> queue;
    for (std::size_t i = 0; i < sys.clauses.size(); ++i)
        if (sys.clauses[i].is_goal()) queue.push_back(start_resolvent(sys, i));
    std::size_t nodes = 0;
    while (!queue.empty() && nodes < limits.max_nodes) {
        Resolvent r = std::move(queue.front());
        queue.pop_front();
        ++nodes;
        if (r.atoms.empty()) {
            if (quick_refute(r.constraint)) continue;
            if (oracle(r.vars, Formula::conj(r.constraint)) == OracleAnswer::Sat) return r.proof;
            continue;
        }
        if (r.levels.front() > limits.max_depth) continue;
        for (std::size_t c = 0; c < sys.clauses.size(); ++c) {
            const Clause& cl = sys.clauses[c];
            if (!cl.head || cl.head->pred != r.atoms.front().pred) continue;
            Resolvent next = resolve(r, sys, 0, c);
            if (!quick_refute(next.constraint)) queue.push_back(std::move(next));
        }
    }
    return std::nullopt;
}

Resolvent replay_on(const ChcSystem& sys, const ResolutionProof& proof) {
    Resolvent r = start_resolvent(sys, proof.goal);
    for (const auto& s : proof.steps) r = resolve(r, sys, s.position, s.clause);
    if (!r.atoms.empty()) throw ReplayMismatch("proof leaves " + std::to_string(r.atoms.size()) + " open atoms");
    return r;
}

// ---------------------------------------------------------------------------
// z3 hyper-resolution proofs

namespace {

using LetEnv = std::map<std::string, SExpr, std::less<>>;

SExpr expand_lets(const SExpr& e, const LetEnv& env) {
    if (e.is_symbol()) {
        auto it = env.find(e.text);
        return it == env.end() ? e : it->second;
    }
    if (!e.is_list()) return e;
    if (e.is_app("let") && e.size() == 3 && e[1].is_list()) {
        LetEnv inner = env;
        for (const auto& b : e[1].items) {
            if (!b.is_list() || b.size() != 2 || !b[0].is_symbol()) throw ProofParseError("malformed let binding");
            inner.insert_or_assign(b[0].text, expand_lets(b[1], env));
        }
        return expand_lets(e[2], inner);
    }
    if ((e.is_app("forall") || e.is_app("exists")) && e.size() == 3) {
        // Bound variables shadow let names.
        LetEnv inner = env;
        for (const auto& b : e[1].items)
            if (b.is_list() && !b.items.empty()) inner.erase(b[0].text);
        SExpr out = e;
        out.items[2] = expand_lets(e[2], inner);
        return out;
    }
    SExpr out = e;
    for (auto& item : out.items) item = expand_lets(item, env);
    return out;
}

const SExpr* find_proof(const SExpr& e) {
    if (e.is_app("proof")) return &e;
    if (!e.is_list()) return nullptr;
    for (const auto& i : e.items)
        if (const SExpr* p = find_proof(i)) return p;
    return nullptr;
}

struct Node {
    std::string pred;
    std::vector<SExpr> args;
    std::vector<Node> premises;
};

bool is_atom_expr(const SExpr& e) {
    if (e.is_symbol()) return e.text != "false" && e.text != "true";
    return e.is_list() && !e.items.empty() && e[0].is_symbol() && e[0].text != "=>" && e[0].text != "and" &&
           e[0].text != "forall" && e[0].text != "not" && e[0].text != "or" && e[0].text != "=";
}

Node atom_node(const SExpr& e) {
    Node n;
    if (e.is_symbol()) {
        n.pred = e.text;
        return n;
    }
    n.pred = e[0].text;
    n.args.assign(e.items.begin() + 1, e.items.end());
    return n;
}

Node derive(const SExpr& e) {
    if (!e.is_list() || e.items.empty()) throw ProofParseError("unexpected proof term " + e.to_string());
    const SExpr& head = e[0];
    if (head.is_list() && head.is_app("_") && head.size() >= 2 && head[1].is_symbol("hyper-res")) {
        if (e.size() < 3) throw ProofParseError("malformed hyper-res step");
        Node n = atom_node(e[e.size() - 1]);
        for (std::size_t i = 2; i + 1 < e.size(); ++i) n.premises.push_back(derive(e[i]));
        return n;
    }
    if (head.is_symbol("asserted") && e.size() == 2 && is_atom_expr(e[1])) return atom_node(e[1]);
    if (head.is_symbol("mp") && e.size() == 4) {
        Node n = derive(e[1]);
        if (is_atom_expr(e[3])) {
            Node c = atom_node(e[3]);
            n.pred = c.pred;
            n.args = c.args;
        }
        return n;
    }
    throw ProofParseError("unsupported proof rule " + head.to_string());
}

struct Matcher {
    const ChcSystem& sys;
    const ConstraintOracle& oracle;

    std::vector<Term> ground(const std::vector<SExpr>& args) const {
        std::vector<Term> out;
        for (const auto& a : args) {
            try {
                out.push_back(eval_term(parse_term(a, {}, sys.adts), {}));
            } catch (const Error& ex) {
                throw ProofParseError("cannot read proof argument " + a.to_string() + ": " + ex.what());
            }
        }
        return out;
    }

    // Bijections from clause body atoms to premises respecting predicate names.
    static void assignments(const Clause& c, const std::vector<Node>& prem, std::vector<std::size_t>& cur,
                            std::vector<bool>& taken, std::vector<std::vector<std::size_t>>& out) {
        if (out.size() >= 256) return;
        if (cur.size() == c.body.size()) {
            out.push_back(cur);
            return;
        }
        for (std::size_t j = 0; j < prem.size(); ++j) {
            if (taken[j] || prem[j].pred != c.body[cur.size()].pred) continue;
            taken[j] = true;
            cur.push_back(j);
            assignments(c, prem, cur, taken, out);
            cur.pop_back();
            taken[j] = false;
        }
    }

    bool consistent(const Clause& c, const Node& n, const std::vector<std::size_t>& asg, bool goal) const {
        std::vector<Formula> parts{c.constraint};
        auto bind = [&](const std::vector<Term>& pattern, const std::vector<SExpr>& values) {
            std::vector<Term> g = ground(values);
            if (g.size() != pattern.size()) throw ProofParseError("arity mismatch in proof");
            for (std::size_t i = 0; i < g.size(); ++i) parts.push_back(Formula::eq(pattern[i], g[i]));
        };
        if (!goal) bind(c.head->args, n.args);
        for (std::size_t j = 0; j < asg.size(); ++j) bind(c.body[j].args, n.premises[asg[j]].args);
        Formula f = simplify(Formula::conj(parts));
        if (f.is_true()) return true;
        if (f.is_false() || quick_refute({f})) return false;
        return oracle(c.vars, f) != OracleAnswer::Unsat;
    }

    Derivation build(const Node& n) const {
        const bool goal = n.pred.rfind("query!", 0) == 0;
        struct Candidate {
            std::size_t clause;
            std::vector<std::size_t> asg;
        };
        std::vector<Candidate> cands;
        for (std::size_t i = 0; i < sys.clauses.size(); ++i) {
            const Clause& c = sys.clauses[i];
            if (goal ? !c.is_goal() : (!c.head || c.head->pred != n.pred || c.head->args.size() != n.args.size()))
                continue;
            if (c.body.size() != n.premises.size()) continue;
            std::vector<std::vector<std::size_t>> asgs;
            std::vector<std::size_t> cur;
            std::vector<bool> taken(n.premises.size(), false);
            assignments(c, n.premises, cur, taken, asgs);
            for (auto& a : asgs) cands.push_back({i, std::move(a)});
        }
        const Candidate* pick = nullptr;
        if (cands.size() == 1) pick = &cands.front();
        else
            for (const auto& cd : cands)
                if (consistent(sys.clauses[cd.clause], n, cd.asg, goal)) {
                    pick = &cd;
                    break;
                }
        if (!pick) throw ProofParseError("no clause matches proof step for " + n.pred);
        Derivation d;
        d.clause = pick->clause;
        if (!goal) d.instance = ground(n.args);
        for (std::size_t j : pick->asg) d.premises.push_back(build(n.premises[j]));
        return d;
    }
};

} // namespace

ResolutionProof parse_proof(const std::string& text, const ChcSystem& sys, const ConstraintOracle& oracle) {
    std::vector<SExpr> top;
    try {
        top = parse_sexprs(text);
    } catch (const ParseError& e) {
        throw ProofParseError(std::string("malformed proof text: ") + e.what());
    }
    const SExpr* proof = nullptr;
    for (const auto& e : top)
        if ((proof = find_proof(e))) break;
    if (!proof || proof->size() != 2) throw ProofParseError("no proof term in backend output");
    SExpr body = expand_lets((*proof)[1], {});
    Node root = derive(body);
    if (root.pred.rfind("query!", 0) != 0) {
        // Goal clauses without query wrapping: the root is the derivation of the goal's body atom.
        throw ProofParseError("proof root is not a query: " + root.pred);
    }
    Matcher m{sys, oracle};
    ResolutionProof p = linearize(m.build(root), sys);
    for (auto& s : p.steps) s.admissibility = is_admissibility_pred(sys.clauses[s.clause].head->pred);
    return p;
}

} // namespace catalia
