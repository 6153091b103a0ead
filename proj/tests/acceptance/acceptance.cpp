// End-to-end, worked-example and property criteria. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
#include "catalia/abstraction.hpp"
#include "catalia/backend.hpp"
#include "catalia/counterexample.hpp"
#include "catalia/driver.hpp"
#include "catalia/error.hpp"
#include "catalia/eval.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/proof.hpp"
#include "catalia/simplify.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/synthesis.hpp"
#include "catalia/term_ops.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace catalia;

namespace {

constexpr double kWallLimit = 60.0;   // seconds per end-to-end instance
constexpr double kUnitLimit = 1.0;    // seconds per worked example
constexpr std::size_t kCases = 1000;  // per property suite
constexpr std::size_t kSamples = 500; // model check

const Sort N = Sort::adt("nat");
const Sort L = Sort::adt("ilist");

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string corpus_path(const std::string& name) { return std::string(CATALIA_CORPUS_DIR) + "/" + name; }
ChcSystem corpus(const std::string& name) { return parse_system_file(corpus_path(name)); }

AdtSignature signature() {
    return parse_system("(declare-datatypes ((nat 0)) (((Z) (S (p nat)))))\n"
                        "(declare-datatypes ((ilist 0)) (((nil) (cons (head Int) (tail ilist)))))")
        .adts;
}

std::string fmt(double s) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(2) << s << "s";
    return o.str();
}

Term nat_term(int n, Term base = Term::cons("Z", N)) {
    for (int i = 0; i < n; ++i) base = Term::cons("S", N, {base});
    return base;
}

// ---------------------------------------------------------------------------
// Random generators (seed-pinned)

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::mt19937_64 rng;
    AdtSignature adts = signature();

    long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    Sort sort() {
        switch (pick(0, 2)) {
            case 0: return Sort::integer();
            case 1: return N;
            default: return L;
        }
    }

    std::vector<TypedVar> vars(std::size_t n) {
        std::vector<TypedVar> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back({"v" + std::to_string(i), sort()});
        return v;
    }

    Term term(const Sort& s, const std::vector<TypedVar>& scope, int depth, bool with_mul = true) {
        std::vector<const TypedVar*> same;
        for (const auto& v : scope)
            if (v.sort == s) same.push_back(&v);
        if (!same.empty() && (depth == 0 || coin(0.35))) {
            const TypedVar* v = same[pick(0, static_cast<long>(same.size()) - 1)];
            return Term::var(v->name, v->sort);
        }
        if (s.is_int()) {
            if (depth == 0 || coin(0.4)) return Term::lit(pick(-8, 8));
            long op = pick(0, with_mul ? 2 : 1);
            if (op == 2) return Term::arith(ArithOp::Mul, Term::lit(pick(-3, 3)), term(s, scope, depth - 1, with_mul));
            return Term::arith(op == 0 ? ArithOp::Add : ArithOp::Sub, term(s, scope, depth - 1, with_mul),
                               term(s, scope, depth - 1, with_mul));
        }
        if (s == N) {
            if (depth == 0 || coin(0.3)) return Term::cons("Z", N);
            return Term::cons("S", N, {term(s, scope, depth - 1, with_mul)});
        }
        if (depth == 0 || coin(0.3)) return Term::cons("nil", L);
        return Term::cons("cons", L, {term(Sort::integer(), scope, depth - 1, with_mul), term(s, scope, depth - 1, with_mul)});
    }

    Formula comparison(const std::vector<TypedVar>& scope, int depth, bool with_mul = true) {
        Sort s = sort();
        Term a = term(s, scope, depth, with_mul), b = term(s, scope, depth, with_mul);
        if (!s.is_int()) return Formula::eq(a, b);
        static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Gt, CmpOp::Le};
        return Formula::cmp(ops[pick(0, 3)], a, b);
    }

    // Core-fragment system over nat and ilist: constructors and ADT equalities only.
    ChcSystem system() {
        ChcSystem s;
        s.adts = adts;
        long preds = pick(1, 3);
        for (long p = 0; p < preds; ++p) {
            PredicateDecl d{"P" + std::to_string(p), {}};
            for (long k = pick(1, 3); k > 0; --k) d.args.push_back(sort());
            s.declare_predicate(d);
        }
        auto atom = [&](const std::vector<TypedVar>& scope) {
            const PredicateDecl& d = s.predicates[pick(0, static_cast<long>(s.predicates.size()) - 1)];
            Atom a{d.name, {}};
            for (const auto& arg : d.args) a.args.push_back(term(arg, scope, 2));
            return a;
        };
        for (long c = pick(1, 4); c > 0; --c) {
            Clause cl;
            cl.vars = vars(pick(1, 4));
            if (coin(0.7)) cl.head = atom(cl.vars);
            for (long k = pick(0, 2); k > 0; --k) cl.body.push_back(atom(cl.vars));
            std::vector<Formula> parts;
            for (long k = pick(0, 3); k > 0; --k) parts.push_back(comparison(cl.vars, 2));
            cl.constraint = Formula::conj(parts);
            // Only used variables are declared, as in parsed clauses.
            VarSet used = free_vars(cl);
            std::erase_if(cl.vars, [&](const TypedVar& v) { return !used.count(v.name); });
            s.clauses.push_back(cl);
        }
        return s;
    }

    Catamorphism cata(std::size_t degree, long bound = 3) {
        TemplateCatamorphism t = linear_template(adts, degree, Integer(bound));
        return instantiate(t, assignment(t));
    }

    ParamAssignment assignment(const TemplateCatamorphism& t) {
        ParamAssignment m;
        long b = t.bound ? t.bound->get_si() : 3;
        for (const auto& p : t.params) m[p.name] = pick(-b, b);
        return m;
    }
};

bool adt_free(const Term& t) {
    if (t.sort().is_adt() || t.kind() == TermKind::Cons || t.kind() == TermKind::Select || t.kind() == TermKind::Cata)
        return false;
    for (const auto& a : t.args())
        if (!adt_free(a)) return false;
    return true;
}

bool adt_free(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Test: return false;
        case FormulaKind::Cmp:
            return f.op() != CmpOp::EqAdt && f.op() != CmpOp::NeAdt && adt_free(f.lhs()) && adt_free(f.rhs());
        default:
            for (const auto& k : f.children())
                if (!adt_free(k)) return false;
            for (const auto& v : f.bound())
                if (v.sort.is_adt()) return false;
            return true;
    }
}

// ---------------------------------------------------------------------------
// End-to-end

SolveResult timed_solve(const ChcSystem& sys, Outcome& o, double& wall, const SolveConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult r = solve(sys, cfg);
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(wall <= kWallLimit, "took " + fmt(wall));
    return r;
}

void sat_with_model(const SolveResult& r, Outcome& o) {
    o.require(r.verdict == Verdict::Sat, std::string("verdict ") + to_string(r.verdict) + " " + r.reason);
    if (!r.model) return;
    // Re-check with a seed the solver did not use.
    SampleConfig sc;
    sc.samples = kSamples;
    sc.seed = 977;
    ModelCheckReport rep = check_model_on_ground_instances(*r.model, r.preprocessed, sc);
    o.require(rep.ok() && r.model_check.ok(), "model violates sampled ground instances");
    o.require(rep.checked == kSamples * r.preprocessed.clauses.size(), "sample count");
}

Outcome criterion1() {
    Outcome o;
    double wall = 0;
    SolveResult r = timed_solve(corpus("plusnat.smt2"), o, wall);
    sat_with_model(r, o);
    o.detail = o.pass ? "sat, " + std::to_string(r.model_check.checked) + " samples, 0 violations, " + fmt(wall)
                      : o.detail;
    return o;
}

Outcome criterion2() {
    Outcome o;
    double wall = 0;
    SolveResult r = timed_solve(corpus("eo_sum.smt2"), o, wall);
    sat_with_model(r, o);
    o.require(r.template_index == 0, "needed template " + std::to_string(r.template_index));
    if (o.pass) o.detail = "sat with ladder element 0 after " + std::to_string(r.iterations) + " refinements, " + fmt(wall);
    return o;
}

Outcome criterion3() {
    Outcome o;
    double wall = 0;
    ChcSystem sys = corpus("plus_int.smt2");
    o.require(sys.adts.empty(), "instance has datatypes");
    SolveResult r = timed_solve(sys, o, wall);
    sat_with_model(r, o);
    o.require(r.iterations == 0, "integer system needed refinement");
    if (o.pass) o.detail = "sat, " + fmt(wall);
    return o;
}

Outcome criterion4() {
    Outcome o;
    double wall = 0;
    ChcSystem sys = corpus("plusnat_unsat.smt2");
    SolveResult r = timed_solve(sys, o, wall);
    o.require(r.verdict == Verdict::Unsat, std::string("verdict ") + to_string(r.verdict) + " " + r.reason);
    if (!o.pass) return o;
    SmtResult f = feasibility(*r.counterexample, sys.adts, BackendConfig{}, 20);
    o.require(f.status == SmtStatus::Sat, "counterexample not satisfiable");
    o.require(eval_formula(r.counterexample->constraint, r.witness), "witness does not satisfy the counterexample");
    auto proof = internal_unfold_unsat(sys, ground_oracle(sys.adts), {4, 50000});
    o.require(proof.has_value(), "no unfolder refutation at depth 4");
    if (o.pass) o.detail = "unsat, counterexample satisfiable, unfolder refutation " + proof->to_string() + ", " + fmt(wall);
    return o;
}

Outcome criterion5() {
    Outcome o;
    double wall = 0;
    ChcSystem sys = corpus("s_eq_z.smt2");
    SolveResult r = timed_solve(sys, o, wall);
    sat_with_model(r, o);
    Catamorphism size = default_catamorphism(sys.adts);
    ChcSystem bare = preprocess(sys, false).system;
    ChcResult spurious = chc_check_sat(abstract_system(size, bare).system, BackendConfig{}, 30);
    o.require(spurious.status == ChcStatus::Unsat, "abstraction without admissibility not refuted");
    if (spurious.proof) {
        Counterexample theta = simplify(replay_proof(*spurious.proof, bare, abstract_system(size, bare).clause_map));
        o.require(feasibility(theta, sys.adts, BackendConfig{}, 20).status == SmtStatus::Unsat,
                  "refutation without admissibility is not spurious");
    }
    ChcSystem guarded = preprocess(sys, true).system;
    ChcResult fine = chc_check_sat(abstract_system(size, guarded).system, BackendConfig{}, 30);
    o.require(fine.status == ChcStatus::Sat, "abstraction with admissibility not sat");
    if (o.pass) o.detail = "sat; without admissibility the size abstraction is spuriously refuted, " + fmt(wall);
    return o;
}

// ---------------------------------------------------------------------------
// Worked examples

Outcome criterion6() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    ChcSystem sys = preprocess(corpus("plusnat.smt2")).system;
    // Goal, base PlusNat clause, base Lt clause; admissibility atoms closed by adm(Z).
    ResolutionProof p;
    p.goal = 4;
    p.steps = {{5, 0, true, {}}, {5, 0, true, {}}, {5, 0, true, {}}, {0, 0, false, {}},
               {5, 0, true, {}}, {2, 0, false, {}}, {5, 0, true, {}}};
    std::vector<std::size_t> ids(sys.clauses.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    Counterexample theta = simplify(replay_proof(p, sys, ids));
    const Formula& f = theta.constraint;
    bool shape = f.kind() == FormulaKind::Cmp && f.op() == CmpOp::EqAdt;
    if (shape) {
        auto zs = [](const Term& a, const Term& b) {
            return a.is_cons() && a.name() == "Z" && b.is_cons() && b.name() == "S" && b.args()[0].is_var();
        };
        shape = zs(f.lhs(), f.rhs()) || zs(f.rhs(), f.lhs());
    }
    o.require(shape, "counterexample is " + f.to_string());
    o.require(feasibility(theta, sys.adts, BackendConfig{}, 10).status == SmtStatus::Unsat, "counterexample feasible");
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < kUnitLimit, "took " + fmt(s));
    if (o.pass) o.detail = "counterexample " + f.to_string() + " infeasible, " + fmt(s);
    return o;
}

Outcome criterion7() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    AdtSignature sig = parse_system("(declare-datatypes ((ilist 0)) (((nil) (cons (head Int) (tail ilist)))))").adts;
    TemplateCatamorphism t = linear_template(sig, 1, Integer(1));
    Term l = Term::var("l", L);
    Term lhs = Term::cons("cons", L, {Term::lit(0), Term::cons("cons", L, {Term::lit(0), l})});
    ProofObligation ob{{{"l", L}}, Formula::negation(Formula::eq(lhs, Term::cons("nil", L)))};
    Formula enc = encode(ob.body, 1);
    ParamConstraint grounded{{reduce_ground(enc, t, {{"l", Term::cons("nil", L)}})}};
    // Θ = a(ad + c) + c ≠ d over the whole [-1,1] grid (a tail, b head, c constant of cons; d of nil).
    std::size_t points = 0;
    for (long a = -1; a <= 1; ++a)
        for (long b = -1; b <= 1; ++b)
            for (long c = -1; c <= 1; ++c)
                for (long d = -1; d <= 1; ++d) {
                    ParamAssignment m{{"p!cons!0!1", a}, {"p!cons!0!0", b}, {"p!cons!0!c", c}, {"p!nil!0!c", d}};
                    o.require(grounded.holds(m) == (a * (a * d + c) + c != d), "grounded constraint differs");
                    ++points;
                }
    ParamAssignment small{{"p!cons!0!1", 0}, {"p!cons!0!0", 0}, {"p!cons!0!c", 1}, {"p!nil!0!c", 0}};
    o.require(grounded.holds(small), "{a:0,b:0,c:1,d:0} is not a model");
    ParamAssignment zero{{"p!cons!0!1", 0}, {"p!cons!0!0", 0}, {"p!cons!0!c", 0}, {"p!nil!0!c", 0}};
    SynthResult r = synthesize({ob}, instantiate(t, zero), {}, t, sig, BackendConfig{}, {});
    o.require(r.status == SynthStatus::Refined, "synthesis did not refine: " + r.reason);
    o.require(r.theta.holds(r.assignment), "returned assignment violates Θ");
    o.require(r.theta.holds(small), "{a:0,b:0,c:1,d:0} rejected by the accumulated Θ");
    o.require(eval_formula(enc, {{"l", Term::cons("nil", L)}}, &r.cata), "returned catamorphism fails the obligation");
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < kUnitLimit, "took " + fmt(s));
    if (o.pass) o.detail = "Θ matches on all " + std::to_string(points) + " grid points, synthesis refined, " + fmt(s);
    return o;
}

// ---------------------------------------------------------------------------
// Property suites

Outcome criterion8() {
    Outcome o;
    Gen g(8);
    for (std::size_t i = 0; i < kCases && o.pass; ++i) {
        ChcSystem sys = augment_admissibility(g.system()).system;
        std::size_t degree = static_cast<std::size_t>(g.pick(1, 3));
        AbstractSystem abs = abstract_system(g.cata(degree), sys);
        for (const auto& d : abs.system.predicates)
            for (const auto& s : d.args) o.require(s.is_int(), "case " + std::to_string(i) + ": ADT argument of " + d.name);
        for (const auto& c : abs.system.clauses) {
            for (const auto& v : c.vars) o.require(v.sort.is_int(), "case " + std::to_string(i) + ": ADT variable");
            o.require(adt_free(c.constraint), "case " + std::to_string(i) + ": ADT constraint " + c.to_string());
            std::vector<Atom> atoms = c.body;
            if (c.head) atoms.push_back(*c.head);
            for (const auto& a : atoms)
                for (const auto& t : a.args) o.require(adt_free(t), "case " + std::to_string(i) + ": ADT argument");
        }
        for (const auto& d : sys.predicates) {
            std::size_t want = 0;
            for (const auto& s : d.args) want += s.is_adt() ? degree : 1;
            o.require(abs.system.find_predicate(d.name) && abs.system.find_predicate(d.name)->args.size() == want,
                      "case " + std::to_string(i) + ": arity of " + d.name);
        }
        try {
            check_sorts(abs.system);
        } catch (const Error& e) {
            o.require(false, "case " + std::to_string(i) + ": " + e.what());
        }
    }
    if (o.pass) o.detail = std::to_string(kCases) + " random systems, all abstractions ADT-free";
    return o;
}

Outcome criterion9() {
    Outcome o;
    Gen g(9);
    TermSampler sampler(g.adts, -8, 8, 8);
    for (std::size_t i = 0; i < kCases && o.pass; ++i) {
        std::size_t degree = static_cast<std::size_t>(g.pick(1, 3));
        Catamorphism cata = g.cata(degree);
        Term t = sampler.sample_up_to(g.coin() ? "nat" : "ilist", g.rng);
        o.require(term_size(t) <= 8, "oversized term");
        std::vector<Term> abs = abstract_term({}, cata, t);
        Tuple direct = eval_ground(cata, t);
        o.require(abs.size() == degree && direct.size() == degree, "degree mismatch");
        for (std::size_t k = 0; k < abs.size() && o.pass; ++k) {
            Term v = eval_term(abs[k], {});
            o.require(v.is_lit() && v.value() == direct[k], "case " + std::to_string(i) + ": " + t.to_string());
        }
    }
    if (o.pass) o.detail = std::to_string(kCases) + " ground terms (size <= 8, degrees 1-3) commute";
    return o;
}

Outcome criterion10() {
    Outcome o;
    Gen g(10);
    TermSampler sampler(g.adts, -4, 4, 5);
    std::vector<TypedVar> scope{{"l", L}, {"n", N}};
    for (std::size_t i = 0; i < kCases && o.pass; ++i) {
        std::size_t degree = static_cast<std::size_t>(g.pick(1, 3));
        std::vector<Formula> parts;
        for (long k = g.pick(1, 3); k > 0; --k) {
            Sort s = g.coin() ? N : L;
            Formula c = Formula::eq(g.term(s, scope, 3), g.term(s, scope, 3));
            parts.push_back(g.coin() ? Formula::negation(c) : c);
        }
        Formula phi = g.coin() ? Formula::conj(parts) : Formula::disj(parts);
        if (g.coin(0.3)) phi = Formula::negation(phi);
        TemplateCatamorphism t = linear_template(g.adts, degree, Integer(3));
        GroundEnv ground{{"l", sampler.sample_up_to("ilist", g.rng)}, {"n", sampler.sample_up_to("nat", g.rng)}};
        Formula enc = encode(phi, degree);
        ParamConstraint reduced{{reduce_ground(enc, t, ground)}};
        for (int trial = 0; trial < 4 && o.pass; ++trial) {
            ParamAssignment m = g.assignment(t);
            Catamorphism c = instantiate(t, m);
            o.require(reduced.holds(m) == eval_formula(enc, ground, &c), "case " + std::to_string(i) + ": " + phi.to_string());
        }
    }
    if (o.pass) o.detail = std::to_string(kCases) + " formulas x 4 assignments agree";
    return o;
}

// Domain for the simplify check: nat up to 5 nodes, Int in [-8,8], ilist up to 3 nodes with fields in [-2,2].
struct Domains {
    std::map<std::string, std::vector<Term>, std::less<>> by_sort;

    explicit Domains(const AdtSignature& adts) {
        by_sort["nat"] = enumerate_terms(adts, "nat", 5, -8, 8);
        by_sort["ilist"] = enumerate_terms(adts, "ilist", 3, -2, 2);
        for (long v = -8; v <= 8; ++v) by_sort["Int"].push_back(Term::lit(v));
    }
    const std::vector<Term>& of(const Sort& s) const { return by_sort.at(s.is_adt() ? s.name() : "Int"); }
};

template <class F>
void for_each_env(const VarSet& vars, const Domains& d, F&& f) {
    std::vector<std::pair<std::string, const std::vector<Term>*>> slots;
    for (const auto& [name, sort] : vars) slots.emplace_back(name, &d.of(sort));
    std::vector<std::size_t> idx(slots.size(), 0);
    GroundEnv env;
    for (;;) {
        for (std::size_t i = 0; i < slots.size(); ++i) env[slots[i].first] = (*slots[i].second)[idx[i]];
        if (!f(env)) return;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == slots[i].second->size()) idx[i++] = 0;
        if (i == idx.size()) return;
    }
}

// Extends an assignment of the surviving variables by evaluating defining equalities of the eliminated ones.
GroundEnv complete(const Formula& f, GroundEnv env, const VarSet& all, const Domains& d) {
    std::vector<Formula> parts = f.kind() == FormulaKind::And ? f.children() : std::vector<Formula>{f};
    std::set<std::string> defined;
    for (const auto& p : parts)
        if (p.kind() == FormulaKind::Cmp && (p.op() == CmpOp::Eq || p.op() == CmpOp::EqAdt))
            for (int side = 0; side < 2; ++side) {
                const Term& x = side ? p.rhs() : p.lhs();
                const Term& t = side ? p.lhs() : p.rhs();
                if (x.is_var() && !env.count(x.name()) && !free_vars(t).count(x.name())) defined.insert(x.name());
            }
    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& p : parts) {
            if (p.kind() != FormulaKind::Cmp || (p.op() != CmpOp::Eq && p.op() != CmpOp::EqAdt)) continue;
            for (int side = 0; side < 2; ++side) {
                const Term& x = side ? p.rhs() : p.lhs();
                const Term& t = side ? p.lhs() : p.rhs();
                if (!x.is_var() || env.count(x.name())) continue;
                bool ready = true;
                for (const auto& [v, _] : free_vars(t)) ready = ready && env.count(v);
                if (!ready) continue;
                env[x.name()] = eval_term(t, env);
                progress = true;
            }
        }
    }
    // Variables that are not defined by an equality are unconstrained: fix them and propagate again.
    for (const auto& [name, sort] : all) {
        if (env.count(name) || defined.count(name)) continue;
        env[name] = d.of(sort).front();
        return complete(f, std::move(env), all, d);
    }
    for (const auto& [name, sort] : all)
        if (!env.count(name)) env[name] = d.of(sort).front();
    return env;
}

Outcome criterion11() {
    Outcome o;
    Gen g(11);
    Domains dom(g.adts);
    std::size_t satisfiable = 0;
    for (std::size_t i = 0; i < kCases && o.pass; ++i) {
        // At most one list variable keeps the enumeration small.
        std::vector<TypedVar> scope;
        bool list_used = false;
        for (long k = g.pick(1, 3); k > 0; --k) {
            Sort s = g.sort();
            if (s == L && list_used) s = N;
            list_used = list_used || s == L;
            scope.push_back({"v" + std::to_string(k), s});
        }
        std::vector<Formula> parts;
        for (long k = g.pick(1, 4); k > 0; --k) {
            if (g.coin(0.5)) {
                const TypedVar& v = scope[g.pick(0, static_cast<long>(scope.size()) - 1)];
                parts.push_back(Formula::eq(Term::var(v.name, v.sort), g.term(v.sort, scope, 2, false)));
            } else if (g.coin(0.8)) {
                parts.push_back(g.comparison(scope, 2, false));
            } else {
                parts.push_back(Formula::disj({g.comparison(scope, 1, false), g.comparison(scope, 1, false)}));
            }
        }
        Formula f = Formula::conj(parts);
        Formula s = catalia::simplify(f);
        VarSet fv = free_vars(f), sv = free_vars(s);
        for (const auto& [v, _] : sv) o.require(fv.count(v) != 0, "simplify introduced variable " + v);
        bool f_sat = false, s_sat = false;
        // Every model of f is a model of the simplified formula.
        for_each_env(fv, dom, [&](const GroundEnv& env) {
            if (!eval_formula(f, env)) return true;
            f_sat = true;
            o.require(eval_formula(s, env), "case " + std::to_string(i) + ": model of " + f.to_string() + " lost by " +
                                                s.to_string());
            return o.pass;
        });
        // Every model of the simplified formula extends to a model of f.
        for_each_env(sv, dom, [&](const GroundEnv& env) {
            if (!eval_formula(s, env)) return true;
            s_sat = true;
            GroundEnv full = complete(f, env, fv, dom);
            o.require(eval_formula(f, full), "case " + std::to_string(i) + ": " + s.to_string() +
                                                 " has a model not extending to " + f.to_string());
            return o.pass;
        });
        if (f_sat) o.require(s_sat, "case " + std::to_string(i) + ": satisfiability changed");
        satisfiable += f_sat;
    }
    if (o.pass)
        o.detail = std::to_string(kCases) + " formulas (" + std::to_string(satisfiable) + " satisfiable in the domain) equisatisfiable";
    return o;
}

// Valid obligation: forall tail. not (p1 ++ tail = p2 ++ tail) with different prefixes.
ProofObligation random_obligation(Gen& g) {
    bool var_tail = g.coin(0.7);
    if (g.coin()) {
        Term n = Term::var("n", N);
        Term base = var_tail ? n : Term::cons("Z", N);
        long a = g.pick(0, 3), b = g.pick(0, 3);
        if (a == b) b = a + 1;
        ProofObligation ob{{}, Formula::negation(Formula::eq(nat_term(static_cast<int>(a), base), nat_term(static_cast<int>(b), base)))};
        if (var_tail) ob.vars.push_back({"n", N});
        return ob;
    }
    Term l = Term::var("l", L);
    Term base = var_tail ? l : Term::cons("nil", L);
    std::vector<long> p1, p2;
    for (long k = g.pick(0, 2); k > 0; --k) p1.push_back(g.pick(-2, 2));
    for (long k = g.pick(0, 2); k > 0; --k) p2.push_back(g.pick(-2, 2));
    if (p1 == p2) p2.push_back(g.pick(-2, 2));
    auto build = [&](const std::vector<long>& p) {
        Term t = base;
        for (auto it = p.rbegin(); it != p.rend(); ++it) t = Term::cons("cons", L, {Term::lit(*it), t});
        return t;
    };
    ProofObligation ob{{}, Formula::negation(Formula::eq(build(p1), build(p2)))};
    if (var_tail) ob.vars.push_back({"l", L});
    return ob;
}

Outcome criterion12() {
    Outcome o;
    Gen g(12);
    BackendConfig offline;
    offline.executable = "/nonexistent/catalia-backend";
    std::size_t refined = 0, exhausted = 0, stuck = 0, refutations = 0;
    constexpr std::size_t kWithBackend = 25;
    for (std::size_t i = 0; i < kCases + kWithBackend && o.pass; ++i) {
        std::vector<ProofObligation> S;
        for (long k = g.pick(1, 2); k > 0; --k) S.push_back(random_obligation(g));
        std::size_t degree = static_cast<std::size_t>(g.pick(1, 2));
        TemplateCatamorphism t = linear_template(g.adts, degree, Integer(g.pick(1, 2)));
        ParamAssignment zero;
        for (const auto& p : t.params) zero[p.name] = 0;
        SynthConfig sc;
        sc.seed = i;
        sc.parallel_grid = false;
        SynthResult r = synthesize(S, instantiate(t, zero), {}, t, g.adts, i < kCases ? offline : BackendConfig{}, sc, zero);
        std::string tag = "case " + std::to_string(i) + ": ";
        for (const auto& m : r.refuted) o.require(!r.theta.holds(m), tag + "refuted assignment satisfies Θ");
        refutations += r.refuted.size();
        switch (r.status) {
            case SynthStatus::Refined:
                ++refined;
                o.require(r.iterations >= 1, tag + "refined without an iteration");
                o.require(r.theta.holds(r.assignment), tag + "returned assignment violates its own Θ");
                o.require(r.cata == instantiate(t, r.assignment), tag + "catamorphism does not match assignment");
                break;
            case SynthStatus::Exhausted:
                ++exhausted;
                o.require(!grid_search(r.theta, t).has_value(), tag + "exhausted but the grid has a model");
                break;
            case SynthStatus::Stuck: ++stuck; break;
        }
    }
    o.require(refined > kCases / 2, "only " + std::to_string(refined) + " refinements");
    if (o.pass)
        o.detail = std::to_string(kCases + kWithBackend) + " calls: " + std::to_string(refined) + " refined, " +
                   std::to_string(exhausted) + " exhausted, " + std::to_string(stuck) + " stuck; " +
                   std::to_string(refutations) + " refuted assignments all excluded";
    return o;
}

Outcome criterion13() {
    Outcome o;
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(CATALIA_CORPUS_DIR)) {
        if (e.path().extension() != ".smt2") continue;
        ++files;
        ChcSystem sys = parse_system_file(e.path().string());
        for (const ChcSystem& s : {sys, preprocess(sys).system}) {
            ChcSystem back = parse_system(print_system(s));
            o.require(alpha_equivalent(s, back), e.path().filename().string() + " does not round-trip");
        }
    }
    Gen g(13);
    for (std::size_t i = 0; i < kCases && o.pass; ++i) {
        ChcSystem sys = g.system();
        o.require(alpha_equivalent(sys, parse_system(print_system(sys))), "random system " + std::to_string(i));
    }
    if (o.pass) o.detail = std::to_string(files) + " corpus files (raw and preprocessed) and " + std::to_string(kCases) + " random systems round-trip";
    return o;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> criteria{
        {1, "nat addition system is sat", criterion1},
        {2, "even/odd list system is sat in ladder element 0", criterion2},
        {3, "integer-only addition system is sat", criterion3},
        {4, "addition with goal Lt(m, r) is unsat", criterion4},
        {5, "S(x) = Z: sat, spurious without admissibility", criterion5},
        {6, "replay of the zero-abstraction refutation", criterion6},
        {7, "encoder and grounding of the cons/nil obligation", criterion7},
        {8, "abstraction output is ADT-free", criterion8},
        {9, "abstraction commutes with evaluation", criterion9},
        {10, "reduce_ground agrees with direct evaluation", criterion10},
        {11, "simplify preserves satisfiability", criterion11},
        {12, "CEGIS progress", criterion12},
        {13, "parse/print round trip", criterion13},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << c.id << "  " << c.name << ": " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
