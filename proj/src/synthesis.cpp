#include "catalia/synthesis.hpp"

#include "catalia/error.hpp"
#include "catalia/simplify.hpp"
#include "catalia/term_ops.hpp"

#include <algorithm>
#include <cmath>

namespace catalia {

std::string ProofObligation::to_string() const {
    std::string out = "(forall (";
    for (std::size_t i = 0; i < vars.size(); ++i)
        out += (i ? " (" : "(") + vars[i].name + " " + vars[i].sort.to_string() + ")";
    return out + ") " + body.to_string() + ")";
}

ProofObligation obligation_from(const Counterexample& cex) { return {cex.vars, negate(cex.constraint)}; }

Formula encode(const Formula& phi, std::size_t degree) {
    switch (phi.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Test: return phi;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : phi.children()) kids.push_back(encode(c, degree));
            return phi.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Not: return Formula::negation(encode(phi.body(), degree));
        case FormulaKind::Exists: return Formula::exists(phi.bound(), encode(phi.body(), degree));
        case FormulaKind::Forall: return Formula::forall(phi.bound(), encode(phi.body(), degree));
        case FormulaKind::Cmp: break;
    }
    if (phi.op() != CmpOp::EqAdt && phi.op() != CmpOp::NeAdt) return phi;
    const std::string& adt = phi.lhs().sort().name();
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < degree; ++k) {
        Term a = Term::cata(adt, k, phi.lhs()), b = Term::cata(adt, k, phi.rhs());
        parts.push_back(phi.op() == CmpOp::EqAdt ? Formula::eq(a, b) : Formula::ne(a, b));
    }
    return phi.op() == CmpOp::EqAdt ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
}

std::vector<Term> symbolic_value(const TemplateCatamorphism& tmpl, const Term& ground) {
    if (!ground.is_cons()) throw NonGroundApplication("catamorphism applied to " + ground.to_string());
    const StructureMap& m = tmpl.map_for(ground.name());
    std::vector<Term> args(ground.args().size());
    std::vector<std::vector<Term>> kids(ground.args().size());
    for (std::size_t i = 0; i < ground.args().size(); ++i) {
        const Term& a = ground.args()[i];
        if (a.sort().is_adt()) kids[i] = symbolic_value(tmpl, a);
        else args[i] = eval_term(a, {});
    }
    std::vector<Term> out;
    for (const auto& e : m.outputs) out.push_back(map_to_term(e, args, kids));
    return out;
}

namespace {

Formula unfold(const Formula& f, const TemplateCatamorphism& tmpl);

Term unfold(const Term& t, const TemplateCatamorphism& tmpl) {
    switch (t.kind()) {
        case TermKind::Var:
        case TermKind::Lit: return t;
        case TermKind::Cata: {
            Term g = eval_term(t.args()[0], {});
            return symbolic_value(tmpl, g).at(t.index());
        }
        case TermKind::Arith: return fold_arith(t.op(), unfold(t.args()[0], tmpl), unfold(t.args()[1], tmpl));
        case TermKind::Ite:
            return Term::ite(unfold(t.cond(), tmpl), unfold(t.args()[0], tmpl), unfold(t.args()[1], tmpl));
        case TermKind::Cons:
        case TermKind::Select: return eval_term(t, {});
    }
    return t;
}

Formula unfold(const Formula& f, const TemplateCatamorphism& tmpl) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return f;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(unfold(c, tmpl));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Not: return negate(unfold(f.body(), tmpl));
        case FormulaKind::Test: return Formula::boolean(eval_formula(f, {}));
        case FormulaKind::Cmp:
            if (f.op() == CmpOp::EqAdt || f.op() == CmpOp::NeAdt) return Formula::boolean(eval_formula(f, {}));
            return Formula::cmp(f.op(), unfold(f.lhs(), tmpl), unfold(f.rhs(), tmpl));
        case FormulaKind::Exists:
        case FormulaKind::Forall: break;
    }
    throw UnsupportedFeature("quantifier in a grounded obligation");
}

} // namespace

Formula reduce_ground(const Formula& encoded, const TemplateCatamorphism& tmpl, const GroundEnv& ground) {
    return fold_constants(unfold(substitute(encoded, ground), tmpl));
}

TestOutcome test_candidate(const ProofObligation& ob, const Catamorphism& cata, const AdtSignature& adts,
                           const BackendConfig& cfg, double timeout) {
    TestOutcome out;
    SmtQuery q{ob.vars, negate(encode(ob.body, cata.degree)), &adts, &cata, "ALL"};
    try {
        SmtResult r = smt_check_sat(q, cfg, timeout);
        switch (r.status) {
            case SmtStatus::Sat:
                out.verdict = TestVerdict::Counterexample;
                out.witness = std::move(r.assignment);
                return out;
            case SmtStatus::Unsat: out.verdict = TestVerdict::Valid; return out;
            default: break;
        }
    } catch (const BackendError&) {
    }
    out.verdict = TestVerdict::TimeoutAssumedValid;
    return out;
}

bool ParamConstraint::holds(const ParamAssignment& m) const {
    GroundEnv env;
    for (const auto& [k, v] : m) env.emplace(k, Term::lit(v));
    return eval_formula(formula(), env);
}

namespace {
constexpr std::uint64_t kDirectGrid = 200'000;
} // namespace

ThetaSolution solve_theta(const ParamConstraint& theta, const TemplateCatamorphism& tmpl, const BackendConfig& cfg,
                          double timeout, bool parallel_grid) {
    ThetaSolution out;
    auto search = [&] {
        std::optional<ParamAssignment> m = parallel_grid ? grid_search_parallel(theta, tmpl) : grid_search(theta, tmpl);
        out.status = m ? ThetaStatus::Sat : ThetaStatus::Unsat;
        if (m) out.model = std::move(*m);
        return out;
    };
    // Small grids are searched directly: the answer is the smallest point, and an empty grid is decisive.
    if (tmpl.space_size() && grid_points(theta, tmpl, kDirectGrid)) return search();
    std::vector<Formula> parts = theta.conjuncts;
    std::vector<TypedVar> vars;
    for (const auto& p : tmpl.params) {
        Term v = Term::var(p.name, Sort::integer());
        vars.push_back({p.name, Sort::integer()});
        if (p.lower) parts.push_back(Formula::le(Term::lit(*p.lower), v));
        if (p.upper) parts.push_back(Formula::le(v, Term::lit(*p.upper)));
    }
    SmtQuery q{vars, Formula::conj(parts), nullptr, nullptr, "NIA"};
    try {
        SmtResult r = smt_check_sat(q, cfg, timeout);
        if (r.status == SmtStatus::Unsat) {
            out.status = ThetaStatus::Unsat;
            return out;
        }
        if (r.status == SmtStatus::Sat) {
            for (const auto& p : tmpl.params) out.model[p.name] = r.assignment.at(p.name).value();
            out.status = ThetaStatus::Sat;
            return out;
        }
    } catch (const BackendError&) {
    }
    if (!tmpl.space_size() || !grid_points(theta, tmpl)) return out;
    return search();
}

namespace {

double seconds_left(const SynthConfig& s) {
    if (!s.deadline) return kNoTimeout;
    return std::chrono::duration<double>(*s.deadline - std::chrono::steady_clock::now()).count();
}

// Ground values falsifying the encoded body, by sampling.
std::optional<GroundEnv> sample_witness(const ProofObligation& ob, const Catamorphism& cata,
                                        const AdtSignature& adts, const SynthConfig& s) {
    TermSampler sampler(adts, -8, 8, 8);
    std::mt19937_64 rng(s.seed ^ 0x5eedULL);
    Formula enc = encode(ob.body, cata.degree);
    GroundEnv env;
    for (std::size_t i = 0; i < s.fallback_samples; ++i) {
        env.clear();
        for (const auto& v : ob.vars) env.emplace(v.name, sampler.sample_value(v.sort, rng));
        try {
            if (!eval_formula(enc, env, &cata)) return env;
        } catch (const NonGroundApplication&) {
        }
    }
    return std::nullopt;
}

} // namespace

SynthResult synthesize(const std::vector<ProofObligation>& obligations, const Catamorphism& current,
                       const ParamConstraint& theta, const TemplateCatamorphism& tmpl, const AdtSignature& adts,
                       const BackendConfig& cfg, const SynthConfig& scfg,
                       const std::optional<ParamAssignment>& current_assignment) {
    SynthResult res;
    res.cata = current;
    res.theta = theta;
    if (current_assignment) res.assignment = *current_assignment;

    // Strip the quantifier prefixes, renaming the obligations apart.
    NameSupply names;
    std::vector<ProofObligation> parts;
    ProofObligation all;
    for (const auto& ob : obligations) {
        ProofObligation r;
        Subst s;
        for (const auto& v : ob.vars) {
            TypedVar nv{names.fresh(v.name), v.sort};
            names.reserve(nv.name);
            s.insert_or_assign(v.name, Term::var(nv.name, nv.sort));
            r.vars.push_back(nv);
        }
        r.body = substitute(ob.body, s);
        all.vars.insert(all.vars.end(), r.vars.begin(), r.vars.end());
        parts.push_back(std::move(r));
    }
    std::vector<Formula> bodies;
    for (const auto& p : parts) bodies.push_back(p.body);
    all.body = Formula::conj(std::move(bodies));

    bool first = true;
    for (;;) {
        double left = seconds_left(scfg);
        if (left <= 0) {
            res.status = SynthStatus::Stuck;
            res.reason = "timeout";
            return res;
        }
        const double limit = (first || scfg.no_timeout) ? left : std::min(left, scfg.default_timeout);
        TestOutcome t = test_candidate(all, res.cata, adts, cfg, limit);
        if (t.verdict != TestVerdict::Counterexample && first) {
            if (auto w = sample_witness(all, res.cata, adts, scfg)) {
                t.verdict = TestVerdict::Counterexample;
                t.witness = std::move(*w);
            }
        }
        if (t.verdict != TestVerdict::Counterexample) {
            if (first) {
                res.status = SynthStatus::Stuck;
                res.reason = "no counterexample to the current catamorphism on the first test";
                return res;
            }
            res.status = SynthStatus::Refined;
            return res;
        }
        first = false;
        bool grew = false;
        for (const auto& p : parts) {
            Formula g;
            try {
                g = reduce_ground(encode(p.body, tmpl.degree), tmpl, t.witness);
            } catch (const NonGroundApplication&) {
                continue;  // selector on the wrong constructor: the witness says nothing here
            }
            if (g.is_true()) continue;
            if (std::find(res.theta.conjuncts.begin(), res.theta.conjuncts.end(), g) != res.theta.conjuncts.end())
                continue;
            res.theta.conjuncts.push_back(g);
            grew = true;
        }
        if (current_assignment || res.iterations > 0) res.refuted.push_back(res.assignment);
        if (!grew && res.iterations > 0) {
            res.status = SynthStatus::Stuck;
            res.reason = "test counterexample adds no parameter constraint";
            return res;
        }
        ++res.iterations;
        ThetaSolution sol = solve_theta(res.theta, tmpl, cfg, std::min(std::max(seconds_left(scfg), 0.1), cfg.timeout),
                                        scfg.parallel_grid);
        if (sol.status == ThetaStatus::Unsat) {
            res.status = SynthStatus::Exhausted;
            return res;
        }
        if (sol.status != ThetaStatus::Sat) {
            res.status = SynthStatus::Stuck;
            res.reason = "parameter constraint unresolved";
            return res;
        }
        res.assignment = sol.model;
        res.cata = instantiate(tmpl, sol.model);
    }
}

} // namespace catalia
