#include "catalia/abstraction.hpp"

#include "catalia/error.hpp"
#include "catalia/simplify.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/term_ops.hpp"

#include <omp.h>

#include <algorithm>

namespace catalia {

std::vector<Term> abstract_term(const AbstractionEnv& eta, const Catamorphism& cata, const Term& t) {
    switch (t.kind()) {
        case TermKind::Var: {
            if (!t.sort().is_adt()) return {t};
            auto it = eta.find(t.name());
            if (it == eta.end()) throw UnmappedVariable("ADT variable '" + t.name() + "' has no abstraction");
            return it->second;
        }
        case TermKind::Lit: return {t};
        case TermKind::Arith: {
            Term a = abstract_term(eta, cata, t.args()[0]).front();
            Term b = abstract_term(eta, cata, t.args()[1]).front();
            return {fold_arith(t.op(), a, b)};
        }
        case TermKind::Cons: {
            const StructureMap& m = cata.map_for(t.name());
            std::vector<Term> args(t.args().size());
            std::vector<std::vector<Term>> kids(t.args().size());
            for (std::size_t i = 0; i < t.args().size(); ++i) {
                if (t.args()[i].sort().is_adt()) kids[i] = abstract_term(eta, cata, t.args()[i]);
                else args[i] = abstract_term(eta, cata, t.args()[i]).front();
            }
            std::vector<Term> out;
            for (const auto& e : m.outputs) out.push_back(map_to_term(e, args, kids));
            return out;
        }
        case TermKind::Cata: return {abstract_term(eta, cata, t.args()[0]).at(t.index())};
        case TermKind::Ite: {
            Formula c = abstract_constraint(eta, cata, t.cond());
            auto a = abstract_term(eta, cata, t.args()[0]);
            auto b = abstract_term(eta, cata, t.args()[1]);
            std::vector<Term> out;
            for (std::size_t i = 0; i < a.size(); ++i) out.push_back(Term::ite(c, a[i], b[i]));
            return out;
        }
        case TermKind::Select: break;
    }
    throw UnsupportedFeature("selector application survives preprocessing: " + t.to_string());
}

Formula abstract_constraint(const AbstractionEnv& eta, const Catamorphism& cata, const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return f;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(abstract_constraint(eta, cata, c));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
        }
        case FormulaKind::Cmp: {
            auto a = abstract_term(eta, cata, f.lhs());
            auto b = abstract_term(eta, cata, f.rhs());
            if (f.op() == CmpOp::EqAdt) return pointwise_eq(a, b);
            if (f.op() == CmpOp::NeAdt)
                throw UnsupportedFeature("ADT disequality must be encoded before abstraction");
            return Formula::cmp(f.op(), a.front(), b.front());
        }
        case FormulaKind::Test: throw UnsupportedFeature("tester survives preprocessing: " + f.to_string());
        case FormulaKind::Not:
        case FormulaKind::Exists:
        case FormulaKind::Forall: break;
    }
    throw UnsupportedFeature("negation or quantifier in a clause constraint");
}

namespace {

Atom abstract_atom(const AbstractionEnv& eta, const Catamorphism& cata, const Atom& a) {
    Atom out{a.pred, {}};
    for (const auto& t : a.args)
        for (auto& x : abstract_term(eta, cata, t)) out.args.push_back(std::move(x));
    return out;
}

} // namespace

Clause abstract_clause(const Catamorphism& cata, const Clause& c, AbstractionEnv* env_out) {
    NameSupply names(clause_names(c));
    AbstractionEnv eta;
    Clause out;
    for (const auto& v : c.vars) {
        if (!v.sort.is_adt()) {
            out.vars.push_back(v);
            continue;
        }
        std::vector<Term> tuple;
        for (std::size_t k = 0; k < cata.degree; ++k) {
            TypedVar iv{names.fresh(v.name + "!" + std::to_string(k)), Sort::integer()};
            out.vars.push_back(iv);
            tuple.push_back(Term::var(iv.name, iv.sort));
        }
        eta.emplace(v.name, std::move(tuple));
    }
    if (c.head) out.head = abstract_atom(eta, cata, *c.head);
    out.constraint = abstract_constraint(eta, cata, c.constraint);
    for (const auto& a : c.body) out.body.push_back(abstract_atom(eta, cata, a));
    if (env_out) *env_out = std::move(eta);
    return out;
}

AbstractSystem abstract_system(const Catamorphism& cata, const ChcSystem& sys) {
    AbstractSystem out;
    out.system.source = sys.source;
    for (const auto& p : sys.predicates) {
        PredicateDecl d{p.name, {}};
        for (const auto& s : p.args) {
            const std::size_t n = s.is_adt() ? cata.degree : 1;
            for (std::size_t k = 0; k < n; ++k) d.args.push_back(Sort::integer());
        }
        out.system.predicates.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < sys.clauses.size(); ++i) {
        AbstractionEnv env;
        out.system.clauses.push_back(abstract_clause(cata, sys.clauses[i], &env));
        out.clause_map.push_back(i);
        out.envs.push_back(std::move(env));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Models

ConcreteModel concretize_model(const AbstractModel& model, const Catamorphism& cata, const ChcSystem& original) {
    ConcreteModel out;
    out.cata = cata;
    out.adts = original.adts;
    for (const auto& p : original.predicates) {
        auto it = model.defs.find(p.name);
        if (it == model.defs.end()) throw MissingDefinition("abstract model has no definition for '" + p.name + "'");
        const PredicateDefinition& abs = it->second;
        PredicateDefinition def;
        Subst s;
        std::size_t j = 0;
        for (std::size_t i = 0; i < p.args.size(); ++i) {
            TypedVar v{"a!" + std::to_string(i), p.args[i]};
            def.params.push_back(v);
            Term x = Term::var(v.name, v.sort);
            const std::size_t n = p.args[i].is_adt() ? cata.degree : 1;
            for (std::size_t k = 0; k < n; ++k, ++j) {
                if (j >= abs.params.size()) throw MissingDefinition("arity mismatch in model of '" + p.name + "'");
                s.insert_or_assign(abs.params[j].name, p.args[i].is_adt() ? Term::cata(p.args[i].name(), k, x) : x);
            }
        }
        if (j != abs.params.size()) throw MissingDefinition("arity mismatch in model of '" + p.name + "'");
        def.body = substitute(abs.body, s);
        out.defs.emplace(p.name, std::move(def));
    }
    return out;
}

bool ConcreteModel::holds(const std::string& pred, const std::vector<Term>& args) const {
    auto it = defs.find(pred);
    if (it == defs.end()) throw MissingDefinition("model has no definition for '" + pred + "'");
    GroundEnv env;
    for (std::size_t i = 0; i < args.size(); ++i) env.insert_or_assign(it->second.params[i].name, args[i]);
    return eval_formula(it->second.body, env, &cata);
}

std::string ConcreteModel::to_smtlib() const {
    std::string out = cata_definitions(cata, adts);
    for (const auto& [name, def] : defs) {
        out += "(define-fun " + quote_symbol(name) + " (";
        for (std::size_t i = 0; i < def.params.size(); ++i)
            out += (i ? " (" : "(") + quote_symbol(def.params[i].name) + " " + def.params[i].sort.to_string() + ")";
        out += ") Bool " + def.body.to_string() + ")\n";
    }
    return out;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct PreparedClause {
    Clause clause;
    std::size_t original;
};

std::vector<PreparedClause> prepare(const ChcSystem& sys) {
    std::vector<PreparedClause> out;
    for (std::size_t i = 0; i < sys.clauses.size(); ++i) out.push_back({propagate_equalities(sys.clauses[i]), i});
    return out;
}

enum class Outcome { Vacuous, Holds, Violated };

Outcome check_one(const ConcreteModel& model, const PreparedClause& pc, const TermSampler& sampler,
                  std::uint64_t seed, std::size_t sample, GroundEnv& env) {
    std::mt19937_64 rng(mix(seed ^ mix(pc.original * 1000003ULL + sample)));
    env.clear();
    for (const auto& v : pc.clause.vars) env.emplace(v.name, sampler.sample_value(v.sort, rng));
    const Clause& c = pc.clause;
    try {
        if (!eval_formula(c.constraint, env, &model.cata)) return Outcome::Vacuous;
        for (const auto& a : c.body) {
            std::vector<Term> args;
            for (const auto& t : a.args) args.push_back(eval_term(t, env, &model.cata));
            if (!model.holds(a.pred, args)) return Outcome::Vacuous;
        }
        if (!c.head) return Outcome::Violated;
        std::vector<Term> args;
        for (const auto& t : c.head->args) args.push_back(eval_term(t, env, &model.cata));
        return model.holds(c.head->pred, args) ? Outcome::Holds : Outcome::Violated;
    } catch (const NonGroundApplication&) {
        // A selector applied to the wrong constructor: unspecified value, skip the sample.
        return Outcome::Vacuous;
    }
}

} // namespace

ModelCheckReport check_model_on_ground_instances(const ConcreteModel& model, const ChcSystem& sys,
                                                 const SampleConfig& cfg) {
    TermSampler sampler(sys.adts, cfg.int_lo, cfg.int_hi, cfg.max_term_size);
    auto clauses = prepare(sys);
    ModelCheckReport report;
    GroundEnv env;
    for (const auto& pc : clauses)
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            Outcome o = check_one(model, pc, sampler, cfg.seed, s, env);
            ++report.checked;
            if (o == Outcome::Vacuous) ++report.vacuous;
            if (o == Outcome::Violated) report.violations.push_back({pc.original, s, env});
        }
    return report;
}

ModelCheckReport check_model_on_ground_instances_parallel(const ConcreteModel& model, const ChcSystem& sys,
                                                          const SampleConfig& cfg) {
    TermSampler sampler(sys.adts, cfg.int_lo, cfg.int_hi, cfg.max_term_size);
    auto clauses = prepare(sys);
    const long total = static_cast<long>(clauses.size() * cfg.samples);
    std::vector<Outcome> outcomes(static_cast<std::size_t>(total));
    std::vector<GroundEnv> witnesses(static_cast<std::size_t>(total));
#pragma omp parallel
    {
        GroundEnv env;
#pragma omp for schedule(dynamic, 64)
        for (long k = 0; k < total; ++k) {
            const auto& pc = clauses[static_cast<std::size_t>(k) / cfg.samples];
            const std::size_t s = static_cast<std::size_t>(k) % cfg.samples;
            outcomes[k] = check_one(model, pc, sampler, cfg.seed, s, env);
            if (outcomes[k] == Outcome::Violated) witnesses[k] = env;
        }
    }
    ModelCheckReport report;
    for (long k = 0; k < total; ++k) {
        ++report.checked;
        if (outcomes[k] == Outcome::Vacuous) ++report.vacuous;
        if (outcomes[k] == Outcome::Violated)
            report.violations.push_back({clauses[static_cast<std::size_t>(k) / cfg.samples].original,
                                         static_cast<std::size_t>(k) % cfg.samples, std::move(witnesses[k])});
    }
    return report;
}

} // namespace catalia
