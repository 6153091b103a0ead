#include "catalia/abstraction.hpp"
#include "catalia/error.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/term_ops.hpp"
#include "test_systems.hpp"

#include <gtest/gtest.h>

using namespace catalia;
using namespace catalia::testing;

namespace {

Catamorphism cata_eo() {
    Catamorphism c;
    c.maps["nil"] = {"nil", {MapExpr::constant(0)}};
    c.maps["cons"] = {"cons", {MapExpr::sub(MapExpr::int_arg(0), MapExpr::child(1, 0))}};
    return c;
}

// Missing template parameters default to zero.
Catamorphism linear(const AdtSignature& sig, std::size_t degree, ParamAssignment given) {
    TemplateCatamorphism t = linear_template(sig, degree);
    for (const auto& p : t.params) given.try_emplace(p.name, 0);
    return instantiate(t, given);
}

bool all_int(const ChcSystem& s) {
    for (const auto& p : s.predicates)
        for (const auto& a : p.args)
            if (!a.is_int()) return false;
    for (const auto& c : s.clauses)
        for (const auto& v : free_vars(c))
            if (!v.second.is_int()) return false;
    return true;
}

PredicateDefinition def(const std::vector<std::string>& params, const std::string& body) {
    PredicateDefinition d;
    for (const auto& p : params) d.params.push_back({p, Sort::integer()});
    d.body = parse_formula(parse_sexprs(body).front(), d.params, AdtSignature{});
    return d;
}

AbstractModel plusnat_model() {
    AbstractModel m;
    m.defs["PlusNat"] = def({"m", "n", "r"}, "(= r (- (+ m n) 1))");
    m.defs["Lt"] = def({"m", "n"}, "(< m n)");
    return m;
}

} // namespace

TEST(Abstraction, CorpusBecomesAdtFree) {
    for (const char* name : {"plusnat.smt2", "list_len.smt2", "eo_sum.smt2", "tree_count.smt2", "selectors.smt2",
                             "diseq.smt2", "mutual.smt2"}) {
        ChcSystem sys = preprocess(corpus(name)).system;
        Catamorphism size = default_catamorphism(sys.adts);
        AbstractSystem abs = abstract_system(size, sys);
        EXPECT_TRUE(all_int(abs.system)) << name;
        EXPECT_NO_THROW(check_sorts(abs.system)) << name;
        ASSERT_EQ(abs.clause_map.size(), sys.clauses.size());
        for (std::size_t i = 0; i < abs.clause_map.size(); ++i) EXPECT_EQ(abs.clause_map[i], i);
    }
}

TEST(Abstraction, DegreeExpandsArity) {
    ChcSystem sys = corpus("plusnat.smt2");
    Catamorphism c = linear(sys.adts, 2, {});
    AbstractSystem abs = abstract_system(c, sys);
    EXPECT_EQ(abs.system.find_predicate("PlusNat")->args.size(), 6u);
    EXPECT_EQ(abs.system.clauses[1].vars.size(), 6u);
    EXPECT_EQ(abs.system.clauses[1].vars[0].name, "m!0");
    EXPECT_EQ(abs.system.clauses[1].vars[1].name, "m!1");
}

TEST(Abstraction, ConstructorEqualityUnderSize) {
    AdtSignature sig = nat_signature();
    Catamorphism size = default_catamorphism(sig);
    AbstractionEnv eta{{"x", {Term::var("x!0", Sort::integer())}}};
    Term x = Term::var("x", Sort::adt("nat"));
    Formula f = abstract_constraint(eta, size, Formula::eq(Term::cons("S", Sort::adt("nat"), {x}), nat(0)));
    // Satisfiable in the abstraction only when x!0 = 0, which no real nat has.
    GroundEnv env{{"x!0", Term::lit(0)}};
    EXPECT_TRUE(eval_formula(f, env));
    env["x!0"] = Term::lit(1);
    EXPECT_FALSE(eval_formula(f, env));
}

TEST(Abstraction, GenClauseUnderEvenOdd) {
    ChcSystem sys = corpus("eo_sum.smt2");
    Clause abs = abstract_clause(cata_eo(), sys.clauses[3]);
    ASSERT_TRUE(abs.head.has_value());
    EXPECT_EQ(abs.head->args[0].to_string(), "(- x (- (- x 1) l!0))");
    EXPECT_EQ(abs.body[0].args[0].to_string(), "l!0");
}

TEST(Abstraction, RejectsUnencodedFeatures) {
    ChcSystem sys = corpus("diseq.smt2");
    Catamorphism size = default_catamorphism(sys.adts);
    EXPECT_THROW(abstract_system(size, sys), UnsupportedFeature);
    ChcSystem sel = corpus("selectors.smt2");
    EXPECT_THROW(abstract_system(default_catamorphism(sel.adts), sel), UnsupportedFeature);
}

TEST(Abstraction, TermAbstractionCommutesWithEvaluation) {
    // For ground substitutions: eval(alpha(t)) under x!k := cata_k(x) equals cata(eval(t)).
    AdtSignature sig = list_signature();
    Catamorphism c = linear(sig, 2, {{"p!cons!0!0", 1}, {"p!cons!0!1", 1}, {"p!cons!1!0", -1},
                                                          {"p!cons!1!c", 3}, {"p!nil!1!c", 2}});
    TermSampler sampler(sig, -8, 8, 6);
    std::mt19937_64 rng(11);
    const Sort L = Sort::adt("ilist");
    Term x = Term::var("x", L), y = Term::var("y", L), n = Term::var("n", Sort::integer());
    std::vector<Term> shapes = {
        Term::cons("cons", L, {n, x}),
        Term::cons("cons", L, {Term::arith(ArithOp::Add, n, Term::lit(2)), Term::cons("cons", L, {n, y})}),
        Term::cons("cons", L, {Term::cata("ilist", 1, x), y}),
        x,
    };
    AbstractionEnv eta{{"x", {Term::var("x!0", Sort::integer()), Term::var("x!1", Sort::integer())}},
                       {"y", {Term::var("y!0", Sort::integer()), Term::var("y!1", Sort::integer())}}};
    for (int i = 0; i < 300; ++i) {
        GroundEnv g{{"x", sampler.sample_up_to("ilist", rng)},
                    {"y", sampler.sample_up_to("ilist", rng)},
                    {"n", sampler.sample_value(Sort::integer(), rng)}};
        GroundEnv a{{"n", g["n"]}};
        for (const char* v : {"x", "y"}) {
            Tuple t = eval_ground(c, g[v]);
            for (std::size_t k = 0; k < 2; ++k) a[std::string(v) + "!" + std::to_string(k)] = Term::lit(t[k]);
        }
        for (const auto& s : shapes) {
            Tuple want = eval_ground(c, eval_term(s, g, &c));
            auto got = abstract_term(eta, c, s);
            ASSERT_EQ(got.size(), 2u);
            for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(eval_term(got[k], a).value(), want[k]);
        }
    }
}

TEST(Abstraction, ConcretizedModelSatisfiesPlusNat) {
    ChcSystem sys = preprocess(corpus("plusnat.smt2")).system;
    Catamorphism size = default_catamorphism(sys.adts);
    AbstractModel m = plusnat_model();
    // The admissibility predicate holds for any value of size >= 1.
    m.defs[admissibility_pred_name("nat")] = def({"s"}, "(>= s 1)");
    ConcreteModel cm = concretize_model(m, size, sys);
    EXPECT_TRUE(cm.holds("PlusNat", {nat(2), nat(1), nat(3)}));
    EXPECT_FALSE(cm.holds("PlusNat", {nat(2), nat(1), nat(2)}));
    SampleConfig cfg;
    cfg.samples = 400;
    cfg.seed = 5;
    auto r = check_model_on_ground_instances(cm, sys, cfg);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.checked, sys.clauses.size() * cfg.samples);
    EXPECT_LT(r.vacuous, r.checked);
}

TEST(Abstraction, WrongModelIsCaught) {
    ChcSystem sys = corpus("plusnat.smt2");
    Catamorphism size = default_catamorphism(sys.adts);
    AbstractModel m = plusnat_model();
    m.defs["Lt"] = def({"m", "n"}, "(< (+ m 1) n)");
    ConcreteModel cm = concretize_model(m, size, sys);
    SampleConfig cfg;
    cfg.samples = 300;
    auto r = check_model_on_ground_instances(cm, sys, cfg);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violations.front().clause, 2u);
}

TEST(Abstraction, ParallelCheckMatchesSerial) {
    ChcSystem sys = corpus("plusnat.smt2");
    Catamorphism size = default_catamorphism(sys.adts);
    for (const char* lt : {"(< m n)", "(< (+ m 1) n)", "(> m 0)"}) {
        AbstractModel m = plusnat_model();
        m.defs["Lt"] = def({"m", "n"}, lt);
        ConcreteModel cm = concretize_model(m, size, sys);
        SampleConfig cfg;
        cfg.samples = 250;
        cfg.seed = 99;
        auto a = check_model_on_ground_instances(cm, sys, cfg);
        auto b = check_model_on_ground_instances_parallel(cm, sys, cfg);
        EXPECT_EQ(a.checked, b.checked);
        EXPECT_EQ(a.vacuous, b.vacuous);
        ASSERT_EQ(a.violations.size(), b.violations.size()) << lt;
        for (std::size_t i = 0; i < a.violations.size(); ++i) {
            EXPECT_EQ(a.violations[i].clause, b.violations[i].clause);
            EXPECT_EQ(a.violations[i].sample, b.violations[i].sample);
        }
    }
}

TEST(Abstraction, ModelPrintsAsSmtlib) {
    ChcSystem sys = corpus("plusnat.smt2");
    ConcreteModel cm = concretize_model(plusnat_model(), default_catamorphism(sys.adts), sys);
    std::string s = cm.to_smtlib();
    EXPECT_NE(s.find("(define-funs-rec ((cata!nat!0"), std::string::npos);
    EXPECT_NE(s.find("(define-fun Lt ((a!0 nat) (a!1 nat)) Bool (> (cata!nat!0 a!1) (cata!nat!0 a!0)))"),
              std::string::npos)
        << s;
}

TEST(Abstraction, MissingPredicateIsReported) {
    ChcSystem sys = corpus("plusnat.smt2");
    AbstractModel m = plusnat_model();
    m.defs.erase("Lt");
    EXPECT_THROW(concretize_model(m, default_catamorphism(sys.adts), sys), MissingDefinition);
}
