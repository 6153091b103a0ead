#include "catalia/catamorphism.hpp"
#include "catalia/error.hpp"
#include "catalia/eval.hpp"
#include "test_systems.hpp"

#include <gtest/gtest.h>

using namespace catalia;
using namespace catalia::testing;

namespace {

// Reference: length and sum of a list, by direct recursion.
Catamorphism length_sum() {
    Catamorphism c;
    c.degree = 2;
    c.maps["nil"] = {"nil", {MapExpr::constant(0), MapExpr::constant(0)}};
    c.maps["cons"] = {"cons",
                      {MapExpr::add(MapExpr::child(1, 0), MapExpr::constant(1)),
                       MapExpr::add(MapExpr::child(1, 1), MapExpr::int_arg(0))}};
    return c;
}

Catamorphism cata_eo() {
    Catamorphism c;
    c.maps["nil"] = {"nil", {MapExpr::constant(0)}};
    c.maps["cons"] = {"cons", {MapExpr::sub(MapExpr::int_arg(0), MapExpr::child(1, 0))}};
    return c;
}

} // namespace

TEST(Catamorphism, SizeOnNat) {
    Catamorphism size = default_catamorphism(nat_signature());
    EXPECT_EQ(eval_ground(size, nat(2)), Tuple{3});
    EXPECT_EQ(eval_ground(size, nat(0)), Tuple{1});
}

TEST(Catamorphism, SizeOnList) {
    Catamorphism size = default_catamorphism(list_signature());
    EXPECT_EQ(eval_ground(size, list({})), Tuple{1});
    EXPECT_EQ(eval_ground(size, list({5})), Tuple{2});
}

TEST(Catamorphism, LengthSumAndEvenOdd) {
    EXPECT_EQ(eval_ground(length_sum(), list({1, 2})), (Tuple{2, 3}));
    EXPECT_EQ(eval_ground(cata_eo(), list({3, 1})), Tuple{2});
}

TEST(Catamorphism, EvalIsCompositional) {
    // eval(C(a, t)) equals the structure map applied to eval(t).
    AdtSignature sig = list_signature();
    TermSampler sampler(sig, -16, 16, 8);
    std::mt19937_64 rng(7);
    Catamorphism c = length_sum();
    for (int i = 0; i < 200; ++i) {
        Term t = sampler.sample_up_to("ilist", rng);
        if (t.name() != "cons") continue;
        Tuple child = eval_ground(c, t.args()[1]);
        Tuple whole = eval_ground(c, t);
        EXPECT_EQ(whole[0], child[0] + 1);
        EXPECT_EQ(whole[1], child[1] + t.args()[0].value());
    }
}

TEST(Template, ListDegreeOne) {
    TemplateCatamorphism t = linear_template(list_signature(), 1);
    EXPECT_EQ(t.params.size(), 4u);
    EXPECT_FALSE(t.space_size().has_value());
    TemplateCatamorphism b = linear_template(list_signature(), 1, Integer(1));
    EXPECT_EQ(*b.space_size(), 81);
}

TEST(Template, NatDegreeOneAndListDegreeTwo) {
    EXPECT_EQ(linear_template(nat_signature(), 1).params.size(), 3u);
    TemplateCatamorphism t = linear_template(list_signature(), 2);
    EXPECT_EQ(t.params.size(), 8u);
    EXPECT_EQ(t.map_for("cons").outputs.size(), 2u);
}

TEST(Template, Ladder) {
    auto ladder = template_ladder(list_signature(), 6);
    ASSERT_EQ(ladder.size(), 6u);
    EXPECT_EQ(ladder[0].degree, 1u);
    EXPECT_EQ(*ladder[0].bound, 1);
    EXPECT_EQ(ladder[1].degree, 2u);
    EXPECT_EQ(ladder[2].degree, 3u);
    EXPECT_EQ(ladder[3].degree, 3u);
    EXPECT_EQ(*ladder[3].bound, 2);
    EXPECT_EQ(*ladder[4].bound, 4);
    EXPECT_EQ(*ladder[5].bound, 8);
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        auto prev = std::make_pair(ladder[i - 1].degree, *ladder[i - 1].bound);
        auto cur = std::make_pair(ladder[i].degree, *ladder[i].bound);
        EXPECT_LT(prev, cur);
    }
    EXPECT_EQ(template_ladder(list_signature(), 5).size(), 5u);
    EXPECT_EQ(ladder_element(list_signature(), 5, true).degree, 4u);
}

TEST(Template, InstantiateWorkedExample) {
    TemplateCatamorphism t = linear_template(list_signature(), 1, Integer(1));
    // cons: a*l + b*x + c with l at position 1, x at position 0; nil: d.
    ParamAssignment m{{"p!cons!0!1", 0}, {"p!cons!0!0", 0}, {"p!cons!0!c", 1}, {"p!nil!0!c", 0}};
    Catamorphism c = instantiate(t, m);
    EXPECT_EQ(eval_ground(c, list({})), Tuple{0});
    EXPECT_EQ(eval_ground(c, list({4, 5})), Tuple{1});
    EXPECT_EQ(c.map_for("cons").outputs[0], MapExpr::constant(1));
}

TEST(Template, InstantiateSize) {
    TemplateCatamorphism t = linear_template(nat_signature(), 1);
    Catamorphism c = instantiate(t, {{"p!Z!0!c", 0}, {"p!S!0!0", 1}, {"p!S!0!c", 1}});
    EXPECT_EQ(eval_ground(c, nat(3)), Tuple{3});
    EXPECT_EQ(c.map_for("S").outputs[0], MapExpr::add(MapExpr::child(0, 0), MapExpr::constant(1)));
}

TEST(Template, InstantiateCanonicalForm) {
    TemplateCatamorphism t = linear_template(list_signature(), 1, Integer(1));
    Catamorphism c = instantiate(t, {{"p!cons!0!1", -1}, {"p!cons!0!0", 1}, {"p!cons!0!c", 0}, {"p!nil!0!c", 0}});
    EXPECT_EQ(c.map_for("cons").outputs[0], MapExpr::sub(MapExpr::int_arg(0), MapExpr::child(1, 0)));
    EXPECT_EQ(eval_ground(c, list({3, 1})), Tuple{2});
}

TEST(Template, InstantiateZeroAndErrors) {
    TemplateCatamorphism t = linear_template(list_signature(), 1, Integer(1));
    ParamAssignment zero;
    for (const auto& p : t.params) zero[p.name] = 0;
    Catamorphism c = instantiate(t, zero);
    EXPECT_EQ(eval_ground(c, list({1, 2, 3})), Tuple{0});
    ParamAssignment big = zero;
    big["p!nil!0!c"] = 2;
    EXPECT_THROW(instantiate(t, big), OutOfBounds);
    zero.erase("p!nil!0!c");
    EXPECT_THROW(instantiate(t, zero), MissingParameter);
}

TEST(Template, InstantiateCommutesWithSymbolicEvaluation) {
    AdtSignature sig = nat_list_signature();
    TermSampler sampler(sig, -16, 16, 8);
    std::mt19937_64 rng(11);
    for (std::size_t degree = 1; degree <= 3; ++degree) {
        TemplateCatamorphism t = linear_template(sig, degree, Integer(3));
        for (int i = 0; i < 50; ++i) {
            ParamAssignment m;
            std::uniform_int_distribution<long> d(-3, 3);
            for (const auto& p : t.params) m[p.name] = d(rng);
            Catamorphism c = instantiate(t, m);
            Term term = sampler.sample_up_to(i % 2 ? "nat" : "ilist", rng);
            // Reference: evaluate the template's own maps with the parameter values.
            std::function<Tuple(const Term&)> ref = [&](const Term& x) {
                const auto& map = t.map_for(x.name());
                std::vector<Integer> ints(x.args().size());
                std::vector<Tuple> kids(x.args().size());
                for (std::size_t j = 0; j < x.args().size(); ++j) {
                    if (x.args()[j].sort().is_adt()) kids[j] = ref(x.args()[j]);
                    else ints[j] = x.args()[j].value();
                }
                Tuple out;
                for (const auto& e : map.outputs) out.push_back(eval_map(e, ints, kids, &m));
                return out;
            };
            EXPECT_EQ(eval_ground(c, term), ref(term));
        }
    }
}

TEST(Catamorphism, Definitions) {
    std::string defs = cata_definitions(default_catamorphism(nat_signature()), nat_signature());
    EXPECT_EQ(defs, "(define-funs-rec ((cata!nat!0 ((x nat)) Int)) ((ite ((_ is Z) x) 1 (+ 1 (cata!nat!0 (p x))))))\n");
}

TEST(Sampler, CountsAndEnumeration) {
    AdtSignature sig = nat_list_signature();
    TermSampler sampler(sig, -1, 1, 5);
    EXPECT_EQ(sampler.count("nat", 3), 1);
    EXPECT_EQ(sampler.count("ilist", 3), 1);
    EXPECT_EQ(enumerate_terms(sig, "ilist", 3, -1, 1).size(), 1u + 3u + 9u);
    EXPECT_EQ(enumerate_terms(sig, "nat", 4, 0, 0).size(), 4u);
    AdtSignature trees = parse_system("(declare-datatypes ((tree 0)) (((leaf) (node (l tree) (r tree)))))").adts;
    TermSampler ts(trees, 0, 0, 7);
    // Binary trees with k internal nodes: Catalan numbers; size = 2k+1 nodes.
    EXPECT_EQ(ts.count("tree", 7), 5);
    EXPECT_EQ(ts.count("tree", 6), 0);
    std::mt19937_64 rng(3);
    std::map<std::string, int> seen;
    for (int i = 0; i < 2000; ++i) seen[ts.sample("tree", 7, rng)->to_string()]++;
    EXPECT_EQ(seen.size(), 5u);
    for (const auto& [_, n] : seen) EXPECT_GT(n, 300);
}
