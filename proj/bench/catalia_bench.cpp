// Serial reference vs OpenMP kernels: ground-instance model checking and the parameter grid.
#include "catalia/abstraction.hpp"
#include "catalia/eval.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace catalia;

namespace {

PredicateDefinition def(std::vector<std::string> params, const std::string& body) {
    PredicateDefinition d;
    std::vector<TypedVar> scope;
    for (auto& p : params) scope.push_back({p, Sort::integer()});
    d.params = scope;
    d.body = parse_formula(parse_sexprs(body).front(), scope, AdtSignature{});
    return d;
}

struct PlusNat {
    ChcSystem sys = preprocess(parse_system_file(CATALIA_CORPUS_DIR "/plusnat.smt2")).system;
    ConcreteModel model;

    PlusNat() {
        AbstractModel m;
        m.defs["PlusNat"] = def({"m", "n", "r"}, "(= r (- (+ m n) 1))");
        m.defs["Lt"] = def({"m", "n"}, "(< m n)");
        m.defs[admissibility_pred_name("nat")] = def({"s"}, "(>= s 1)");
        model = concretize_model(m, default_catamorphism(sys.adts), sys);
    }
};

const PlusNat& plusnat() {
    static const PlusNat p;
    return p;
}

SampleConfig sampling(benchmark::State& state) {
    SampleConfig sc;
    sc.samples = static_cast<std::size_t>(state.range(0));
    sc.max_term_size = 24;
    sc.seed = 1;
    return sc;
}

void BM_ModelCheckSerial(benchmark::State& state) {
    const auto& p = plusnat();
    SampleConfig sc = sampling(state);
    for (auto _ : state) benchmark::DoNotOptimize(check_model_on_ground_instances(p.model, p.sys, sc));
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(p.sys.clauses.size()));
}

void BM_ModelCheckParallel(benchmark::State& state) {
    const auto& p = plusnat();
    SampleConfig sc = sampling(state);
    for (auto _ : state) benchmark::DoNotOptimize(check_model_on_ground_instances_parallel(p.model, p.sys, sc));
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(p.sys.clauses.size()));
    state.counters["threads"] = omp_get_max_threads();
}

// An unsatisfiable Θ over a degree-2 list template: the search scans the whole grid.
struct Grid {
    TemplateCatamorphism tmpl;
    ParamConstraint theta;

    explicit Grid(long bound) {
        ChcSystem s = parse_system("(declare-datatypes ((ilist 0)) (((nil) (cons (head Int) (tail ilist)))))");
        tmpl = linear_template(s.adts, 2, Integer(bound));
        Term a = parse_term(parse_sexprs("(cons 1 (cons 2 nil))").front(), {}, s.adts);
        Term b = parse_term(parse_sexprs("(cons 3 nil)").front(), {}, s.adts);
        Term c = parse_term(parse_sexprs("(cons 2 (cons 1 nil))").front(), {}, s.adts);
        theta.conjuncts.push_back(reduce_ground(encode(Formula::ne(a, b), 2), tmpl, {}));
        theta.conjuncts.push_back(reduce_ground(encode(Formula::ne(a, c), 2), tmpl, {}));
        theta.conjuncts.push_back(reduce_ground(encode(Formula::eq(a, c), 2), tmpl, {}));
    }
};

void BM_GridSerial(benchmark::State& state) {
    Grid g(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_search(g.theta, g.tmpl));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(*grid_points(g.theta, g.tmpl)));
}

void BM_GridParallel(benchmark::State& state) {
    Grid g(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_search_parallel(g.theta, g.tmpl));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(*grid_points(g.theta, g.tmpl)));
    state.counters["threads"] = omp_get_max_threads();
}

} // namespace

BENCHMARK(BM_ModelCheckSerial)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelCheckParallel)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
