// Parameter-grid search over bounded templates: serial reference and OpenMP kernel.
#include "catalia/error.hpp"
#include "catalia/synthesis.hpp"
#include "catalia/term_ops.hpp"

#include <omp.h>

#include <atomic>
#include <limits>

namespace catalia {

namespace {

// Parameter constraint compiled to int64 arithmetic; overflow is reported, not wrapped.
class Compiled {
public:
    Compiled(const Formula& f, const std::vector<std::string>& vars) : vars_(vars) { root_ = formula(f); }

    /// 1 true, 0 false, -1 overflow.
    int eval(const std::int64_t* values) const {
        bool ovf = false;
        bool r = eval_f(root_, values, ovf);
        return ovf ? -1 : r;
    }

private:
    enum class Op : std::uint8_t { Lit, Var, Add, Sub, Mul, Div, Mod, Ite, True, False, And, Or, Not, Eq, Ne, Gt, Le };
    struct Node {
        Op op;
        std::int64_t value = 0;
        std::vector<int> kids;
    };
    std::vector<std::string> vars_;
    std::vector<Node> nodes_;
    int root_ = 0;

    int add(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    int term(const Term& t) {
        switch (t.kind()) {
            case TermKind::Lit:
                if (!t.value().fits_slong_p()) throw OutOfBounds("literal too large for the grid kernel");
                return add({Op::Lit, t.value().get_si(), {}});
            case TermKind::Var: {
                for (std::size_t i = 0; i < vars_.size(); ++i)
                    if (vars_[i] == t.name()) return add({Op::Var, static_cast<std::int64_t>(i), {}});
                throw UnmappedVariable("unknown parameter " + t.name());
            }
            case TermKind::Arith: {
                static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Mod};
                int a = term(t.args()[0]), b = term(t.args()[1]);
                return add({ops[static_cast<int>(t.op())], 0, {a, b}});
            }
            case TermKind::Ite: {
                int c = formula(t.cond()), a = term(t.args()[0]), b = term(t.args()[1]);
                return add({Op::Ite, 0, {c, a, b}});
            }
            default: throw UnsupportedFeature("non-arithmetic term in a parameter constraint");
        }
    }

    int formula(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True: return add({Op::True, 0, {}});
            case FormulaKind::False: return add({Op::False, 0, {}});
            case FormulaKind::And:
            case FormulaKind::Or: {
                Node n{f.kind() == FormulaKind::And ? Op::And : Op::Or, 0, {}};
                for (const auto& c : f.children()) n.kids.push_back(formula(c));
                return add(std::move(n));
            }
            case FormulaKind::Not: return add({Op::Not, 0, {formula(f.body())}});
            case FormulaKind::Cmp: {
                static const Op ops[] = {Op::Eq, Op::Ne, Op::Gt, Op::Le};
                if (f.op() == CmpOp::EqAdt || f.op() == CmpOp::NeAdt) break;
                int a = term(f.lhs()), b = term(f.rhs());
                return add({ops[static_cast<int>(f.op())], 0, {a, b}});
            }
            default: break;
        }
        throw UnsupportedFeature("unexpected formula in a parameter constraint");
    }

    std::int64_t eval_t(int i, const std::int64_t* v, bool& ovf) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        std::int64_t a, b, r = 0;
        switch (n.op) {
            case Op::Lit: return n.value;
            case Op::Var: return v[n.value];
            case Op::Ite: return eval_f(n.kids[0], v, ovf) ? eval_t(n.kids[1], v, ovf) : eval_t(n.kids[2], v, ovf);
            default: break;
        }
        a = eval_t(n.kids[0], v, ovf);
        b = eval_t(n.kids[1], v, ovf);
        switch (n.op) {
            case Op::Add: ovf |= __builtin_add_overflow(a, b, &r); return r;
            case Op::Sub: ovf |= __builtin_sub_overflow(a, b, &r); return r;
            case Op::Mul: ovf |= __builtin_mul_overflow(a, b, &r); return r;
            case Op::Div:
            case Op::Mod: {
                if (b == 0) return n.op == Op::Div ? 0 : a;
                if (b == -1 && a == std::numeric_limits<std::int64_t>::min()) {
                    ovf = true;
                    return 0;
                }
                std::int64_t q = a / b, m = a % b;
                if (m < 0) {
                    m += b < 0 ? -b : b;
                    q += b < 0 ? 1 : -1;
                }
                return n.op == Op::Div ? q : m;
            }
            default: return 0;
        }
    }

    bool eval_f(int i, const std::int64_t* v, bool& ovf) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::And:
                for (int k : n.kids)
                    if (!eval_f(k, v, ovf)) return false;
                return true;
            case Op::Or:
                for (int k : n.kids)
                    if (eval_f(k, v, ovf)) return true;
                return false;
            case Op::Not: return !eval_f(n.kids[0], v, ovf);
            default: break;
        }
        std::int64_t a = eval_t(n.kids[0], v, ovf), b = eval_t(n.kids[1], v, ovf);
        switch (n.op) {
            case Op::Eq: return a == b;
            case Op::Ne: return a != b;
            case Op::Gt: return a > b;
            case Op::Le: return a <= b;
            default: return false;
        }
    }
};

// The grid over the parameters that occur in the constraint; the rest stay at their first value.
struct Grid {
    std::vector<std::string> names;
    std::vector<std::vector<std::int64_t>> values;
    std::uint64_t points = 1;
    bool too_large = false;
    ParamAssignment base;
};

// Values in the order 0, 1, -1, 2, -2, ... clipped to the bounds.
std::vector<std::int64_t> value_order(const ParamDecl& p) {
    const std::int64_t lo = p.lower->get_si(), hi = p.upper->get_si();
    std::vector<std::int64_t> out;
    if (lo <= 0 && 0 <= hi) out.push_back(0);
    for (std::int64_t k = 1; static_cast<std::int64_t>(out.size()) < hi - lo + 1; ++k) {
        if (k <= hi && k >= lo) out.push_back(k);
        if (-k >= lo && -k <= hi) out.push_back(-k);
        if (k > hi && -k < lo) break;
    }
    if (out.empty())
        for (std::int64_t k = lo; k <= hi; ++k) out.push_back(k);
    return out;
}

Grid make_grid(const ParamConstraint& theta, const TemplateCatamorphism& tmpl, std::uint64_t max_points) {
    Grid g;
    VarSet used = free_vars(theta.formula());
    for (const auto& p : tmpl.params) {
        if (!p.lower || !p.upper) throw OutOfBounds("grid search needs a bounded template");
        auto vals = value_order(p);
        g.base[p.name] = vals.front();
        if (!used.count(p.name)) continue;
        g.names.push_back(p.name);
        if (g.points > max_points / vals.size()) g.too_large = true;
        else g.points *= vals.size();
        g.values.push_back(std::move(vals));
    }
    return g;
}

void decode(const Grid& g, std::uint64_t index, std::int64_t* out) {
    for (std::size_t i = g.names.size(); i-- > 0;) {
        const auto w = g.values[i].size();
        out[i] = g.values[i][index % w];
        index /= w;
    }
}

bool check_point(const Compiled& c, const ParamConstraint& theta, const Grid& g, const std::int64_t* v) {
    int r = c.eval(v);
    if (r >= 0) return r == 1;
    ParamAssignment m = g.base;
    for (std::size_t i = 0; i < g.names.size(); ++i) m[g.names[i]] = v[i];
    return theta.holds(m);
}

ParamAssignment assignment_at(const Grid& g, std::uint64_t index) {
    ParamAssignment m = g.base;
    std::vector<std::int64_t> v(g.names.size());
    decode(g, index, v.data());
    for (std::size_t i = 0; i < g.names.size(); ++i) m[g.names[i]] = v[i];
    return m;
}

} // namespace

std::optional<std::uint64_t> grid_points(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                         std::uint64_t max_points) {
    Grid g = make_grid(theta, tmpl, max_points);
    if (g.too_large) return std::nullopt;
    return g.points;
}

std::optional<ParamAssignment> grid_search(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                           std::uint64_t max_points) {
    Grid g = make_grid(theta, tmpl, max_points);
    if (g.too_large) return std::nullopt;
    Compiled c(theta.formula(), g.names);
    std::vector<std::int64_t> v(g.names.size() + 1);
    for (std::uint64_t i = 0; i < g.points; ++i) {
        decode(g, i, v.data());
        if (check_point(c, theta, g, v.data())) return assignment_at(g, i);
    }
    return std::nullopt;
}

std::optional<ParamAssignment> grid_search_parallel(const ParamConstraint& theta, const TemplateCatamorphism& tmpl,
                                                    std::uint64_t max_points) {
    Grid g = make_grid(theta, tmpl, max_points);
    if (g.too_large) return std::nullopt;
    Compiled c(theta.formula(), g.names);
    const std::uint64_t none = std::numeric_limits<std::uint64_t>::max();
    std::atomic<std::uint64_t> best{none};
    const auto total = static_cast<std::int64_t>(g.points);
#pragma omp parallel
    {
        std::vector<std::int64_t> v(g.names.size() + 1);
#pragma omp for schedule(dynamic, 4096)
        for (std::int64_t k = 0; k < total; ++k) {
            const auto i = static_cast<std::uint64_t>(k);
            if (i >= best.load(std::memory_order_relaxed)) continue;
            decode(g, i, v.data());
            if (!check_point(c, theta, g, v.data())) continue;
            std::uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
        }
    }
    if (best == none) return std::nullopt;
    return assignment_at(g, best);
}

} // namespace catalia
