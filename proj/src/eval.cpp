#include "catalia/eval.hpp"

#include "catalia/error.hpp"
#include "catalia/term_ops.hpp"

#include <functional>

namespace catalia {

Term eval_term(const Term& t, const GroundEnv& env, const Catamorphism* cata) {
    switch (t.kind()) {
        case TermKind::Lit: return t;
        case TermKind::Var: {
            auto it = env.find(t.name());
            if (it == env.end()) throw NonGroundApplication("variable '" + t.name() + "' has no value");
            return it->second;
        }
        case TermKind::Cons: {
            if (t.args().empty()) return t;
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const auto& a : t.args()) args.push_back(eval_term(a, env, cata));
            return Term::cons(t.name(), t.sort(), std::move(args));
        }
        case TermKind::Arith: {
            Term a = eval_term(t.args()[0], env, cata);
            Term b = eval_term(t.args()[1], env, cata);
            return fold_arith(t.op(), a, b);
        }
        case TermKind::Select: {
            Term a = eval_term(t.args()[0], env, cata);
            if (a.name() != t.ctor())
                throw NonGroundApplication("selector '" + t.name() + "' applied to " + a.to_string());
            return a.args()[t.index()];
        }
        case TermKind::Cata: {
            if (!cata) throw MissingDefinition("catamorphism application without a catamorphism");
            Term a = eval_term(t.args()[0], env, cata);
            return Term::lit(eval_ground(*cata, a).at(t.index()));
        }
        case TermKind::Ite:
            return eval_formula(t.cond(), env, cata) ? eval_term(t.args()[0], env, cata)
                                                     : eval_term(t.args()[1], env, cata);
    }
    return t;
}

bool eval_formula(const Formula& f, const GroundEnv& env, const Catamorphism* cata) {
    switch (f.kind()) {
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::And:
            for (const auto& c : f.children())
                if (!eval_formula(c, env, cata)) return false;
            return true;
        case FormulaKind::Or:
            for (const auto& c : f.children())
                if (eval_formula(c, env, cata)) return true;
            return false;
        case FormulaKind::Not: return !eval_formula(f.body(), env, cata);
        case FormulaKind::Cmp: {
            Term a = eval_term(f.lhs(), env, cata);
            Term b = eval_term(f.rhs(), env, cata);
            switch (f.op()) {
                case CmpOp::Eq: return a.value() == b.value();
                case CmpOp::Ne: return a.value() != b.value();
                case CmpOp::Gt: return a.value() > b.value();
                case CmpOp::Le: return a.value() <= b.value();
                case CmpOp::EqAdt: return a == b;
                case CmpOp::NeAdt: return !(a == b);
            }
            return false;
        }
        case FormulaKind::Test: return eval_term(f.arg(), env, cata).name() == f.ctor();
        case FormulaKind::Exists:
        case FormulaKind::Forall: break;
    }
    throw UnsupportedFeature("cannot evaluate a quantified formula");
}

Integer uniform_below(const Integer& n, std::mt19937_64& rng) {
    if (n <= 1) return 0;
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    while (true) {
        Integer r = 0;
        std::size_t got = 0;
        while (got < bits) {
            r <<= 64;
            r += Integer(std::to_string(rng()));
            got += 64;
        }
        r >>= static_cast<mp_bitcnt_t>(got - bits);
        if (r < n) return r;
    }
}

TermSampler::TermSampler(const AdtSignature& adts, long int_lo, long int_hi, std::size_t max_size)
    : adts_(adts), lo_(int_lo), hi_(int_hi), max_size_(max_size) {
    const auto names = adts.adt_names();
    for (const auto& n : names) counts_[n] = std::vector<Integer>(max_size + 1, 0);
    for (std::size_t s = 1; s <= max_size; ++s)
        for (const auto& n : names) {
            Integer total = 0;
            for (const auto& ctor : adts.find_adt(n)->constructors) {
                std::vector<std::string> kids;
                for (const auto& f : ctor.fields)
                    if (f.sort.is_adt()) kids.push_back(f.sort.name());
                total += ways(kids, 0, s - 1);
            }
            counts_[n][s] = total;
        }
}

Integer TermSampler::ways(const std::vector<std::string>& kids, std::size_t from, std::size_t budget) const {
    if (from == kids.size()) return budget == 0 ? 1 : 0;
    Integer total = 0;
    const auto& c = counts_.find(kids[from])->second;
    for (std::size_t s = 1; s <= budget; ++s)
        if (c[s] != 0) total += c[s] * ways(kids, from + 1, budget - s);
    return total;
}

const Integer& TermSampler::count(const std::string& adt, std::size_t size) const {
    return counts_.at(adt).at(size);
}

Term TermSampler::sample_value(const Sort& s, std::mt19937_64& rng) const {
    if (s.is_adt()) return sample_up_to(s.name(), rng);
    std::uniform_int_distribution<long> d(lo_, hi_);
    return Term::lit(d(rng));
}

Term TermSampler::build(const std::string& adt, std::size_t size, std::mt19937_64& rng) const {
    const AdtDecl* decl = adts_.find_adt(adt);
    Integer r = uniform_below(count(adt, size), rng);
    for (const auto& ctor : decl->constructors) {
        std::vector<std::string> kids;
        for (const auto& f : ctor.fields)
            if (f.sort.is_adt()) kids.push_back(f.sort.name());
        Integer w = ways(kids, 0, size - 1);
        if (r >= w) {
            r -= w;
            continue;
        }
        // Split the remaining nodes among the children proportionally to the number of completions.
        std::vector<std::size_t> sizes;
        std::size_t budget = size - 1;
        for (std::size_t j = 0; j < kids.size(); ++j) {
            Integer total = ways(kids, j, budget);
            Integer pick = uniform_below(total, rng);
            const auto& c = counts_.at(kids[j]);
            for (std::size_t s = 1; s <= budget; ++s) {
                Integer here = c[s] == 0 ? Integer(0) : Integer(c[s] * ways(kids, j + 1, budget - s));
                if (pick < here) {
                    sizes.push_back(s);
                    budget -= s;
                    break;
                }
                pick -= here;
            }
        }
        std::vector<Term> args;
        std::size_t k = 0;
        std::uniform_int_distribution<long> d(lo_, hi_);
        for (const auto& f : ctor.fields) {
            if (f.sort.is_adt()) {
                args.push_back(build(f.sort.name(), sizes[k], rng));
                ++k;
            } else {
                args.push_back(Term::lit(d(rng)));
            }
        }
        return Term::cons(ctor.name, ctor.sort(), std::move(args));
    }
    throw Error("term sampler ran out of constructors");
}

std::optional<Term> TermSampler::sample(const std::string& adt, std::size_t size, std::mt19937_64& rng) const {
    if (size == 0 || size > max_size_ || count(adt, size) == 0) return std::nullopt;
    return build(adt, size, rng);
}

Term TermSampler::sample_up_to(const std::string& adt, std::mt19937_64& rng) const {
    std::vector<std::size_t> sizes;
    for (std::size_t s = 1; s <= max_size_; ++s)
        if (count(adt, s) != 0) sizes.push_back(s);
    if (sizes.empty()) throw Error("sort '" + adt + "' has no ground terms within the size bound");
    std::uniform_int_distribution<std::size_t> d(0, sizes.size() - 1);
    return build(adt, sizes[d(rng)], rng);
}

namespace {

void enumerate_exact(const AdtSignature& adts, const std::string& adt, std::size_t size, long lo, long hi,
                     std::map<std::pair<std::string, std::size_t>, std::vector<Term>>& memo);

const std::vector<Term>& exact(const AdtSignature& adts, const std::string& adt, std::size_t size, long lo, long hi,
                               std::map<std::pair<std::string, std::size_t>, std::vector<Term>>& memo) {
    auto key = std::make_pair(adt, size);
    if (!memo.count(key)) enumerate_exact(adts, adt, size, lo, hi, memo);
    return memo[key];
}

void enumerate_exact(const AdtSignature& adts, const std::string& adt, std::size_t size, long lo, long hi,
                     std::map<std::pair<std::string, std::size_t>, std::vector<Term>>& memo) {
    std::vector<Term> out;
    memo[{adt, size}] = {};
    if (size == 0) return;
    for (const auto& ctor : adts.find_adt(adt)->constructors) {
        // Depth-first over argument positions with the remaining node budget.
        std::vector<Term> args;
        std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t budget) {
            if (i == ctor.fields.size()) {
                if (budget == 0) out.push_back(Term::cons(ctor.name, ctor.sort(), args));
                return;
            }
            const Sort& s = ctor.fields[i].sort;
            if (s.is_int()) {
                for (long v = lo; v <= hi; ++v) {
                    args.push_back(Term::lit(v));
                    go(i + 1, budget);
                    args.pop_back();
                }
                return;
            }
            for (std::size_t k = 1; k <= budget; ++k) {
                const auto& sub = exact(adts, s.name(), k, lo, hi, memo);
                for (const auto& t : sub) {
                    args.push_back(t);
                    go(i + 1, budget - k);
                    args.pop_back();
                }
            }
        };
        go(0, size - 1);
    }
    memo[{adt, size}] = std::move(out);
}

} // namespace

std::vector<Term> enumerate_terms(const AdtSignature& adts, const std::string& adt, std::size_t max_size, long lo,
                                  long hi) {
    std::map<std::pair<std::string, std::size_t>, std::vector<Term>> memo;
    std::vector<Term> out;
    for (std::size_t s = 1; s <= max_size; ++s) {
        const auto& v = exact(adts, adt, s, lo, hi, memo);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

} // namespace catalia
