#pragma once

#include "catalia/ast.hpp"
#include "catalia/catamorphism.hpp"

#include <map>
#include <optional>
#include <random>
#include <vector>

namespace catalia {

/// Variable -> ground value (integer literal or ground constructor term).
using GroundEnv = std::map<std::string, Term, std::less<>>;

/// Normalizes a term under an environment to a literal or constructor term.
/// `cata` is needed only for catamorphism applications. Throws NonGroundApplication for unbound variables.
Term eval_term(const Term& t, const GroundEnv& env, const Catamorphism* cata = nullptr);
bool eval_formula(const Formula& f, const GroundEnv& env, const Catamorphism* cata = nullptr);

/// Uniform integer in [0, n) for n > 0.
Integer uniform_below(const Integer& n, std::mt19937_64& rng);

/// Random ground terms, uniform among terms of a given size (number of constructor nodes).
class TermSampler {
public:
    TermSampler(const AdtSignature& adts, long int_lo, long int_hi, std::size_t max_size);

    /// Number of distinct shapes (ignoring integer fields) of the sort with exactly `size` nodes.
    [[nodiscard]] const Integer& count(const std::string& adt, std::size_t size) const;
    /// Uniform among shapes of exactly `size` nodes; nullopt if there are none.
    std::optional<Term> sample(const std::string& adt, std::size_t size, std::mt19937_64& rng) const;
    /// Picks a size uniformly among the inhabited sizes 1..max_size, then a uniform term of that size.
    Term sample_up_to(const std::string& adt, std::mt19937_64& rng) const;
    /// Random value for a variable of the given sort.
    Term sample_value(const Sort& s, std::mt19937_64& rng) const;

    [[nodiscard]] std::size_t max_size() const { return max_size_; }

private:
    const AdtSignature& adts_;
    long lo_;
    long hi_;
    std::size_t max_size_;
    std::map<std::string, std::vector<Integer>, std::less<>> counts_;

    // Number of ways to split `budget` nodes among the ADT children starting at index `from`.
    Integer ways(const std::vector<std::string>& kids, std::size_t from, std::size_t budget) const;
    Term build(const std::string& adt, std::size_t size, std::mt19937_64& rng) const;
};

/// All ground terms of the sort with at most `max_size` nodes and integer fields in [lo, hi].
std::vector<Term> enumerate_terms(const AdtSignature& adts, const std::string& adt, std::size_t max_size, long lo,
                                  long hi);

} // namespace catalia
