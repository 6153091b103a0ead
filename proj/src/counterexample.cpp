#include "catalia/counterexample.hpp"

#include "catalia/error.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/simplify.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/term_ops.hpp"

namespace catalia {

std::string Counterexample::to_smtlib(const AdtSignature& adts) const {
    SmtQuery q{vars, constraint, &adts, nullptr, "ALL"};
    return smt_script(q);
}

Counterexample replay_proof(const ResolutionProof& proof, const ChcSystem& original,
                            const std::vector<std::size_t>& clause_map) {
    auto map = [&](std::size_t id) {
        if (id >= clause_map.size()) throw ReplayMismatch("abstract clause " + std::to_string(id) + " is unmapped");
        return clause_map[id];
    };
    Counterexample cex;
    Resolvent r = start_resolvent(original, map(proof.goal));
    cex.provenance.push_back(map(proof.goal));
    for (const auto& s : proof.steps) {
        const std::size_t c = map(s.clause);
        if (s.position >= r.atoms.size()) throw ReplayMismatch("proof step past the open atoms");
        if (is_admissibility_pred(r.atoms[s.position].pred)) {
            r = skip_atom(r, original, s.position, c);
            continue;
        }
        r = resolve(r, original, s.position, c);
        cex.provenance.push_back(c);
    }
    if (!r.atoms.empty()) throw ReplayMismatch("replay leaves open atoms");
    cex.vars = r.vars;
    cex.constraint = Formula::conj(r.constraint);
    return cex;
}

Counterexample simplify(const Counterexample& cex) {
    Counterexample out;
    out.provenance = cex.provenance;
    out.constraint = simplify(cex.constraint);
    VarSet fv = free_vars(out.constraint);
    for (const auto& v : cex.vars)
        if (fv.count(v.name)) out.vars.push_back(v);
    return out;
}

SmtResult feasibility(const Counterexample& cex, const AdtSignature& adts, const BackendConfig& cfg, double timeout) {
    SmtQuery q{cex.vars, cex.constraint, &adts, nullptr, "ALL"};
    try {
        return smt_check_sat(q, cfg, timeout);
    } catch (const BackendError& e) {
        SmtResult r;
        r.reason = e.what();
        return r;
    }
}

} // namespace catalia
