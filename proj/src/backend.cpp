#include "catalia/backend.hpp"

#include "catalia/error.hpp"
#include "catalia/process.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/term_ops.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef CATALIA_DEFAULT_Z3
#define CATALIA_DEFAULT_Z3 ""
#endif

namespace catalia {

namespace {

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Response {
    std::string text;
    bool timed_out = false;
};

Response run(const BackendConfig& cfg, std::vector<std::string> args, const std::string& script, double timeout) {
    std::vector<std::string> argv{cfg.executable};
    argv.insert(argv.end(), args.begin(), args.end());
    const bool limited = std::isfinite(timeout) && timeout > 0;
    if (limited) argv.push_back("-T:" + std::to_string(static_cast<long>(std::ceil(timeout))));

    std::filesystem::path cached;
    if (!cfg.transcripts.empty()) {
        std::string key;
        for (std::size_t i = 1; i < argv.size(); ++i) key += argv[i] + " ";
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(key + "\n" + script)));
        cached = std::filesystem::path(cfg.transcripts) / (std::string(hex) + ".out");
        std::ifstream in(cached);
        if (in) {
            std::stringstream ss;
            ss << in.rdbuf();
            return {ss.str(), false};
        }
    }
    ProcessResult p = run_process(argv, script, limited ? timeout + 1 : 0);
    Response r{p.out, p.timed_out};
    if (!cached.empty() && !p.timed_out) {
        std::filesystem::create_directories(cached.parent_path());
        std::ofstream(cached) << "; " << p.err.size() << " bytes on stderr\n" << p.out;
    }
    return r;
}

const char* kChcOptions =
    "(set-option :fp.xform.slice false)\n"
    "(set-option :fp.xform.inline_linear false)\n"
    "(set-option :fp.xform.inline_eager false)\n"
    "(set-option :fp.xform.tail_simplifier_pve false)\n"
    "(set-option :fp.xform.coi false)\n"
    "(set-option :fp.xform.subsumption_checker false)\n"
    "(set-option :fp.xform.compress_unbound false)\n";

std::string first_word(const std::vector<SExpr>& items) {
    if (items.empty()) return {};
    if (items.front().is_symbol()) return items.front().text;
    return items.front().to_string();
}

AbstractModel parse_model(const std::vector<SExpr>& items, const ChcSystem& sys) {
    AbstractModel m;
    for (const auto& top : items) {
        if (!top.is_list()) continue;
        for (const auto& d : top.items) {
            if (!d.is_app("define-fun") || d.size() != 5 || !d[1].is_symbol() || !d[2].is_list()) continue;
            const PredicateDecl* p = sys.find_predicate(d[1].text);
            if (!p) continue;
            PredicateDefinition def;
            for (const auto& b : d[2].items) {
                if (!b.is_list() || b.size() != 2 || !b[1].is_symbol("Int"))
                    throw BackendModelUnsupported("unexpected parameter in model of " + p->name);
                def.params.push_back({b[0].text, Sort::integer()});
            }
            if (def.params.size() != p->args.size()) throw BackendModelUnsupported("arity mismatch for " + p->name);
            try {
                def.body = parse_formula(d[4], def.params, sys.adts);
            } catch (const Error& e) {
                throw BackendModelUnsupported("model of " + p->name + ": " + e.what());
            }
            m.defs.insert_or_assign(p->name, std::move(def));
        }
    }
    // Predicates the backend leaves out are empty.
    for (const auto& p : sys.predicates) {
        if (m.defs.count(p.name)) continue;
        PredicateDefinition def;
        for (std::size_t i = 0; i < p.args.size(); ++i) def.params.push_back({"x!" + std::to_string(i), Sort::integer()});
        def.body = Formula::bottom();
        m.defs.emplace(p.name, std::move(def));
    }
    return m;
}

} // namespace

BackendConfig::BackendConfig() : executable(*CATALIA_DEFAULT_Z3 ? CATALIA_DEFAULT_Z3 : "z3") {}

BackendConfig BackendConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read backend config '" + path + "'");
    BackendConfig c;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(path + ":" + std::to_string(n) + ": expected key=value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "executable") c.executable = value;
        else if (key == "chc-args") {
            c.chc_portfolio.clear();
            std::istringstream alts(value);
            for (std::string alt; std::getline(alts, alt, '|');) c.chc_portfolio.push_back(split_words(alt));
        } else if (key == "slice") c.slice = std::stod(value);
        else if (key == "smt-args") c.smt_args = split_words(value);
        else if (key == "timeout") c.timeout = std::stod(value);
        else if (key == "proofs") c.proofs = value == "true" || value == "1";
        else if (key == "unfold-depth") c.unfold_depth = std::stoul(value);
        else if (key == "transcripts") c.transcripts = value;
        else throw Error(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    }
    if (!(c.timeout > 0)) throw Error(path + ": timeout must be positive");
    return c;
}

void BackendConfig::apply_env() {
    if (const char* e = std::getenv("CATALIA_BACKEND"); e && *e) executable = e;
}

std::string chc_script(const ChcSystem& sys, bool proofs) {
    std::string s = "(set-logic HORN)\n";
    if (proofs) s += "(set-option :produce-proofs true)\n";
    s += kChcOptions;
    s += print_datatypes(sys.adts);
    for (const auto& p : sys.predicates) {
        s += "(declare-fun " + quote_symbol(p.name) + " (";
        for (std::size_t i = 0; i < p.args.size(); ++i) s += (i ? " " : "") + p.args[i].to_string();
        s += ") Bool)\n";
    }
    for (const auto& c : sys.clauses) s += print_clause(c) + "\n";
    s += "(check-sat)\n(get-model)\n";
    if (proofs) s += "(get-proof)\n";
    return s;
}

ChcResult chc_check_sat(const ChcSystem& sys, const BackendConfig& cfg, double timeout) {
    ChcResult r;
    if (cfg.chc_portfolio.empty()) throw BackendError("empty CHC portfolio");
    const std::string script = chc_script(sys, cfg.proofs);
    const auto start = std::chrono::steady_clock::now();
    Response resp;
    std::vector<SExpr> items;
    std::string w;
    for (std::size_t i = 0; i < cfg.chc_portfolio.size(); ++i) {
        const bool last = i + 1 == cfg.chc_portfolio.size();
        double left = timeout - std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (left <= 0) break;
        resp = run(cfg, cfg.chc_portfolio[i], script, last ? left : std::min(left, cfg.slice));
        if (resp.timed_out) {
            w = "timeout";
            continue;
        }
        try {
            items = parse_sexprs(resp.text);
        } catch (const ParseError& e) {
            throw ProtocolError(std::string("unreadable backend output: ") + e.what());
        }
        w = first_word(items);
        if (w == "sat" || w == "unsat") break;
    }
    if (w.empty()) w = "timeout";
    if (w == "sat") {
        try {
            r.model = parse_model({items.begin() + 1, items.end()}, sys);
            r.status = ChcStatus::Sat;
        } catch (const BackendModelUnsupported& e) {
            r.reason = e.what();
        }
        return r;
    }
    if (w == "unknown" || w == "timeout") {
        r.reason = w;
        return r;
    }
    if (w != "unsat") throw ProtocolError("unexpected backend answer: " + trim(resp.text).substr(0, 200));
    r.status = ChcStatus::Unsat;
    ConstraintOracle oracle = smt_oracle(sys.adts, cfg, std::min(cfg.timeout, 10.0));
    if (cfg.proofs) {
        try {
            r.proof = parse_proof(resp.text, sys, oracle);
            return r;
        } catch (const ProofParseError& e) {
            r.reason = e.what();
        } catch (const ReplayMismatch& e) {
            r.reason = e.what();
        }
    }
    UnfoldLimits lim;
    for (std::size_t d = 1; d <= cfg.unfold_depth && !r.proof; ++d) {
        lim.max_depth = d;
        r.proof = internal_unfold_unsat(sys, oracle, lim);
    }
    if (!r.proof) r.reason += (r.reason.empty() ? "" : "; ") + std::string("no refutation within unfolding depth");
    return r;
}

std::string smt_script(const SmtQuery& q) {
    std::string s;
    if (!q.logic.empty()) s += "(set-logic " + q.logic + ")\n";
    if (q.adts) s += print_datatypes(*q.adts);
    if (q.cata && q.adts) s += cata_definitions(*q.cata, *q.adts);
    VarSet vars;
    for (const auto& v : q.vars) vars.emplace(v.name, v.sort);
    for (const auto& [n, srt] : free_vars(q.constraint)) vars.emplace(n, srt);
    for (const auto& [n, srt] : vars) s += "(declare-const " + quote_symbol(n) + " " + srt.to_string() + ")\n";
    s += "(assert " + q.constraint.to_string() + ")\n(check-sat)\n";
    if (!vars.empty()) {
        s += "(get-value (";
        bool first = true;
        for (const auto& [n, srt] : vars) {
            s += (first ? "" : " ") + quote_symbol(n);
            first = false;
        }
        s += "))\n";
    }
    return s;
}

SmtResult smt_check_sat(const SmtQuery& q, const BackendConfig& cfg, double timeout) {
    SmtResult r;
    if (q.constraint.is_false()) {
        r.status = SmtStatus::Unsat;
        return r;
    }
    Response resp = run(cfg, cfg.smt_args, smt_script(q), timeout);
    if (resp.timed_out) {
        r.status = SmtStatus::Timeout;
        return r;
    }
    std::vector<SExpr> items;
    try {
        items = parse_sexprs(resp.text);
    } catch (const ParseError& e) {
        throw ProtocolError(std::string("unreadable backend output: ") + e.what());
    }
    const std::string w = first_word(items);
    if (w == "unsat") {
        r.status = SmtStatus::Unsat;
        return r;
    }
    if (w == "timeout") {
        r.status = SmtStatus::Timeout;
        return r;
    }
    if (w == "unknown") {
        r.reason = "unknown";
        return r;
    }
    if (w != "sat") throw ProtocolError("unexpected backend answer: " + trim(resp.text).substr(0, 200));
    VarSet vars;
    for (const auto& v : q.vars) vars.emplace(v.name, v.sort);
    for (const auto& [n, srt] : free_vars(q.constraint)) vars.emplace(n, srt);
    static const AdtSignature kEmpty;
    const AdtSignature& adts = q.adts ? *q.adts : kEmpty;
    if (!vars.empty()) {
        if (items.size() < 2 || !items[1].is_list()) throw ProtocolError("missing get-value response");
        for (const auto& pair : items[1].items) {
            if (!pair.is_list() || pair.size() != 2 || !pair[0].is_symbol())
                throw ProtocolError("malformed get-value entry " + pair.to_string());
            try {
                r.assignment.insert_or_assign(pair[0].text, eval_term(parse_term(pair[1], {}, adts), {}));
            } catch (const Error& e) {
                throw ProtocolError("cannot read value " + pair[1].to_string() + ": " + e.what());
            }
        }
        for (const auto& [n, srt] : vars)
            if (!r.assignment.count(n)) throw ProtocolError("no value for '" + n + "'");
    }
    r.status = SmtStatus::Sat;
    return r;
}

ConstraintOracle smt_oracle(const AdtSignature& adts, const BackendConfig& cfg, double timeout) {
    return [&adts, cfg, timeout](const std::vector<TypedVar>& vars, const Formula& f) {
        SmtQuery q{vars, f, &adts, nullptr, "ALL"};
        try {
            switch (smt_check_sat(q, cfg, timeout).status) {
                case SmtStatus::Sat: return OracleAnswer::Sat;
                case SmtStatus::Unsat: return OracleAnswer::Unsat;
                default: return OracleAnswer::Unknown;
            }
        } catch (const BackendError&) {
            return OracleAnswer::Unknown;
        }
    };
}

} // namespace catalia
