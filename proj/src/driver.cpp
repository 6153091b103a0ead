#include "catalia/driver.hpp"

#include "catalia/error.hpp"
#include "catalia/preprocess.hpp"
#include "catalia/smtlib.hpp"
#include "catalia/synthesis.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace catalia {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Sat: return "sat";
        case Verdict::Unsat: return "unsat";
        case Verdict::Unknown: break;
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

struct Solver {
    explicit Solver(const SolveConfig& c) : cfg(c) {}

    const SolveConfig& cfg;
    Clock::time_point start = Clock::now();
    Clock::time_point deadline = start + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(cfg.timeout));
    SolveResult res;

    double left() const { return std::chrono::duration<double>(deadline - Clock::now()).count(); }
    double call_budget() const { return std::max(0.05, std::min(left(), cfg.backend.timeout)); }

    template <typename... Args>
    void log(const Args&... args) const {
        if (!cfg.log) return;
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << "[" << (cfg.timeout - left()) << "s] ";
        (s << ... << args);
        *cfg.log << s.str() << "\n";
    }

    SolveResult& unknown(std::string why) {
        res.verdict = Verdict::Unknown;
        res.reason = std::move(why);
        return res;
    }

    void dump(const Counterexample& theta, const AdtSignature& adts) const {
        if (cfg.dump_cex.empty()) return;
        std::filesystem::create_directories(cfg.dump_cex);
        std::ofstream(std::filesystem::path(cfg.dump_cex) / ("cex_" + std::to_string(res.iterations) + ".smt2"))
            << "; counterexample of iteration " << res.iterations << "\n"
            << theta.to_smtlib(adts);
    }

    // One abstraction-check round. Returns true when a verdict (or a hard stop) was reached.
    enum class Round { Done, Spurious, FeasibilityUnknown };

    Round round(const ChcSystem& P, const Catamorphism& C, Counterexample& theta_out) {
        AbstractSystem abs = abstract_system(C, P);
        ChcResult r = chc_check_sat(abs.system, cfg.backend, call_budget());
        if (r.status == ChcStatus::Sat) {
            ConcreteModel cm = concretize_model(r.model, C, P);
            SampleConfig sc;
            sc.samples = cfg.samples;
            sc.seed = cfg.seed;
            res.model_check = check_model_on_ground_instances_parallel(cm, P, sc);
            if (!res.model_check.ok()) {
                unknown("backend-failure: model fails " + std::to_string(res.model_check.violations.size()) +
                        " sampled ground instances");
                return Round::Done;
            }
            res.verdict = Verdict::Sat;
            res.model = std::move(cm);
            res.cata = C;
            return Round::Done;
        }
        if (r.status == ChcStatus::Unknown) {
            unknown(left() <= 0 || r.reason == "timeout" ? "timeout" : "backend-failure: " + r.reason);
            return Round::Done;
        }
        if (!r.proof) {
            unknown("backend-failure: no refutation recovered (" + r.reason + ")");
            return Round::Done;
        }
        res.proof = r.proof;
        Counterexample theta = simplify(replay_proof(*r.proof, P, abs.clause_map));
        dump(theta, P.adts);
        log("counterexample: ", theta.constraint.to_string());
        SmtResult f = feasibility(theta, P.adts, cfg.backend, call_budget());
        if (f.status == SmtStatus::Sat) {
            res.verdict = Verdict::Unsat;
            res.counterexample = theta;
            res.witness = std::move(f.assignment);
            res.cata = C;
            return Round::Done;
        }
        theta_out = std::move(theta);
        return f.status == SmtStatus::Unsat ? Round::Spurious : Round::FeasibilityUnknown;
    }

    SolveResult run(const ChcSystem& sys) {
        ChcSystem P = preprocess(sys, cfg.admissibility).system;
        Catamorphism C = default_catamorphism(P.adts);
        std::optional<ParamAssignment> assignment;
        std::size_t assignment_template = 0;
        std::vector<ProofObligation> S;
        std::set<std::string> seen;
        std::vector<TemplateCatamorphism> ladder = template_ladder(P.adts, P.adts.empty() ? 1 : cfg.ladder_cap,
                                                                   cfg.raise_degree);
        for (std::size_t ti = 0; ti < ladder.size(); ++ti) {
            const TemplateCatamorphism& T = ladder[ti];
            res.template_index = ti;
            log("template ", ti, ": ", T.describe());
            ParamConstraint theta;
            std::size_t feas_unknown = 0;
            for (;;) {
                if (left() <= 0) return finish(P, unknown("timeout"));
                Counterexample cex;
                Round rd;
                try {
                    rd = round(P, C, cex);
                } catch (const BackendError& e) {
                    return finish(P, unknown(std::string("backend-failure: ") + e.what()));
                }
                if (rd == Round::Done) return finish(P, res);
                if (!seen.insert(cex.constraint.to_string()).second) ++res.repeated_counterexamples;
                if (rd == Round::FeasibilityUnknown && ++feas_unknown > cfg.max_unknown_feasibility) break;
                if (P.adts.empty()) return finish(P, unknown("backend-failure: refutation of an integer system is infeasible"));
                S.push_back(obligation_from(cex));
                SynthConfig sc;
                sc.default_timeout = cfg.default_test_timeout;
                sc.no_timeout = cfg.no_timeout;
                sc.seed = cfg.seed;
                sc.deadline = deadline;
                std::optional<ParamAssignment> cur;
                if (assignment && assignment_template == ti) cur = assignment;
                SynthResult sr = synthesize(S, C, theta, T, P.adts, cfg.backend, sc, cur);
                ++res.iterations;
                res.trace.push_back({ti, S.size(), sr.theta.conjuncts.size()});
                if (sr.status != SynthStatus::Refined) {
                    log("synthesis ", sr.status == SynthStatus::Exhausted ? "exhausted" : "stuck", " ", sr.reason);
                    break;
                }
                C = sr.cata;
                theta = sr.theta;
                assignment = sr.assignment;
                assignment_template = ti;
                log("catamorphism: ", C.to_string(P.adts));
            }
        }
        return finish(P, unknown(left() <= 0 ? "timeout" : "ladder-exhausted"));
    }

    SolveResult finish(ChcSystem& P, SolveResult& r) {
        r.preprocessed = std::move(P);
        r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return std::move(r);
    }
};

} // namespace

SolveResult solve(const ChcSystem& sys, const SolveConfig& cfg) {
    if (!(cfg.timeout > 0)) throw Error("timeout must be positive");
    Solver s(cfg);
    return s.run(sys);
}

std::vector<BenchRow> benchmark_run(const std::string& directory, const SolveConfig& cfg) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(directory))
        if (e.is_regular_file() && e.path().extension() == ".smt2") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<BenchRow> rows;
    for (const auto& f : files) {
        BenchRow row;
        row.instance = f.filename().string();
        auto exp = f;
        exp.replace_extension(".expected");
        if (std::ifstream in(exp); in) in >> row.expected;
        try {
            SolveResult r = solve(parse_system_file(f.string()), cfg);
            row.verdict = r.verdict;
            row.reason = r.reason;
            row.seconds = r.seconds;
            row.iterations = r.iterations;
            row.template_index = r.template_index;
        } catch (const std::exception& e) {
            row.reason = std::string("error: ") + e.what();
        }
        const std::string got = to_string(row.verdict);
        row.hard_mismatch = (got == "sat" && row.expected == "unsat") || (got == "unsat" && row.expected == "sat");
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "instance,expected,verdict,seconds,iterations,template,reason\n";
    for (const auto& r : rows) {
        std::string reason = r.reason;
        for (char& c : reason)
            if (c == ',' || c == '\n') c = ';';
        out << r.instance << "," << r.expected << "," << to_string(r.verdict) << "," << std::fixed
            << std::setprecision(3) << r.seconds << "," << r.iterations << "," << r.template_index << "," << reason
            << "\n";
    }
}

void write_summary(std::ostream& out, const std::vector<BenchRow>& rows) {
    std::size_t sat = 0, unsat = 0, unknown = 0, bad = 0;
    double total = 0;
    for (const auto& r : rows) {
        (r.verdict == Verdict::Sat ? sat : r.verdict == Verdict::Unsat ? unsat : unknown)++;
        bad += r.hard_mismatch;
        total += r.seconds;
    }
    out << rows.size() << " instances: " << sat << " sat, " << unsat << " unsat, " << unknown << " unknown, " << bad
        << " wrong; " << std::fixed << std::setprecision(2) << total << "s total\n";
    for (const auto& r : rows)
        if (r.hard_mismatch) out << "  WRONG " << r.instance << ": expected " << r.expected << "\n";
}

} // namespace catalia
