#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>

#include <CLI11.hpp>

#include "sigma_lab/congruence.hpp"
#include "sigma_lab/iterate.hpp"
#include "sigma_lab/multiperfect.hpp"
#include "sigma_lab/parallel.hpp"
#include "sigma_lab/records.hpp"
#include "sigma_lab/store.hpp"
#include "verify.hpp"

namespace sigma_lab::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::vector<std::string> numbers;
    std::uint64_t from = 2;
    std::optional<std::uint64_t> to;
    std::uint32_t k_max = 100;
    std::uint64_t budget_work = Budget{}.max_work;
    std::uint32_t digit_limit = Budget{}.max_digits;
    unsigned jobs = default_jobs();
    std::string cache_path;
    std::string format = "text";
    std::string out_path;

    // subcommand-specific
    std::optional<std::uint32_t> iterate;
    std::optional<std::uint32_t> power;
    bool gcd = false;
    bool ratio = false;
    bool squares = false;
    bool lemmas = false;
    std::optional<std::uint32_t> horizon;
    std::uint64_t p_max = 50;
    std::uint32_t e_max = 6;
    std::uint64_t tau_to = 10'000;
    std::uint32_t tau_k = 20;
    std::uint32_t odd_k = 99;
    std::uint64_t m_max = 1'000'000;
    std::uint32_t chain_k = 2;
    std::string delta = "9/10";
    std::size_t sample = 50;
    bool all_n = false;
    std::string claim;

    Budget budget() const { return Budget{budget_work, digit_limit}; }
};

struct Context {
    const RunConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    FactorCache& cache;
};

Integer parse_integer(const std::string& text) {
    Integer v;
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || v.set_str(text, 10) != 0)
        throw UsageError("'" + text + "' is not a non-negative decimal integer");
    return v;
}

std::vector<Integer> parse_numbers(const RunConfig& cfg, const Integer& minimum) {
    std::vector<Integer> out;
    for (const auto& text : cfg.numbers) {
        Integer v = parse_integer(text);
        if (v < minimum) throw UsageError(text + " is below the minimum " + minimum.get_str());
        out.push_back(std::move(v));
    }
    return out;
}

ExactRatio parse_ratio(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return ExactRatio(parse_integer(text));
    const Integer num = parse_integer(text.substr(0, slash));
    const Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw UsageError("zero denominator in '" + text + "'");
    return ExactRatio(num, den);
}

std::uint64_t range_end(const RunConfig& cfg, std::uint64_t fallback) {
    const std::uint64_t hi = cfg.to.value_or(fallback);
    if (hi < cfg.from) throw UsageError("empty range: --from " + std::to_string(cfg.from) + " > --to " + std::to_string(hi));
    return hi;
}

void require_format(const RunConfig& cfg, std::initializer_list<std::string_view> allowed, std::string_view name) {
    for (const auto f : allowed) {
        if (cfg.format == f) return;
    }
    throw UsageError(std::string(name) + " does not support --format " + cfg.format);
}

Record factorization_record(const Factorization& f) {
    Record r;
    r["type"] = "factorization";
    r["n"] = f.value().get_str();
    r["factors"] = to_record(f);
    return r;
}

std::string join_values(const std::vector<Integer>& values, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += sep;
        out += values[i].get_str();
    }
    return out;
}

// ---------------------------------------------------------------- factor

int cmd_factor(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "factor");
    JsonlWriter json(ctx.out);
    int status = kExitOk;
    for (const auto& n : parse_numbers(cfg, 1)) {
        BudgetMeter meter(cfg.budget());
        try {
            const auto f = factor(n, meter, &ctx.cache);
            if (cfg.format == "json") {
                json.emit(factorization_record(f));
            } else {
                ctx.out << n << " = " << f.to_string() << '\n';
            }
        } catch (const BudgetExhausted& e) {
            ctx.err << n << ": unresolved: " << e.what() << '\n';
            status = kExitUnresolved;
        } catch (const DigitLimit& e) {
            ctx.err << n << ": unresolved: " << e.what() << '\n';
            status = kExitUnresolved;
        }
    }
    return status;
}

// ---------------------------------------------------------------- sigma

int sigma_iterate(Context& ctx, const Integer& n, std::uint32_t k) {
    const auto& cfg = ctx.cfg;
    JsonlWriter json(ctx.out);
    const SigmaTrace trace = iterate_sigma(n, k, cfg.budget(), &ctx.cache);
    const int status = trace.status == TraceStatus::Complete ? kExitOk : kExitUnresolved;
    if (trace.status != TraceStatus::Complete)
        ctx.err << n << ": trace stopped at k = " << trace.entries.back().k << ": " << to_string(trace.status) << '\n';

    if (cfg.gcd) {
        const auto seq = gcd_sequence(trace);
        if (cfg.format == "json") {
            json.emit(to_record(seq, n));
        } else {
            for (std::size_t i = 0; i < seq.values.size(); ++i) ctx.out << i << ' ' << seq.values[i] << '\n';
        }
        return status;
    }
    if (cfg.ratio) {
        if (n < 2) throw UsageError("--ratio needs n >= 2");
        const auto seq = ratio_sequence(n, k, cfg.budget(), &ctx.cache);
        if (cfg.format == "json") {
            json.emit(to_record(seq, n));
        } else {
            for (std::size_t i = 0; i < seq.values.size(); ++i) ctx.out << i << ' ' << seq.values[i].to_string() << '\n';
        }
        return status;
    }
    if (cfg.squares) {
        const auto hit = square_probe(trace);
        if (cfg.format == "json") {
            Record r;
            r["type"] = "square_probe";
            r["n"] = n.get_str();
            r["k_max"] = k;
            r["first_k"] = hit ? Record(*hit) : Record(nullptr);
            json.emit(r);
        } else if (hit) {
            ctx.out << "sigma^" << *hit << "(" << n << ") = " << trace.entries[*hit].value
                    << " is a square or twice a square\n";
        } else {
            ctx.out << "no square or twice a square among sigma^0 .. sigma^" << trace.entries.back().k << '\n';
        }
        return status;
    }

    if (cfg.format == "json") {
        json.emit(to_record(trace));
    } else {
        for (const auto& entry : trace.entries) ctx.out << entry.k << ' ' << entry.value << ' ' << entry.residue << '\n';
    }
    return status;
}

int cmd_sigma(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "sigma");
    if ((cfg.gcd || cfg.ratio || cfg.squares) && !cfg.iterate) throw UsageError("--gcd, --ratio and --squares need --iterate");
    JsonlWriter json(ctx.out);
    int status = kExitOk;
    for (const auto& n : parse_numbers(cfg, 1)) {
        try {
            if (cfg.iterate) {
                status = std::max(status, sigma_iterate(ctx, n, *cfg.iterate));
                continue;
            }
            BudgetMeter meter(cfg.budget());
            const auto f = factor(n, meter, &ctx.cache);
            if (cfg.power) {
                const Integer value = sigma_pow(f, *cfg.power);
                if (cfg.format == "json") {
                    Record r;
                    r["type"] = "sigma_power";
                    r["n"] = n.get_str();
                    r["k"] = *cfg.power;
                    r["value"] = value.get_str();
                    json.emit(r);
                } else {
                    ctx.out << "sigma_" << *cfg.power << "(" << n << ") = " << value << '\n';
                }
                continue;
            }
            const Integer s = sigma(f);
            if (cfg.format == "json") {
                Record r;
                r["type"] = "sigma";
                r["n"] = n.get_str();
                r["factorization"] = to_record(f);
                r["sigma"] = s.get_str();
                r["abundancy"] = abundancy(f).to_string();
                json.emit(r);
            } else {
                ctx.out << "sigma(" << n << ") = " << s << "  S = " << abundancy(f).to_string() << '\n';
            }
        } catch (const BudgetExhausted& e) {
            ctx.err << n << ": unresolved: " << e.what() << '\n';
            status = kExitUnresolved;
        } catch (const DigitLimit& e) {
            ctx.err << n << ": unresolved: " << e.what() << '\n';
            status = kExitUnresolved;
        }
    }
    return status;
}

// ---------------------------------------------------------------- aliquot

int cmd_aliquot(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "aliquot");
    JsonlWriter json(ctx.out);
    int status = kExitOk;
    for (const auto& n : parse_numbers(cfg, 1)) {
        const auto trace = iterate_aliquot(n, cfg.k_max, cfg.budget(), &ctx.cache);
        if (trace.status == AliquotStatus::BudgetExhausted || trace.status == AliquotStatus::DigitLimit) {
            ctx.err << n << ": stopped at k = " << trace.entries.back().k << ": " << to_string(trace.status) << '\n';
            status = kExitUnresolved;
        }
        if (cfg.format == "json") {
            json.emit(to_record(trace));
            continue;
        }
        for (const auto& entry : trace.entries) ctx.out << entry.k << ' ' << entry.value << '\n';
        ctx.out << to_string(trace.status);
        if (trace.status == AliquotStatus::Cycle) ctx.out << " length " << trace.cycle_length;
        ctx.out << '\n';
    }
    return status;
}

// ---------------------------------------------------------------- ctr-scan

int cmd_ctr_scan(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const std::uint64_t hi = range_end(cfg, 400);
    if (cfg.from < 2) throw UsageError("ctr-scan needs --from >= 2");
    SnapshotSource snapshot(ctx.cache);
    const auto reports = parallel_map_range(cfg.from, hi, cfg.jobs, [&](std::uint64_t n) {
        return smallest_k_divisibility(Integer(static_cast<unsigned long>(n)), cfg.k_max, cfg.budget(), &snapshot);
    });
    snapshot.commit();
    if (cfg.format == "json") {
        JsonlWriter(ctx.out).emit_all(reports);
    } else {
        write_divisibility_csv(ctx.out, reports);
    }
    std::size_t open = 0;
    for (const auto& r : reports) open += r.status == CongruenceStatus::Resolved ? 0 : 1;
    if (open > 0) ctx.err << open << " of " << reports.size() << " n have no k <= " << cfg.k_max << " yet\n";
    return open == 0 ? kExitOk : kExitUnresolved;
}

// ---------------------------------------------------------------- meta-scan

int cmd_meta_scan(Context& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<Integer> starts = parse_numbers(cfg, 2);
    if (starts.empty()) {
        for (const auto& record : multiperfect_scan(range_end(cfg, 1'000'000), cfg.jobs)) {
            if (record.n >= cfg.from) starts.push_back(record.n);
        }
    }
    SnapshotSource snapshot(ctx.cache);
    std::vector<CongruenceReport> reports;
    if (!starts.empty()) {
        reports = parallel_map_range(0, starts.size() - 1, cfg.jobs, [&](std::uint64_t i) {
            return metaperfect_first_failure(starts[i], cfg.k_max, cfg.budget(), &snapshot);
        });
    }
    snapshot.commit();
    if (cfg.format == "json") {
        JsonlWriter(ctx.out).emit_all(reports);
    } else {
        ctx.out << "n,first_failure_k,residue,status\n";
        for (const auto& r : reports) {
            ctx.out << r.n << ',';
            if (r.smallest_k) ctx.out << *r.smallest_k << ',' << r.residue_table.back().residue;
            else ctx.out << ',';
            ctx.out << ',' << to_string(r.status) << '\n';
        }
    }
    std::size_t open = 0;
    for (const auto& r : reports) open += r.smallest_k ? 0 : 1;
    return open == 0 ? kExitOk : kExitUnresolved;
}

// ---------------------------------------------------------------- mp-scan / lprime

void write_multiperfect(Context& ctx, const std::vector<MultiperfectRecord>& records) {
    if (ctx.cfg.format == "json") {
        JsonlWriter(ctx.out).emit_all(records);
        return;
    }
    ctx.out << "n,index,L,L_prime,squarefree,factorization\n";
    for (const auto& r : records) {
        ctx.out << r.n << ',' << r.index << ',' << r.l << ',' << (r.l_prime ? "true" : "false") << ','
                << (r.squarefree ? "true" : "false") << ',' << r.factorization.to_string() << '\n';
    }
}

int cmd_mp_scan(Context& ctx) {
    const auto records = multiperfect_scan(range_end(ctx.cfg, 1'000'000), ctx.cfg.jobs);
    write_multiperfect(ctx, records);
    return kExitOk;
}

int lprime_lemmas(Context& ctx) {
    JsonlWriter json(ctx.out);
    const bool as_json = ctx.cfg.format == "json";
    std::size_t violations = 0;
    if (!as_json) ctx.out << "p,L,sigma(p^(L-1)),factors\n";
    for (unsigned long p = 2; p < 100; ++p) {
        if (!is_prime(Integer(p))) continue;
        for (unsigned long l : {2UL, 3UL, 5UL, 7UL, 11UL}) {
            const auto report = cyclotomic_factor_check(Integer(p), Integer(l), ctx.cfg.budget());
            violations += report.violations();
            if (as_json) {
                json.emit(to_record(report));
                continue;
            }
            ctx.out << p << ',' << l << ',' << report.value << ',';
            for (std::size_t i = 0; i < report.factors.size(); ++i) {
                const auto& f = report.factors[i];
                ctx.out << (i > 0 ? " " : "") << f.q << '^' << f.exponent << ':' << to_string(f.cls);
            }
            ctx.out << '\n';
        }
    }
    if (!as_json) ctx.out << "q,L,valuation\n";
    for (unsigned long q = 3; q < 500; ++q) {
        if (!is_prime(Integer(q))) continue;
        for (unsigned long l : {3UL, 5UL, 7UL}) {
            if (q % l != 1) continue;
            const auto v = exact_l_divisibility(Integer(q), Integer(l));
            violations += v.exact_once ? 0 : 1;
            if (as_json) json.emit(to_record(v));
            else ctx.out << q << ',' << l << ',' << v.valuation << '\n';
        }
    }
    return violations == 0 ? kExitOk : kExitCounterexample;
}

int cmd_lprime(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.lemmas) return lprime_lemmas(ctx);
    const auto records = lprime_filter(multiperfect_scan(range_end(cfg, 1'000'000), cfg.jobs));
    bool counterexample = false;
    if (cfg.format == "json") {
        JsonlWriter json(ctx.out);
        for (const auto& r : records) {
            json.emit(to_record(r));
            json.emit(to_record(result2_bound_check(r)));
        }
    } else {
        ctx.out << "n,index,L,factorization,bound_lhs,bound_consistent\n";
        for (const auto& r : records) {
            const auto bound = result2_bound_check(r);
            ctx.out << r.n << ',' << r.index << ',' << r.l << ',' << r.factorization.to_string() << ','
                    << bound.lhs.to_string() << ',' << (bound.consistent ? "true" : "false") << '\n';
        }
    }
    for (const auto& r : records) {
        if (r.n != 6 || !result2_bound_check(r).consistent) {
            ctx.err << "counterexample: " << r.n << " has prime L = " << r.l << '\n';
            counterexample = true;
        }
    }
    return counterexample ? kExitCounterexample : kExitOk;
}

// ---------------------------------------------------------------- periodicity

int cmd_periodicity(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "periodicity");
    std::vector<Integer> ns = parse_numbers(cfg, 2);
    if (ns.empty()) {
        const std::uint64_t hi = range_end(cfg, 100);
        if (cfg.from < 2) throw UsageError("periodicity needs --from >= 2");
        for (std::uint64_t n = cfg.from; n <= hi; ++n) ns.emplace_back(static_cast<unsigned long>(n));
    }
    JsonlWriter json(ctx.out);
    int status = kExitOk;
    for (const auto& n : ns) {
        const auto f = factor(n, cfg.budget());
        const std::uint32_t horizon = cfg.horizon.value_or(default_period_horizon(n));
        const auto report = periodicity_probe(n, horizon);
        const bool prime_power = f.parts().size() == 1;
        if (prime_power && !report.observed_period) status = std::max(status, int{kExitUnresolved});
        if (prime_power && report.divides_l == false) {
            ctx.err << "counterexample: period of " << n << " does not divide " << report.l << '\n';
            status = kExitCounterexample;
        }
        if (cfg.format == "json") {
            json.emit(to_record(report));
            continue;
        }
        ctx.out << n << " L=" << report.l << " period=";
        if (report.observed_period) ctx.out << *report.observed_period << (*report.divides_l ? " divides" : " does-not-divide");
        else ctx.out << "none";
        ctx.out << " residues=" << join_values(report.residues, ",") << '\n';
    }
    return status;
}

// ---------------------------------------------------------------- powersum-check

int cmd_powersum_check(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "powersum-check");
    const bool as_json = cfg.format == "json";
    JsonlWriter json(ctx.out);

    std::size_t rows = 0, mismatched = 0;
    for (std::uint64_t p = 2; p < cfg.p_max; ++p) {
        if (!is_prime(Integer(static_cast<unsigned long>(p)))) continue;
        for (std::uint32_t e = 1; e <= cfg.e_max; ++e) {
            for (std::uint32_t k = 1; k <= cfg.k_max; ++k) {
                const auto row = powersum_residue(Integer(static_cast<unsigned long>(p)), e, k);
                ++rows;
                const bool bad = !row.match || row.divides != (row.r == 1);
                mismatched += bad ? 1 : 0;
                if (as_json) json.emit(to_record(row));
                else if (bad) ctx.out << "mismatch p=" << p << " e=" << e << " k=" << k << '\n';
            }
        }
    }

    const auto tallies = parallel_map_range(2, std::max<std::uint64_t>(2, cfg.tau_to), cfg.jobs, [&](std::uint64_t n) {
        const Integer z(static_cast<unsigned long>(n));
        const unsigned long tau = divisor_count(factor(z)).get_ui();
        std::pair<std::uint32_t, std::uint32_t> t{0, 0};
        for (std::uint32_t k = 1; k <= cfg.tau_k; ++k) {
            if (std::gcd<unsigned long>(k, tau) != 1) continue;
            ++t.first;
            t.second += tau_coprime_divisibility(z, k).divides ? 0 : 1;
        }
        return t;
    });
    std::uint64_t pairs = 0, tau_failures = 0;
    for (const auto& [checked, failed] : tallies) {
        pairs += checked;
        tau_failures += failed;
    }

    const auto odd = odd_k_divisibility(Integer(6), cfg.odd_k);
    const auto side_by_side = iterate_vs_powersum_report(Integer(6), 9, cfg.budget());

    if (as_json) {
        Record tau;
        tau["type"] = "tau_coprime_summary";
        tau["n_max"] = cfg.tau_to;
        tau["k_max"] = cfg.tau_k;
        tau["pairs"] = pairs;
        tau["failures"] = tau_failures;
        json.emit(tau);
        json.emit(to_record(odd));
        json.emit(to_record(side_by_side, Integer(6)));
    } else {
        ctx.out << "power-sum congruence: " << rows - mismatched << "/" << rows << " rows match\n";
        ctx.out << "tau-coprime divisibility: " << pairs - tau_failures << "/" << pairs << " pairs divide\n";
        ctx.out << "6 | sigma_k(6) for odd k <= " << cfg.odd_k << ": " << (odd.all_divide ? "yes" : "no") << '\n';
        ctx.out << "k sigma^k(6)_mod_6 sigma_k(6)_mod_6\n";
        for (const auto& row : side_by_side) {
            ctx.out << row.k << ' ' << (row.iterate_residue ? row.iterate_residue->get_str() : std::string("-")) << ' '
                    << row.powersum_residue << '\n';
        }
    }
    return mismatched == 0 && tau_failures == 0 && odd.all_divide ? kExitOk : kExitCounterexample;
}

// ---------------------------------------------------------------- lenstra / erdos

int cmd_lenstra(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "lenstra");
    JsonlWriter json(ctx.out);
    int status = kExitOk;
    for (std::uint32_t k = 1; k <= cfg.k_max; ++k) {
        const auto result = lenstra_chain_search(k, cfg.m_max, cfg.jobs);
        if (!result.m) status = kExitUnresolved;
        if (cfg.format == "json") {
            json.emit(to_record(result));
        } else if (result.m) {
            ctx.out << "k=" << k << " m=" << *result.m << " chain=" << join_values(result.chain, "<") << '\n';
        } else {
            ctx.out << "k=" << k << " none <= " << cfg.m_max << '\n';
        }
    }
    return status;
}

int cmd_erdos(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "erdos-sample");
    const std::uint64_t hi = range_end(cfg, 100'000);
    const auto report = erdos_sampler(cfg.chain_k, parse_ratio(cfg.delta), cfg.from, hi, cfg.jobs, cfg.sample);
    if (cfg.format == "json") {
        JsonlWriter(ctx.out).emit(to_record(report));
        return kExitOk;
    }
    ctx.out << "k=" << report.k << " delta=" << report.delta.to_string() << " range=[" << report.m_lo << ", "
            << report.m_hi << "]\n";
    ctx.out << "applicable=" << report.applicable << " inapplicable=" << report.inapplicable
            << " violating=" << report.violating << '\n';
    for (std::size_t i = 0; i < report.violations_by_step.size(); ++i)
        ctx.out << "step " << i + 1 << ": " << report.violations_by_step[i] << '\n';
    ctx.out << "sample:";
    for (const auto m : report.violating_sample) ctx.out << ' ' << m;
    ctx.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- conjecture-scan

int cmd_conjecture_scan(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "conjecture-scan");
    const std::uint64_t hi = range_end(cfg, 1'000'000);
    std::vector<Integer> ns;
    if (cfg.all_n) {
        for (std::uint64_t n = std::max<std::uint64_t>(2, cfg.from); n <= hi; ++n)
            ns.emplace_back(static_cast<unsigned long>(n));
    } else {
        for (const auto& r : multiperfect_scan(hi, cfg.jobs)) {
            if (r.n >= cfg.from) ns.push_back(r.n);
        }
    }
    std::vector<StructureReport> reports;
    if (!ns.empty()) {
        reports = parallel_map_range(0, ns.size() - 1, cfg.jobs,
                                     [&](std::uint64_t i) { return conjecture_structure_check(ns[i]); });
    }
    JsonlWriter json(ctx.out);
    bool counterexample = false;
    for (const auto& report : reports) {
        bool shape_ok = true;
        for (std::size_t i = 3; i < report.checks.size(); ++i) shape_ok = shape_ok && report.checks[i].passed;
        counterexample = counterexample || !shape_ok;
        // Without --all only multiperfect n are listed; with it only n meeting all hypotheses.
        if (cfg.all_n && !report.satisfies_congruences) continue;
        if (cfg.format == "json") {
            json.emit(to_record(report));
            continue;
        }
        ctx.out << report.n;
        for (const auto& check : report.checks) ctx.out << " [" << (check.passed ? "+" : "-") << "] " << check.name << ';';
        ctx.out << '\n';
    }
    return counterexample ? kExitCounterexample : kExitOk;
}

// ---------------------------------------------------------------- verify-all

int cmd_verify_all(Context& ctx) {
    const auto& cfg = ctx.cfg;
    require_format(cfg, {"text", "json"}, "verify-all");
    SnapshotSource snapshot(ctx.cache);
    VerifyOptions options;
    options.budget = cfg.budget();
    options.jobs = cfg.jobs;
    options.cache = &snapshot;
    if (!cfg.claim.empty()) options.only = cfg.claim;
    if (cfg.horizon) options.divisibility_horizon = *cfg.horizon;
    if (cfg.to) options.multiperfect_limit = *cfg.to;

    std::vector<ClaimResult> results;
    try {
        results = verify_all(options);
    } catch (const std::invalid_argument& e) {
        std::string ids;
        for (const auto id : claim_ids()) ids += " " + std::string(id);
        throw UsageError(std::string(e.what()) + "; known claims:" + ids);
    }
    snapshot.commit();

    JsonlWriter json(ctx.out);
    std::map<Verdict, std::size_t> counts;
    for (const auto& r : results) {
        ++counts[r.verdict];
        if (cfg.format == "json") {
            Record rec;
            rec["type"] = "claim";
            rec["id"] = r.id;
            rec["statement"] = r.statement;
            rec["check"] = r.check;
            rec["verdict"] = to_string(r.verdict);
            rec["detail"] = r.detail;
            json.emit(rec);
            continue;
        }
        ctx.out << to_string(r.verdict) << std::string(12 - to_string(r.verdict).size(), ' ') << r.id << '\n';
        ctx.out << "            claim:  " << r.statement << '\n';
        ctx.out << "            check:  " << r.check << '\n';
        ctx.out << "            result: " << r.detail << '\n';
    }
    if (cfg.format != "json") {
        ctx.out << "summary: " << counts[Verdict::Pass] << " PASS, " << counts[Verdict::Finding] << " FINDING, "
                << counts[Verdict::Fail] << " FAIL, " << counts[Verdict::Unresolved] << " UNRESOLVED\n";
    }
    return verify_exit_code(results);
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--budget-work", cfg.budget_work, "Factoring probe steps allowed per item")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--digit-limit", cfg.digit_limit, "Largest value (in decimal digits) that will be factored")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--cache", cfg.cache_path, std::string("Factorization cache file (default: $") + kCacheEnvVar + ")");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out_path, "Write data here instead of standard output");
}

void add_range(CLI::App* sub, RunConfig& cfg, std::uint64_t default_to) {
    sub->add_option("--from", cfg.from, "First n")->capture_default_str();
    sub->add_option("--to,--limit", cfg.to, "Last n (default " + std::to_string(default_to) + ")");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Arbitrary-precision experiments on iterated divisor sums", "sigma-lab"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::map<CLI::App*, std::function<int(Context&)>> handlers;
    auto add = [&](const std::string& name, const std::string& about, std::function<int(Context&)> fn) {
        CLI::App* sub = app.add_subcommand(name, about);
        add_common(sub, cfg);
        handlers.emplace(sub, std::move(fn));
        return sub;
    };
    std::map<CLI::App*, std::uint32_t> k_max_defaults;
    auto k_max = [&](CLI::App* sub, std::uint32_t def, const std::string& about) {
        k_max_defaults[sub] = def;
        sub->add_option("--k-max", cfg.k_max, about)->check(CLI::PositiveNumber)->default_str(std::to_string(def));
    };

    auto* factor_cmd = add("factor", "Prime factorization of each n", cmd_factor);
    factor_cmd->add_option("n", cfg.numbers, "Integers to factor")->required();

    auto* sigma_cmd = add("sigma", "sigma(n), sigma_k(n) or the trace sigma^0(n) .. sigma^K(n)", cmd_sigma);
    sigma_cmd->add_option("n", cfg.numbers, "Starting values")->required();
    auto* iterate_opt = sigma_cmd->add_option("--iterate", cfg.iterate, "Print sigma^k(n) and its residue mod n for k <= K");
    sigma_cmd->add_option("--power", cfg.power, "Print the power sum sigma_k(n)")->excludes(iterate_opt);
    sigma_cmd->add_flag("--gcd", cfg.gcd, "With --iterate: g_k = gcd(g_(k-1), sigma^k(n))");
    sigma_cmd->add_flag("--ratio", cfg.ratio, "With --iterate: sigma^(k+1)(n) / sigma^k(n)");
    sigma_cmd->add_flag("--squares", cfg.squares, "With --iterate: first square or twice-square value");

    auto* aliquot_cmd = add("aliquot", "Aliquot sequence s^k(n) with cycle detection", cmd_aliquot);
    aliquot_cmd->add_option("n", cfg.numbers, "Starting values")->required();

    auto* ctr = add("ctr-scan", "Smallest k with n | sigma^k(n), as a CSV table", cmd_ctr_scan);
    add_range(ctr, cfg, 400);

    auto* meta = add("meta-scan", "First k with n not dividing sigma^k(n), for multiperfect n", cmd_meta_scan);
    meta->add_option("n", cfg.numbers, "Explicit multiperfect starts (default: scan up to --to)");
    add_range(meta, cfg, 1'000'000);

    auto* mp = add("mp-scan", "All multiperfect n in range", cmd_mp_scan);
    add_range(mp, cfg, 1'000'000);

    auto* lp = add("lprime", "Multiperfect n whose L invariant is prime", cmd_lprime);
    add_range(lp, cfg, 1'000'000);
    lp->add_flag("--lemmas", cfg.lemmas, "Instead, tabulate the cyclotomic-factor and L-valuation lemmas");

    auto* period = add("periodicity", "Period of sigma_k(n) mod sigma(n) in k", cmd_periodicity);
    period->add_option("n", cfg.numbers, "Explicit n (default: the range)");
    add_range(period, cfg, 100);
    period->add_option("--horizon", cfg.horizon, "Number of k values (default max(4L, 24))");

    auto* ps = add("powersum-check", "Power-sum congruences, tau-coprime and odd-k divisibility", cmd_powersum_check);
    ps->add_option("--p-max", cfg.p_max, "Primes below this")->capture_default_str();
    ps->add_option("--e-max", cfg.e_max, "Largest exponent")->check(CLI::PositiveNumber)->capture_default_str();
    ps->add_option("--tau-to", cfg.tau_to, "Largest n for the tau-coprime check")->capture_default_str();
    ps->add_option("--tau-k", cfg.tau_k, "Largest k for the tau-coprime check")->capture_default_str();
    ps->add_option("--odd-k", cfg.odd_k, "Largest odd k for 6 | sigma_k(6)")->capture_default_str();

    auto* lenstra_cmd = add("lenstra", "Smallest m with an increasing aliquot chain of length k", cmd_lenstra);
    lenstra_cmd->add_option("--m-max", cfg.m_max, "Search bound for m")->check(CLI::PositiveNumber)->capture_default_str();

    auto* erdos_cmd = add("erdos-sample", "Count m breaking the growth inequality for s^i(m)", cmd_erdos);
    add_range(erdos_cmd, cfg, 100'000);
    erdos_cmd->add_option("--chain", cfg.chain_k, "Steps i = 1..k")->check(CLI::PositiveNumber)->capture_default_str();
    erdos_cmd->add_option("--delta", cfg.delta, "Tolerance as an exact fraction")->capture_default_str();
    erdos_cmd->add_option("--sample", cfg.sample, "Violating m to list")->capture_default_str();

    auto* conj = add("conjecture-scan", "sigma_2(n) mod n structure predicate", cmd_conjecture_scan);
    add_range(conj, cfg, 1'000'000);
    conj->add_flag("--all", cfg.all_n, "Scan every n, not only multiperfect ones");

    auto* verify = add("verify-all", "Check every claim and print one verdict per claim", cmd_verify_all);
    verify->add_option("--claim", cfg.claim, "Run only this claim");
    verify->add_option("--horizon", cfg.horizon, "k horizon for the divisibility search (default 300)");
    verify->add_option("--to,--limit", cfg.to, "Multiperfect scan limit (default 1000000)");

    k_max(aliquot_cmd, 100, "Iteration horizon");
    k_max(ctr, 100, "Iteration horizon");
    k_max(meta, 100, "Iteration horizon");
    k_max(ps, 30, "Largest k in the power-sum grid");
    k_max(lenstra_cmd, 5, "Chains of length 1..K");

    std::vector<const char*> argv{"sigma-lab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (auto it = k_max_defaults.find(chosen); it != k_max_defaults.end() && chosen->count("--k-max") == 0)
        cfg.k_max = it->second;

    try {
        cfg.budget().validate();
        if (cfg.cache_path.empty()) {
            if (const char* env = std::getenv(kCacheEnvVar); env != nullptr) cfg.cache_path = env;
        }
        auto cache = cfg.cache_path.empty() ? std::make_unique<FactorCache>()
                                            : std::make_unique<FactorCache>(std::filesystem::path(cfg.cache_path));
        for (const auto& bad : cache->corrupt_lines())
            err << "cache line " << bad.line_number << " ignored: " << bad.reason << '\n';

        std::ofstream file;
        if (!cfg.out_path.empty()) {
            file.open(cfg.out_path, std::ios::binary | std::ios::trunc);
            if (!file) throw UsageError("cannot open --out " + cfg.out_path);
        }
        std::ostream& sink = cfg.out_path.empty() ? out : file;
        Context ctx{cfg, sink, err, *cache};
        const int code = handlers.at(chosen)(ctx);
        sink.flush();
        cache->flush();
        if (!sink) {
            err << "error: failed writing output\n";
            return kExitUnresolved;
        }
        return code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionViolated& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotMultiperfect& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const BudgetExhausted& e) {
        err << "unresolved: " << e.what() << '\n';
        return kExitUnresolved;
    } catch (const DigitLimit& e) {
        err << "unresolved: " << e.what() << '\n';
        return kExitUnresolved;
    } catch (const IoFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnresolved;
    }
}

}  // namespace sigma_lab::cli
