#include "verify.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sigma_lab/congruence.hpp"
#include "sigma_lab/iterate.hpp"
#include "sigma_lab/multiperfect.hpp"
#include "sigma_lab/parallel.hpp"
#include "sigma_lab/sieve.hpp"

namespace sigma_lab::cli {

namespace {

const Integer kFiveTimesPerfect("13188979363639752997731839211623940096");

// Horizon used when reporting how many n need more than the usual search depth.
constexpr std::uint32_t kUsualHorizon = 100;

struct Claim {
    std::string_view id;
    std::string_view statement;
    ClaimResult (*run)(const struct Claim&, const VerifyOptions&);
};

ClaimResult make(const Claim& c) {
    ClaimResult r;
    r.id = std::string(c.id);
    r.statement = std::string(c.statement);
    return r;
}

bool is_prime_u64(std::uint64_t v) { return is_prime(Integer(static_cast<unsigned long>(v))); }

Integer Z(std::uint64_t v) { return Integer(static_cast<unsigned long>(v)); }

ClaimResult divisibility_search(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    std::ostringstream check;
    check << "smallest k <= " << o.divisibility_horizon << " with n | sigma^k(n) for 2 <= n <= " << o.divisibility_to
          << "; budget-limited n retried at 10x";
    r.check = check.str();

    auto reports = parallel_map_range(2, o.divisibility_to, o.jobs, [&](std::uint64_t n) {
        return smallest_k_divisibility(Z(n), o.divisibility_horizon, o.budget, o.cache);
    });
    const Budget wider{o.budget.max_work * 10, o.budget.max_digits};
    std::size_t retried = 0;
    for (auto& report : reports) {
        if (report.status != CongruenceStatus::UnresolvedBudget) continue;
        ++retried;
        report = smallest_k_divisibility(report.n, o.divisibility_horizon, wider, o.cache);
    }

    std::size_t resolved = 0, beyond_usual = 0;
    std::uint32_t max_k = 0;
    Integer max_n;
    std::vector<std::string> open;
    for (const auto& report : reports) {
        if (report.status != CongruenceStatus::Resolved) {
            open.push_back(report.n.get_str() + " (" + std::string(to_string(report.status)) + ")");
            continue;
        }
        ++resolved;
        if (*report.smallest_k > kUsualHorizon) ++beyond_usual;
        if (*report.smallest_k > max_k) {
            max_k = *report.smallest_k;
            max_n = report.n;
        }
    }
    std::ostringstream detail;
    detail << resolved << "/" << reports.size() << " resolved";
    if (resolved > 0) detail << ", largest k = " << max_k << " at n = " << max_n;
    detail << ", " << beyond_usual << " need k > " << kUsualHorizon << ", " << retried << " retried";
    if (!open.empty()) {
        detail << "; open:";
        for (std::size_t i = 0; i < open.size() && i < 10; ++i) detail << ' ' << open[i];
    }
    r.detail = detail.str();
    r.verdict = open.empty() ? Verdict::Pass : Verdict::Unresolved;
    return r;
}

ClaimResult five_times_perfect(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "factor n, compare sigma(n)/n with 5, gcd(5, n) with 1 and sigma^2(n) with 30 n";
    BudgetMeter meter(o.budget);
    const Factorization f = factor(kFiveTimesPerfect, meter, o.cache);
    const ExactRatio s = abundancy(f);
    Integer g;
    mpz_gcd_ui(g.get_mpz_t(), kFiveTimesPerfect.get_mpz_t(), 5);
    const Factorization f1 = sigma_factorization(f, meter, o.cache);
    const Integer s2 = sigma(f1);
    const bool ok = s == ExactRatio(Integer(5)) && g == 1 && s2 == 30 * kFiveTimesPerfect;
    r.detail = "S(n) = " + s.to_string() + ", gcd(5, n) = " + g.get_str() + ", sigma^2(n) / n = " +
               (s2 % kFiveTimesPerfect == 0 ? Integer(s2 / kFiveTimesPerfect).get_str() : std::string("non-integer"));
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult abundancy_bounds_claim(const Claim& c, const VerifyOptions&) {
    ClaimResult r = make(c);
    constexpr std::uint64_t limit = 100'000;
    r.check = "prod (q+1)/q <= S(m) < prod q/(q-1), and S(m) < omega(m) or 2 omega(m), for 2 <= m <= 100000";
    const SmallestFactorSieve sieve(limit);
    std::size_t equality = 0, broken = 0;
    std::uint64_t first_broken = 0;
    for (std::uint64_t m = 2; m <= limit; ++m) {
        const auto f = sieve.factor(m);
        const auto bounds = abundancy_bounds(f);
        const auto s = abundancy(f);
        const auto w = distinct_prime_count(f);
        const ExactRatio cap(Integer(static_cast<unsigned long>(w >= 5 ? w : 2 * w)));
        const bool attained = bounds.lower == s;
        equality += attained ? 1 : 0;
        const bool ok = bounds.lower <= s && s < bounds.upper && attained == is_squarefree(f) && s < cap;
        if (!ok && broken++ == 0) first_broken = m;
    }
    std::ostringstream detail;
    detail << "lower bound attained by " << equality << " m, exactly the squarefree ones (e.g. 6), so it holds only "
           << "in non-strict form";
    if (broken > 0) detail << "; " << broken << " m break the bounds, first " << first_broken;
    r.detail = detail.str();
    r.verdict = broken == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult abundancy_product(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "S(S(m) m) < S(m) S(S(m)) for every multiperfect m <= " + std::to_string(o.multiperfect_limit);
    const auto records = multiperfect_scan(o.multiperfect_limit, o.jobs);
    std::vector<std::string> broken;
    for (const auto& record : records) {
        const auto check = abundancy_product_check(record.n, o.budget);
        if (!check.holds) broken.push_back(record.n.get_str());
    }
    r.detail = std::to_string(records.size() - broken.size()) + "/" + std::to_string(records.size()) + " hold";
    if (!broken.empty()) r.detail += "; fails at " + broken.front();
    r.verdict = broken.empty() ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult no_metaperfect(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "first k <= " + std::to_string(o.first_failure_horizon) + " with n not dividing sigma^k(n), for every " +
              "multiperfect n <= " + std::to_string(o.multiperfect_limit) + " and the 38-digit n with sigma(n) = 5n";
    std::vector<Integer> starts;
    for (const auto& record : multiperfect_scan(o.multiperfect_limit, o.jobs)) starts.push_back(record.n);
    starts.push_back(kFiveTimesPerfect);
    const auto reports = parallel_map_range(0, starts.size() - 1, o.jobs, [&](std::uint64_t i) {
        return metaperfect_first_failure(starts[i], o.first_failure_horizon, o.budget, o.cache);
    });
    std::uint32_t max_k = 0;
    std::vector<std::string> open;
    for (const auto& report : reports) {
        if (report.smallest_k) {
            max_k = std::max(max_k, *report.smallest_k);
        } else {
            open.push_back(report.n.get_str() + " (" + std::string(to_string(report.status)) + ")");
        }
    }
    std::ostringstream detail;
    detail << reports.size() - open.size() << "/" << reports.size() << " fail by k = " << max_k;
    if (!reports.empty() && reports.front().smallest_k)
        detail << "; 6 fails first at k = " << *reports.front().smallest_k << " with residue "
               << reports.front().residue_table.back().residue;
    for (const auto& item : open) detail << "; open " << item;
    r.detail = detail.str();
    r.verdict = open.empty() ? Verdict::Pass : Verdict::Unresolved;
    return r;
}

ClaimResult lprime(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "scan multiperfect n <= " + std::to_string(o.multiperfect_limit) +
              ", keep L prime, check (L/(L-1))^(m+1) >= sigma(n)/n >= L";
    const auto records = lprime_filter(multiperfect_scan(o.multiperfect_limit, o.jobs));
    std::vector<std::string> others;
    bool bounds_ok = true;
    for (const auto& record : records) {
        if (record.n != 6) others.push_back(record.n.get_str());
        bounds_ok = bounds_ok && result2_bound_check(record).consistent;
    }
    std::ostringstream detail;
    detail << records.size() << " record(s) with L prime:";
    for (const auto& record : records) detail << ' ' << record.n;
    detail << "; bound " << (bounds_ok ? "consistent" : "inconsistent")
           << "; primes dividing n are taken with multiplicity L-1, the reading the hypothesis forces "
           << "(a contradictory sentence has L occurring to the L-th power)";
    r.detail = detail.str();
    r.verdict = others.empty() && bounds_ok ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult cyclotomic_factors(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "factor sigma(p^(L-1)) for primes p < 100, L in {2, 3, 5, 7, 11}";
    std::size_t rows = 0, violations = 0, p_equals_l = 0;
    for (std::uint64_t p = 2; p < 100; ++p) {
        if (!is_prime_u64(p)) continue;
        for (const std::uint64_t l : {2, 3, 5, 7, 11}) {
            const auto report = cyclotomic_factor_check(Z(p), Z(l), o.budget);
            ++rows;
            violations += report.violations();
            p_equals_l += report.p_equals_l ? 1 : 0;
        }
    }
    r.detail = std::to_string(rows) + " rows, " + std::to_string(violations) + " factors neither L nor 1 mod L, " +
               std::to_string(p_equals_l) + " rows with p = L";
    r.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult exact_l(const Claim& c, const VerifyOptions&) {
    ClaimResult r = make(c);
    r.check = "exponent of L in sigma(q^(L-1)) for primes q < 500, q = 1 mod L, L in {3, 5, 7}";
    std::size_t rows = 0, broken = 0;
    for (std::uint64_t q = 2; q < 500; ++q) {
        if (!is_prime_u64(q)) continue;
        for (const std::uint64_t l : {3, 5, 7}) {
            if (q % l != 1) continue;
            ++rows;
            broken += exact_l_divisibility(Z(q), Z(l)).exact_once ? 0 : 1;
        }
    }
    r.detail = std::to_string(rows - broken) + "/" + std::to_string(rows) + " have exponent exactly 1; L = 2 is " +
               "excluded since sigma(3) = 4 has 2-exponent " + std::to_string(l2_valuation_diagnostic(Integer(3)));
    r.verdict = broken == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult powersum_congruence(const Claim& c, const VerifyOptions&) {
    ClaimResult r = make(c);
    r.check = "sigma_k(p^e) mod sigma(p^e) against the closed form, primes p < 50, e <= 6, k <= 30";
    std::size_t rows = 0, mismatched = 0, wrong_divisibility = 0;
    for (std::uint64_t p = 2; p < 50; ++p) {
        if (!is_prime_u64(p)) continue;
        for (std::uint32_t e = 1; e <= 6; ++e) {
            for (std::uint32_t k = 1; k <= 30; ++k) {
                const auto row = powersum_residue(Z(p), e, k);
                ++rows;
                mismatched += row.match ? 0 : 1;
                wrong_divisibility += row.divides == (row.r == 1) ? 0 : 1;
            }
        }
    }
    r.detail = std::to_string(rows) + " rows, " + std::to_string(mismatched) + " residue mismatches, " +
               std::to_string(wrong_divisibility) + " divisibility mismatches";
    r.verdict = mismatched == 0 && wrong_divisibility == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult tau_coprime(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    constexpr std::uint64_t limit = 10'000;
    r.check = "sigma(n) | sigma_k(n) for 2 <= n <= 10000, k <= 20, gcd(k, tau(n)) = 1";
    const auto counts = parallel_map_range(2, limit, o.jobs, [](std::uint64_t n) {
        const auto tau = divisor_count(factor(Z(n))).get_ui();
        std::pair<std::uint32_t, std::uint32_t> tally{0, 0};
        for (std::uint32_t k = 1; k <= 20; ++k) {
            if (std::gcd<unsigned long>(k, tau) != 1) continue;
            ++tally.first;
            tally.second += tau_coprime_divisibility(Z(n), k).divides ? 0 : 1;
        }
        return tally;
    });
    std::uint64_t rows = 0, broken = 0;
    for (const auto& [checked, failed] : counts) {
        rows += checked;
        broken += failed;
    }
    r.detail = std::to_string(rows - broken) + "/" + std::to_string(rows) + " pairs divide";
    r.verdict = broken == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult odd_k_powersum(const Claim& c, const VerifyOptions&) {
    ClaimResult r = make(c);
    r.check = "6 | sigma_k(6) for odd k <= 99";
    const auto report = odd_k_divisibility(Integer(6), 99);
    std::size_t dividing = 0;
    for (const auto& row : report.residues) dividing += row.residue == 0 ? 1 : 0;
    r.detail = std::to_string(dividing) + "/" + std::to_string(report.residues.size()) + " odd k divide";
    r.verdict = report.all_divide ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult odd_k_iterate(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "sigma^k(6) mod 6 beside sigma_k(6) mod 6 for k <= 9";
    const auto rows = iterate_vs_powersum_report(Integer(6), 9, o.budget);
    std::vector<const IterateVsPowerSumRow*> odd_failures;
    bool complete = true;
    for (const auto& row : rows) {
        if (row.k % 2 == 0) continue;
        if (!row.iterate_residue) {
            complete = false;
            continue;
        }
        if (*row.iterate_residue != 0) odd_failures.push_back(&row);
    }
    if (!odd_failures.empty()) {
        const auto& first = *odd_failures.front();
        std::ostringstream detail;
        detail << "iterate reading fails for odd k =";
        for (const auto* row : odd_failures) detail << ' ' << row->k;
        detail << "; first sigma^" << first.k << "(6) = " << *first.iterate_residue << " mod 6 while sigma_" << first.k
               << "(6) = " << first.powersum_residue << " mod 6, so the statement holds for the power sum only";
        r.detail = detail.str();
        r.verdict = Verdict::Finding;
    } else if (!complete) {
        r.detail = "iterate residues incomplete under the budget";
        r.verdict = Verdict::Unresolved;
    } else {
        r.detail = "iterate residues are 0 for every odd k checked";
        r.verdict = Verdict::Pass;
    }
    return r;
}

ClaimResult periodicity(const Claim& c, const VerifyOptions&) {
    ClaimResult r = make(c);
    constexpr std::uint64_t limit = 10'000;
    r.check = "observed period of sigma_k(p^e) mod sigma(p^e) divides e+1 for p^e <= 10000; other n <= 2000 as data";
    std::size_t rows = 0, broken = 0;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (!is_prime_u64(p)) continue;
        std::uint64_t pe = p;
        for (std::uint32_t e = 1; pe <= limit; ++e, pe *= p) {
            const auto report = periodicity_probe(Z(pe));
            ++rows;
            const bool ok = report.observed_period && (e + 1) % *report.observed_period == 0;
            broken += ok ? 0 : 1;
        }
    }
    std::size_t general = 0, general_divides = 0, general_none = 0;
    for (std::uint64_t n = 2; n <= 2000; ++n) {
        const auto f = factor(Z(n));
        if (f.parts().size() < 2) continue;
        ++general;
        const auto report = periodicity_probe(Z(n));
        if (!report.observed_period) {
            ++general_none;
        } else if (*report.divides_l) {
            ++general_divides;
        }
    }
    std::ostringstream detail;
    detail << rows - broken << "/" << rows << " prime powers; for n <= 2000 with two or more primes, " << general_divides
           << "/" << general << " show a period dividing L and " << general_none << " show no period in the window";
    r.detail = detail.str();
    r.verdict = broken == 0 ? Verdict::Pass : Verdict::Fail;
    return r;
}

ClaimResult structure(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "sigma_2(n) mod n for multiperfect n <= " + std::to_string(o.multiperfect_limit) +
              ", and the odd-part shape whenever 4 | n as well";
    std::vector<std::string> sigma2_is_2;
    std::size_t triggered = 0, shape_failures = 0;
    for (const auto& record : multiperfect_scan(o.multiperfect_limit, o.jobs)) {
        const auto report = conjecture_structure_check(record.n);
        if (report.checks[1].passed) sigma2_is_2.push_back(record.n.get_str());
        if (!report.satisfies_congruences) continue;
        ++triggered;
        for (std::size_t i = 3; i < report.checks.size(); ++i) shape_failures += report.checks[i].passed ? 0 : 1;
    }
    std::ostringstream detail;
    detail << "sigma_2(n) = 2 mod n only for:";
    for (const auto& n : sigma2_is_2) detail << ' ' << n;
    detail << "; " << triggered << " n meet all three congruences";
    r.detail = detail.str();
    const bool only_six = sigma2_is_2 == std::vector<std::string>{"6"};
    r.verdict = shape_failures > 0 ? Verdict::Fail : (only_six ? Verdict::Pass : Verdict::Finding);
    return r;
}

ClaimResult lenstra(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "smallest m <= 10^6 with an increasing aliquot chain of length k, k <= 5, rechecked by factoring";
    std::ostringstream detail;
    bool all_found = true, all_verified = true;
    for (std::uint32_t k = 1; k <= 5; ++k) {
        const auto result = lenstra_chain_search(k, 1'000'000, o.jobs);
        detail << (k > 1 ? ", " : "") << "k=" << k << ": ";
        if (!result.m) {
            all_found = false;
            detail << "none";
            continue;
        }
        detail << *result.m;
        all_verified = all_verified && is_increasing_aliquot_chain(Z(*result.m), k);
    }
    r.detail = detail.str();
    r.verdict = !all_verified ? Verdict::Fail : (all_found ? Verdict::Pass : Verdict::Unresolved);
    return r;
}

ClaimResult erdos(const Claim& c, const VerifyOptions& o) {
    ClaimResult r = make(c);
    r.check = "k = 2, delta = 9/10: violation fraction over [2, 10^5] below 1/2 and within 0.05 of [2, 10^3]";
    const ExactRatio delta(Integer(9), Integer(10));
    const auto small = erdos_sampler(2, delta, 2, 1'000, o.jobs);
    const auto large = erdos_sampler(2, delta, 2, 100'000, o.jobs);
    std::ostringstream detail;
    detail.precision(4);
    detail << "fraction " << small.violation_fraction() << " on [2, 10^3], " << large.violation_fraction()
           << " on [2, 10^5] (" << large.violating << "/" << large.applicable << ")";
    r.detail = detail.str();
    const bool ok = large.violation_fraction() < 0.5 && large.violation_fraction() <= small.violation_fraction() + 0.05;
    // A density statement cannot be refuted by a finite sample.
    r.verdict = ok ? Verdict::Pass : Verdict::Finding;
    return r;
}

const std::vector<Claim>& claims() {
    static const std::vector<Claim> table{
        {"divisibility-search", "every 2 <= n <= 400 divides some sigma^k(n)", divisibility_search},
        {"five-times-perfect", "n = 13188979363639752997731839211623940096 has sigma(n) = 5n and sigma^2(n) = 30n",
         five_times_perfect},
        {"abundancy-bounds",
         "prod (q+1)/q < S(m) < prod q/(q-1); S(m) < omega(m) when omega(m) > 4, else < 2 omega(m)",
         abundancy_bounds_claim},
        {"abundancy-product", "S(S(m) m) < S(m) S(S(m)) for multiperfect m", abundancy_product},
        {"no-metaperfect", "no m > 1 divides sigma^k(m) for every k", no_metaperfect},
        {"lprime", "a multiperfect n whose L is prime is 6", lprime},
        {"cyclotomic-factors", "for prime L every prime factor of sigma(p^(L-1)) is L or 1 mod L", cyclotomic_factors},
        {"exact-l-divisibility", "for q = 1 mod L, L divides sigma(q^(L-1)) exactly once", exact_l},
        {"powersum-congruence",
         "sigma_k(p^e) = r (p^(e+1)-1)/(p^r-1) mod sigma(p^e) with r = gcd(k, e+1), and r = 1 iff sigma(p^e) | "
         "sigma_k(p^e)",
         powersum_congruence},
        {"tau-coprime", "sigma(n) | sigma_k(n) for k coprime to tau(n)", tau_coprime},
        {"odd-k-powersum", "6 divides sigma_k(6) for all odd k > 0", odd_k_powersum},
        {"odd-k-iterate", "sigma^k(6) = 0 mod 6 for every odd k", odd_k_iterate},
        {"periodicity", "sigma_k(n) mod sigma(n) is periodic in k with period dividing L", periodicity},
        {"conjecture-structure",
         "6 is the only known multiperfect n with sigma_2(n) = 2 mod n; with 4 | n as well, the odd part has a fixed "
         "shape",
         structure},
        {"lenstra-chains", "for every k some m has m < s(m) < ... < s^k(m)", lenstra},
        {"erdos-density",
         "(1-delta) m (s(m)/m)^i < s^i(m) < (1+delta) m (s(m)/m)^i for all m outside a density-0 set", erdos},
    };
    return table;
}

}  // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Finding: return "FINDING";
        case Verdict::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

const std::vector<std::string_view>& claim_ids() {
    static const std::vector<std::string_view> ids = [] {
        std::vector<std::string_view> out;
        for (const auto& claim : claims()) out.push_back(claim.id);
        return out;
    }();
    return ids;
}

std::vector<ClaimResult> verify_all(const VerifyOptions& options) {
    if (options.only && std::find(claim_ids().begin(), claim_ids().end(), *options.only) == claim_ids().end())
        throw std::invalid_argument("unknown claim '" + *options.only + "'");
    std::vector<ClaimResult> results;
    for (const auto& claim : claims()) {
        if (options.only && *options.only != claim.id) continue;
        try {
            results.push_back(claim.run(claim, options));
        } catch (const BudgetExhausted& e) {
            ClaimResult r = make(claim);
            r.check = "stopped early";
            r.detail = e.what();
            r.verdict = Verdict::Unresolved;
            results.push_back(std::move(r));
        } catch (const DigitLimit& e) {
            ClaimResult r = make(claim);
            r.check = "stopped early";
            r.detail = e.what();
            r.verdict = Verdict::Unresolved;
            results.push_back(std::move(r));
        }
    }
    return results;
}

int verify_exit_code(const std::vector<ClaimResult>& results) {
    const auto has = [&](Verdict v) {
        return std::any_of(results.begin(), results.end(), [v](const ClaimResult& r) { return r.verdict == v; });
    };
    if (has(Verdict::Fail)) return 1;
    if (has(Verdict::Unresolved)) return 2;
    return 0;
}

}  // namespace sigma_lab::cli
