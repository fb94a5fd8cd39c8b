#include "sigma_lab/congruence.hpp"

#include <numeric>

#include "sigma_lab/iterate.hpp"

namespace sigma_lab {

namespace {

bool is_power_of_two(const Integer& v) { return v > 0 && mpz_popcount(v.get_mpz_t()) == 1; }

Integer pow_ui(const Integer& base, unsigned long e) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// sigma_k(n) mod m, reduced per prime power.
Integer sigma_pow_mod(const Factorization& f, std::uint32_t k, const Integer& m) {
    Integer out = 1 % m;
    for (const auto& part : f.parts()) {
        Integer pk;
        const Integer exp(static_cast<unsigned long>(k));
        mpz_powm(pk.get_mpz_t(), part.prime.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
        Integer term = 1 % m, power = 1 % m;
        for (std::uint32_t i = 1; i <= part.exponent; ++i) {
            power = power * pk % m;
            term = (term + power) % m;
        }
        out = out * term % m;
    }
    return out;
}

CongruenceReport residue_search(const Integer& n, std::uint32_t k_max, const Budget& budget,
                                FactorSource* cache, std::string_view goal, bool want_zero) {
    CongruenceReport report;
    report.n = n;
    report.goal = goal;
    report.k_horizon = k_max;

    TraceOptions options;
    options.store_factorization_digits = 0;
    options.stop_when = [want_zero](const TraceEntry& e) { return (e.residue == 0) == want_zero; };
    const SigmaTrace trace = iterate_sigma(n, k_max, budget, cache, options);

    for (const auto& entry : trace.entries) {
        if (entry.k == 0) continue;
        report.residue_table.push_back(ResidueRow{entry.k, entry.residue});
        if ((entry.residue == 0) == want_zero) {
            report.smallest_k = entry.k;
            report.status = CongruenceStatus::Resolved;
            return report;
        }
    }
    report.status = trace.status == TraceStatus::Complete ? CongruenceStatus::NoKWithinHorizon
                                                          : CongruenceStatus::UnresolvedBudget;
    return report;
}

}  // namespace

std::string_view to_string(CongruenceStatus status) {
    switch (status) {
        case CongruenceStatus::Resolved: return "RESOLVED";
        case CongruenceStatus::UnresolvedBudget: return "UNRESOLVED_BUDGET";
        case CongruenceStatus::NoKWithinHorizon: return "NO_K_WITHIN_HORIZON";
    }
    return "?";
}

CongruenceReport smallest_k_divisibility(const Integer& n, std::uint32_t k_max, const Budget& budget,
                                         FactorSource* cache) {
    if (n < 2) throw PreconditionViolated("smallest_k_divisibility requires n >= 2");
    return residue_search(n, k_max, budget, cache, kGoalDivides, true);
}

CongruenceReport metaperfect_first_failure(const Integer& n, std::uint32_t k_max, const Budget& budget,
                                           FactorSource* cache) {
    if (n < 6) throw NotMultiperfect("metaperfect_first_failure requires multiperfect n >= 6");
    BudgetMeter meter(budget);
    if (sigma(factor(n, meter, cache)) % n != 0)
        throw NotMultiperfect(n.get_str() + " is not multiperfect");
    return residue_search(n, k_max, budget, cache, kGoalFirstFailure, false);
}

PowerSumResidue powersum_residue(const Integer& p, std::uint32_t e, std::uint32_t k) {
    if (e < 1 || k < 1) throw PreconditionViolated("powersum_residue requires e >= 1 and k >= 1");
    if (!is_prime(p)) throw PreconditionViolated(p.get_str() + " is not prime");
    PowerSumResidue out;
    out.p = p;
    out.e = e;
    out.k = k;
    out.r = std::gcd(k, e + 1);
    out.modulus = sigma_prime_power(p, e);

    const Integer numerator = pow_ui(p, e + 1) - 1;
    const Integer denominator = pow_ui(p, out.r) - 1;
    Integer quotient;
    mpz_divexact(quotient.get_mpz_t(), numerator.get_mpz_t(), denominator.get_mpz_t());
    out.predicted = Integer(out.r * quotient) % out.modulus;
    out.actual = sigma_pow_prime_power(p, e, k) % out.modulus;
    out.match = out.predicted == out.actual;
    out.divides = out.actual == 0;
    return out;
}

TauCoprimeWitness tau_coprime_divisibility(const Integer& n, std::uint32_t k) {
    if (n < 2 || k < 1) throw PreconditionViolated("tau_coprime_divisibility requires n >= 2, k >= 1");
    const Factorization f = factor(n);
    TauCoprimeWitness out;
    out.n = n;
    out.k = k;
    out.tau = divisor_count(f);
    Integer g;
    const Integer kz(static_cast<unsigned long>(k));
    mpz_gcd(g.get_mpz_t(), kz.get_mpz_t(), out.tau.get_mpz_t());
    if (g != 1)
        throw PreconditionViolated("gcd(k, tau(n)) = " + g.get_str() + " for n = " + n.get_str());
    out.sigma = sigma(f);
    out.sigma_k = sigma_pow(f, k);
    out.divides = out.sigma_k % out.sigma == 0;
    if (out.divides) out.quotient = Integer(out.sigma_k / out.sigma);
    return out;
}

OddKReport odd_k_divisibility(const Integer& n, std::uint32_t k_max_odd) {
    if (n < 2) throw PreconditionViolated("odd_k_divisibility requires n >= 2");
    const Factorization f = factor(n);
    if (sigma(f) % n != 0) throw NotMultiperfect(n.get_str() + " is not multiperfect");
    if (!is_power_of_two(divisor_count(f)))
        throw PreconditionViolated("tau(" + n.get_str() + ") is not a power of two");
    OddKReport out;
    out.n = n;
    out.k_max_odd = k_max_odd;
    out.all_divide = true;
    for (std::uint32_t k = 1; k <= k_max_odd; k += 2) {
        Integer residue = sigma_pow(f, k) % n;
        if (residue != 0) out.all_divide = false;
        out.residues.push_back(ResidueRow{k, std::move(residue)});
    }
    return out;
}

std::uint32_t default_period_horizon(const Integer& n) {
    const Integer l = l_invariant(factor(n));
    const Integer h = 4 * l;
    return h < 24 ? 24u : static_cast<std::uint32_t>(h.get_ui());
}

std::optional<std::uint32_t> smallest_full_period(const std::vector<Integer>& values) {
    const std::size_t size = values.size();
    for (std::size_t p = 1; p <= size / 2; ++p) {
        bool fits = true;
        for (std::size_t i = 0; i + p < size && fits; ++i) fits = values[i] == values[i + p];
        if (fits) return static_cast<std::uint32_t>(p);
    }
    return std::nullopt;
}

PeriodReport periodicity_probe(const Integer& n, std::uint32_t horizon) {
    if (n < 2) throw PreconditionViolated("periodicity_probe requires n >= 2");
    const Factorization f = factor(n);
    PeriodReport out;
    out.n = n;
    out.l = l_invariant(f);
    if (Integer(horizon) < 2 * out.l)
        throw PreconditionViolated("horizon must be at least 2 L = " + Integer(2 * out.l).get_str());
    out.horizon = horizon;
    const Integer modulus = sigma(f);
    out.residues.reserve(horizon);
    for (std::uint32_t k = 1; k <= horizon; ++k) out.residues.push_back(sigma_pow_mod(f, k, modulus));
    out.observed_period = smallest_full_period(out.residues);
    if (out.observed_period) out.divides_l = out.l % *out.observed_period == 0;
    return out;
}

PeriodReport periodicity_probe(const Integer& n) { return periodicity_probe(n, default_period_horizon(n)); }

StructureReport conjecture_structure_check(const Integer& n) {
    if (n < 2) throw PreconditionViolated("conjecture_structure_check requires n >= 2");
    const Factorization f = factor(n);
    StructureReport out;
    out.n = n;
    const bool multiperfect = sigma(f) % n == 0;
    const bool sigma2_is_2 = sigma_pow(f, 2) % n == 2 % n;
    const bool four_divides = n % 4 == 0;
    out.checks.push_back({"sigma(n) = 0 mod n", multiperfect});
    out.checks.push_back({"sigma_2(n) = 2 mod n", sigma2_is_2});
    out.checks.push_back({"n = 0 mod 4", four_divides});
    out.satisfies_congruences = multiperfect && sigma2_is_2 && four_divides;

    std::vector<PrimePower> odd_exponent;
    for (const auto& part : f.parts()) {
        if (part.prime == 2) continue;
        out.odd_factor_multiplicities.push_back(part);
        if (part.exponent % 2 == 1) odd_exponent.push_back(part);
    }
    if (odd_exponent.size() == 1) out.distinguished_prime = odd_exponent.front().prime;
    if (!out.satisfies_congruences) return out;

    out.checks.push_back({"exactly one odd prime has odd multiplicity", odd_exponent.size() == 1});
    const bool shaped = odd_exponent.size() == 1;
    out.checks.push_back({"its multiplicity is 1 mod 4", shaped && odd_exponent.front().exponent % 4 == 1});
    out.checks.push_back({"that prime is 3 mod 4", shaped && odd_exponent.front().prime % 4 == 3});
    return out;
}

std::vector<IterateVsPowerSumRow> iterate_vs_powersum_report(const Integer& n, std::uint32_t k_max,
                                                             const Budget& budget) {
    if (n < 2) throw PreconditionViolated("iterate_vs_powersum_report requires n >= 2");
    const Factorization f = factor(n);
    TraceOptions options;
    options.store_factorization_digits = 0;
    const SigmaTrace trace = iterate_sigma(n, k_max, budget, nullptr, options);
    std::vector<IterateVsPowerSumRow> rows;
    for (std::uint32_t k = 1; k <= k_max; ++k) {
        IterateVsPowerSumRow row;
        row.k = k;
        if (k < trace.entries.size()) row.iterate_residue = trace.entries[k].residue;
        row.powersum_residue = sigma_pow(f, k) % n;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sigma_lab
