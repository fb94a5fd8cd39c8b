#include "sigma_lab/multiperfect.hpp"

#include <algorithm>

#include "sigma_lab/parallel.hpp"
#include "sigma_lab/sieve.hpp"

namespace sigma_lab {

namespace {

constexpr std::uint64_t kScanChunk = 1 << 16;

void require_prime(const Integer& v, const char* what) {
    if (!is_prime(v)) throw PreconditionViolated(std::string(what) + " = " + v.get_str() + " is not prime");
}

}  // namespace

MultiperfectRecord make_multiperfect_record(const Factorization& f) {
    const Integer s = sigma(f);
    if (f.value() < 2 || s % f.value() != 0)
        throw NotMultiperfect(f.value().get_str() + " is not multiperfect");
    MultiperfectRecord record;
    record.n = f.value();
    record.factorization = f;
    record.index = s / f.value();
    record.l = l_invariant(f);
    record.l_prime = is_prime(record.l);
    record.squarefree = is_squarefree(f);
    return record;
}

std::vector<MultiperfectRecord> multiperfect_scan(std::uint64_t limit, unsigned jobs) {
    if (limit < 2) throw PreconditionViolated("multiperfect_scan requires limit >= 2");
    const SmallestFactorSieve sieve(limit);
    const std::uint64_t chunks = (limit - 2) / kScanChunk + 1;
    const auto found = parallel_map_range(0, chunks - 1, jobs, [&](std::uint64_t c) {
        std::vector<std::uint64_t> hits;
        const std::uint64_t lo = 2 + c * kScanChunk;
        const std::uint64_t hi = std::min(limit, lo + kScanChunk - 1);
        for (std::uint64_t n = lo; n <= hi; ++n) {
            if (sieve.sigma(n) % n == 0) hits.push_back(n);
        }
        return hits;
    });
    std::vector<MultiperfectRecord> records;
    for (const auto& chunk : found) {
        for (const std::uint64_t n : chunk) records.push_back(make_multiperfect_record(sieve.factor(n)));
    }
    return records;
}

std::vector<MultiperfectRecord> lprime_filter(const std::vector<MultiperfectRecord>& records) {
    std::vector<MultiperfectRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [](const MultiperfectRecord& r) { return is_prime(r.l); });
    return out;
}

std::vector<MultiperfectRecord> squarefree_multiperfect_scan(std::uint64_t limit, unsigned jobs) {
    auto records = multiperfect_scan(limit, jobs);
    std::erase_if(records, [](const MultiperfectRecord& r) { return !r.squarefree; });
    return records;
}

std::string_view to_string(FactorClass c) {
    switch (c) {
        case FactorClass::EqualsL: return "EQUALS_L";
        case FactorClass::OneModL: return "ONE_MOD_L";
        case FactorClass::Violation: return "VIOLATION";
    }
    return "?";
}

std::size_t CyclotomicReport::violations() const {
    return static_cast<std::size_t>(std::count_if(factors.begin(), factors.end(), [](const ClassifiedFactor& f) {
        return f.cls == FactorClass::Violation;
    }));
}

CyclotomicReport cyclotomic_factor_check(const Integer& p, const Integer& l, const Budget& budget) {
    require_prime(p, "p");
    require_prime(l, "L");
    if (!l.fits_ulong_p() || l.get_ui() > 0xffffffffUL) throw PreconditionViolated("L too large");
    CyclotomicReport report;
    report.p = p;
    report.l = l;
    report.p_equals_l = p == l;
    report.value = sigma_prime_power(p, static_cast<std::uint32_t>(l.get_ui() - 1));
    const Factorization f = factor(report.value, budget);
    for (const auto& part : f.parts()) {
        ClassifiedFactor cf;
        cf.q = part.prime;
        cf.exponent = part.exponent;
        if (part.prime == l) {
            cf.cls = FactorClass::EqualsL;
        } else if (part.prime % l == 1) {
            cf.cls = FactorClass::OneModL;
        } else {
            cf.cls = FactorClass::Violation;
        }
        report.factors.push_back(std::move(cf));
    }
    return report;
}

LValuation exact_l_divisibility(const Integer& q, const Integer& l) {
    require_prime(q, "q");
    require_prime(l, "L");
    if (l == 2) throw PreconditionViolated("L must be odd; use l2_valuation_diagnostic for L = 2");
    if (q % l != 1) throw PreconditionViolated("q must be 1 mod L");
    if (!l.fits_ulong_p() || l.get_ui() > 0xffffffffUL) throw PreconditionViolated("L too large");
    LValuation out;
    out.q = q;
    out.l = l;
    Integer v = sigma_prime_power(q, static_cast<std::uint32_t>(l.get_ui() - 1));
    out.valuation = static_cast<std::uint32_t>(mpz_remove(v.get_mpz_t(), v.get_mpz_t(), l.get_mpz_t()));
    out.exact_once = out.valuation == 1;
    return out;
}

std::uint32_t l2_valuation_diagnostic(const Integer& q) {
    require_prime(q, "q");
    const Integer s = q + 1;
    return static_cast<std::uint32_t>(mpz_scan1(s.get_mpz_t(), 0));
}

BoundCheck result2_bound_check(const Integer& l, std::uint32_t m_count, const ExactRatio& index) {
    if (l < 2) throw PreconditionViolated("L must be at least 2");
    BoundCheck out;
    out.lhs = pow(ExactRatio(l, Integer(l - 1)), m_count + 1);
    out.mid = index;
    out.rhs = ExactRatio(l);
    out.consistent = out.lhs >= out.mid && out.mid >= out.rhs;
    return out;
}

std::uint32_t count_primes_one_mod(const Factorization& f, const Integer& l) {
    return static_cast<std::uint32_t>(std::count_if(f.parts().begin(), f.parts().end(),
                                                    [&](const PrimePower& part) { return part.prime % l == 1; }));
}

BoundCheck result2_bound_check(const MultiperfectRecord& record) {
    if (!record.l_prime) throw PreconditionViolated("record's L is not prime");
    return result2_bound_check(record.l, count_primes_one_mod(record.factorization, record.l),
                               ExactRatio(record.index));
}

bool prime_gap_check(const Factorization& f) {
    if (!is_squarefree(f)) throw PreconditionViolated(f.value().get_str() + " is not squarefree");
    const auto& parts = f.parts();
    if (parts.size() < 2) throw TooFewFactors("prime_gap_check needs at least two prime factors");
    return parts.back().prime <= parts[parts.size() - 2].prime + 1;
}

}  // namespace sigma_lab
