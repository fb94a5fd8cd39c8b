#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab {

struct MultiperfectRecord {
    Integer n;
    Factorization factorization;
    Integer index;  // sigma(n) / n
    Integer l;
    bool l_prime = false;
    bool squarefree = false;
};

MultiperfectRecord make_multiperfect_record(const Factorization& f);

/// All 2 <= n <= limit with n | sigma(n), ascending. Sigma comes from a shared
/// smallest-prime-factor sieve; the range is split across `jobs` workers.
std::vector<MultiperfectRecord> multiperfect_scan(std::uint64_t limit, unsigned jobs = 1);

std::vector<MultiperfectRecord> lprime_filter(const std::vector<MultiperfectRecord>& records);

std::vector<MultiperfectRecord> squarefree_multiperfect_scan(std::uint64_t limit, unsigned jobs = 1);

enum class FactorClass { EqualsL, OneModL, Violation };
std::string_view to_string(FactorClass c);

struct ClassifiedFactor {
    Integer q;
    std::uint32_t exponent = 0;
    FactorClass cls = FactorClass::Violation;
};

struct CyclotomicReport {
    Integer p;
    Integer l;
    Integer value;  // sigma(p^(L-1))
    bool p_equals_l = false;
    std::vector<ClassifiedFactor> factors;

    std::size_t violations() const;
};

/// Factors sigma(p^(L-1)) = (p^L - 1)/(p - 1) and classifies each prime as L,
/// 1 mod L, or neither. Both p and L must be prime.
CyclotomicReport cyclotomic_factor_check(const Integer& p, const Integer& l, const Budget& budget = {});

struct LValuation {
    Integer q;
    Integer l;
    std::uint32_t valuation = 0;
    bool exact_once = false;
};

/// Exponent of L in sigma(q^(L-1)) for odd prime L and prime q = 1 mod L.
LValuation exact_l_divisibility(const Integer& q, const Integer& l);

/// Exponent of 2 in sigma(q) = q + 1. Reported only; the "exactly once" form
/// fails for L = 2 whenever q = 3 mod 4.
std::uint32_t l2_valuation_diagnostic(const Integer& q);

struct BoundCheck {
    ExactRatio lhs;  // (L/(L-1))^(m+1)
    ExactRatio mid;  // sigma(n)/n
    ExactRatio rhs;  // L
    bool consistent = false;
};

/// (L/(L-1))^(m+1) >= index >= L for arbitrary (L, m, index) triples.
BoundCheck result2_bound_check(const Integer& l, std::uint32_t m_count, const ExactRatio& index);

/// Same check with m counted from the record's primes = 1 mod L.
BoundCheck result2_bound_check(const MultiperfectRecord& record);

std::uint32_t count_primes_one_mod(const Factorization& f, const Integer& l);

/// Largest prime factor at most one more than the second largest.
/// f must be squarefree with at least two prime factors.
bool prime_gap_check(const Factorization& f);

class TooFewFactors : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sigma_lab
