#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace sigma_lab {

using Integer = mpz_class;

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DigitLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidFactorization : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PreconditionViolated : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotMultiperfect : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PrimePower {
    Integer prime;
    std::uint32_t exponent = 1;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive integer together with its canonical prime-power decomposition.
///
/// Parts are strictly increasing by prime and their product equals value().
/// The empty decomposition belongs to 1 and only to 1.
class Factorization {
public:
    Factorization() : value_(1) {}

    /// Validates every part (primality, ordering, exponent) and computes the value.
    static Factorization from_parts(std::vector<PrimePower> parts);

    /// Like from_parts, and additionally requires the product to equal `value`.
    static Factorization checked(const Integer& value, std::vector<PrimePower> parts);

    /// For parts whose primes were already certified by the caller. Parts may be
    /// unsorted and may repeat a prime; they are canonicalized here.
    static Factorization from_certified(std::vector<PrimePower> parts);

    const Integer& value() const noexcept { return value_; }
    const std::vector<PrimePower>& parts() const noexcept { return parts_; }
    bool is_one() const noexcept { return parts_.empty(); }

    /// "2^2 * 3", or "1" for the empty product.
    std::string to_string() const;

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    Factorization(Integer value, std::vector<PrimePower> parts)
        : value_(std::move(value)), parts_(std::move(parts)) {}

    Integer value_;
    std::vector<PrimePower> parts_;
};

Factorization multiply(const Factorization& a, const Factorization& b);

/// Reduced non-negative rational with positive denominator.
class ExactRatio {
public:
    ExactRatio() : q_(0) {}
    ExactRatio(const Integer& numerator, const Integer& denominator);
    explicit ExactRatio(const Integer& whole) : q_(whole) {}
    explicit ExactRatio(mpq_class q);

    Integer numerator() const { return q_.get_num(); }
    Integer denominator() const { return q_.get_den(); }
    bool is_integer() const { return q_.get_den() == 1; }
    const mpq_class& as_mpq() const noexcept { return q_; }
    double to_double() const { return q_.get_d(); }

    /// "7/3", or "2" when the denominator is 1.
    std::string to_string() const;

    friend ExactRatio operator*(const ExactRatio& a, const ExactRatio& b) {
        return ExactRatio(mpq_class(a.q_ * b.q_));
    }
    friend bool operator==(const ExactRatio& a, const ExactRatio& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class q_;
};

ExactRatio pow(const ExactRatio& base, unsigned long exponent);

struct Budget {
    std::uint64_t max_work = 10'000'000;
    std::uint32_t max_digits = 2000;

    void validate() const;
};

/// Counts factorization probe steps against a Budget. One meter may be shared
/// by a sequence of factorizations so that the whole sequence has one allowance.
class BudgetMeter {
public:
    explicit BudgetMeter(Budget budget);

    /// Throws BudgetExhausted once the allowance would be exceeded.
    void charge(std::uint64_t steps);
    void require_digits(const Integer& n) const;

    const Budget& budget() const noexcept { return budget_; }
    std::uint64_t used() const noexcept { return used_; }
    std::uint64_t remaining() const noexcept { return budget_.max_work - used_; }

private:
    Budget budget_;
    std::uint64_t used_ = 0;
};

/// Lookup/remember hooks for previously computed factorizations.
class FactorSource {
public:
    virtual ~FactorSource() = default;
    virtual std::optional<Factorization> lookup(const Integer& value) const = 0;
    virtual void remember(const Factorization& f) = 0;
};

std::size_t decimal_digits(const Integer& n);

bool is_prime(const Integer& n);
bool is_square(const Integer& n);

/// Primes below the trial-division bound, ascending.
const std::vector<std::uint32_t>& small_primes();
inline constexpr std::uint32_t kTrialBound = 100'000;

Factorization factor(const Integer& n, const Budget& budget = {});
Factorization factor(const Integer& n, BudgetMeter& meter, FactorSource* cache = nullptr);

/// Factorization of sigma(f.value()), built from the factorizations of the
/// individual sigma(p^e) terms (split further along cyclotomic values).
Factorization sigma_factorization(const Factorization& f, BudgetMeter& meter,
                                  FactorSource* cache = nullptr);

/// (p^(e+1) - 1) / (p - 1)
Integer sigma_prime_power(const Integer& p, std::uint32_t e);
/// Sum of p^(i*k) for i = 0..e.
Integer sigma_pow_prime_power(const Integer& p, std::uint32_t e, std::uint32_t k);

Integer sigma(const Factorization& f);
Integer sigma_pow(const Factorization& f, std::uint32_t k);
Integer aliquot(const Factorization& f);
ExactRatio abundancy(const Factorization& f);
Integer l_invariant(const Factorization& f);
Integer divisor_count(const Factorization& f);
std::size_t distinct_prime_count(const Factorization& f);
bool is_squarefree(const Factorization& f);

struct AbundancyBounds {
    ExactRatio lower;  // product of (q+1)/q
    ExactRatio upper;  // product of q/(q-1)
};

/// Requires f.value() >= 2. lower <= S(m) < upper, with equality at the lower
/// end exactly when m is squarefree.
AbundancyBounds abundancy_bounds(const Factorization& f);

/// Value of the d-th cyclotomic polynomial at x, d >= 1.
Integer cyclotomic_value(std::uint32_t d, const Integer& x);

}  // namespace sigma_lab
