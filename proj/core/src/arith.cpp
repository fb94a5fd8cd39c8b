#include "sigma_lab/arith.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

namespace sigma_lab {

namespace {

constexpr std::array<unsigned long, 13> kDeterministicBases = {2,  3,  5,  7,  11, 13, 17,
                                                               19, 23, 29, 31, 37, 41};
constexpr unsigned kRandomRounds = 64;
constexpr std::uint32_t kPm1Bound = 10'000;
constexpr std::size_t kRememberDigits = 11;

// Bases 2..41 are a proven witness set below this bound.
const Integer& deterministic_limit() {
    static const Integer limit("3317044064679887385961981");
    return limit;
}

std::vector<std::uint32_t> sieve_primes(std::uint32_t bound) {
    std::vector<bool> composite(bound, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i < bound; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = std::uint64_t{i} * i; j < bound; j += i) composite[j] = true;
    }
    return primes;
}

bool strong_probable_prime(const Integer& n, const Integer& base, const Integer& odd_part,
                           unsigned long twos) {
    const Integer n_minus_1 = n - 1;
    Integer x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), odd_part.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) return true;
    for (unsigned long i = 1; i < twos; ++i) {
        x = x * x % n;
        if (x == n_minus_1) return true;
        if (x == 1) return false;
    }
    return false;
}

Integer abs_diff(const Integer& a, const Integer& b) { return a > b ? Integer(a - b) : Integer(b - a); }

// Pollard p-1, stage one only.
std::optional<Integer> pollard_pm1(const Integer& n, BudgetMeter& meter) {
    Integer a = 2;
    std::uint64_t steps = 0;
    for (const std::uint32_t q : small_primes()) {
        if (q > kPm1Bound) break;
        std::uint64_t power = q;
        while (power * q <= kPm1Bound) power *= q;
        mpz_powm_ui(a.get_mpz_t(), a.get_mpz_t(), power, n.get_mpz_t());
        ++steps;
    }
    meter.charge(steps);
    Integer g;
    const Integer a_minus_1 = a - 1;
    mpz_gcd(g.get_mpz_t(), a_minus_1.get_mpz_t(), n.get_mpz_t());
    if (g > 1 && g < n) return g;
    return std::nullopt;
}

// Brent's variant of Pollard rho. Every evaluation of the polynomial is one probe step.
Integer pollard_brent(const Integer& n, BudgetMeter& meter) {
    constexpr std::uint64_t kBatch = 128;
    for (unsigned long c = 1;; ++c) {
        auto step = [&](Integer& v) {
            v = v * v + c;
            v %= n;
        };
        Integer y = 2, x, ys, q = 1, g = 1;
        std::uint64_t r = 1;
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) step(y);
            meter.charge(r);
            std::uint64_t k = 0;
            do {
                ys = y;
                const std::uint64_t len = std::min(kBatch, r - k);
                for (std::uint64_t i = 0; i < len; ++i) {
                    step(y);
                    q = q * abs_diff(x, y) % n;
                }
                meter.charge(len);
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += kBatch;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                step(ys);
                meter.charge(1);
                const Integer diff = abs_diff(x, ys);
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void push_part(std::vector<PrimePower>& out, const Integer& p, std::uint32_t e) {
    out.push_back(PrimePower{p, e});
}

// n has no prime factor below kTrialBound.
void split_large(const Integer& n, std::uint32_t multiplicity, BudgetMeter& meter,
                 FactorSource* cache, std::vector<PrimePower>& out) {
    if (n == 1) return;
    if (cache) {
        if (auto hit = cache->lookup(n)) {
            for (const auto& part : hit->parts()) push_part(out, part.prime, part.exponent * multiplicity);
            return;
        }
    }
    if (is_prime(n)) {
        push_part(out, n, multiplicity);
        return;
    }
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        const auto bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        for (unsigned long e = 2; e <= bits; ++e) {
            Integer root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), e) != 0) {
                split_large(root, multiplicity * static_cast<std::uint32_t>(e), meter, cache, out);
                return;
            }
        }
    }
    Integer d;
    if (auto found = pollard_pm1(n, meter)) {
        d = *found;
    } else {
        d = pollard_brent(n, meter);
    }
    split_large(d, multiplicity, meter, cache, out);
    split_large(Integer(n / d), multiplicity, meter, cache, out);
}

std::vector<std::uint32_t> divisors_of(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        out.push_back(d);
        if (d != n / d) out.push_back(n / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factorization

Factorization Factorization::from_parts(std::vector<PrimePower> parts) {
    Integer value = 1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& part = parts[i];
        if (part.exponent == 0) throw InvalidFactorization("exponent must be at least 1");
        if (i > 0 && parts[i - 1].prime >= part.prime)
            throw InvalidFactorization("parts must be strictly increasing by prime");
        if (!is_prime(part.prime))
            throw InvalidFactorization("part " + part.prime.get_str() + " is not prime");
        Integer pe;
        mpz_pow_ui(pe.get_mpz_t(), part.prime.get_mpz_t(), part.exponent);
        value *= pe;
    }
    return Factorization(std::move(value), std::move(parts));
}

Factorization Factorization::checked(const Integer& value, std::vector<PrimePower> parts) {
    auto f = from_parts(std::move(parts));
    if (f.value() != value)
        throw InvalidFactorization("product " + f.value().get_str() + " does not equal " +
                                   value.get_str());
    return f;
}

Factorization Factorization::from_certified(std::vector<PrimePower> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    std::vector<PrimePower> merged;
    merged.reserve(parts.size());
    for (auto& part : parts) {
        if (!merged.empty() && merged.back().prime == part.prime) {
            merged.back().exponent += part.exponent;
        } else {
            merged.push_back(std::move(part));
        }
    }
    Integer value = 1;
    for (const auto& part : merged) {
        Integer pe;
        mpz_pow_ui(pe.get_mpz_t(), part.prime.get_mpz_t(), part.exponent);
        value *= pe;
    }
    return Factorization(std::move(value), std::move(merged));
}

std::string Factorization::to_string() const {
    if (parts_.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i > 0) os << " * ";
        os << parts_[i].prime.get_str();
        if (parts_[i].exponent > 1) os << '^' << parts_[i].exponent;
    }
    return os.str();
}

Factorization multiply(const Factorization& a, const Factorization& b) {
    std::vector<PrimePower> parts = a.parts();
    parts.insert(parts.end(), b.parts().begin(), b.parts().end());
    return Factorization::from_certified(std::move(parts));
}

// ---------------------------------------------------------------------------
// ExactRatio

ExactRatio::ExactRatio(const Integer& numerator, const Integer& denominator) {
    if (denominator <= 0) throw std::invalid_argument("ratio denominator must be positive");
    if (numerator < 0) throw std::invalid_argument("ratio numerator must be non-negative");
    q_ = mpq_class(numerator, denominator);
    q_.canonicalize();
}

ExactRatio::ExactRatio(mpq_class q) : q_(std::move(q)) {
    q_.canonicalize();
    if (q_ < 0) throw std::invalid_argument("ratio must be non-negative");
}

std::string ExactRatio::to_string() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

ExactRatio pow(const ExactRatio& base, unsigned long exponent) {
    Integer num, den;
    const Integer bn = base.numerator();
    const Integer bd = base.denominator();
    mpz_pow_ui(num.get_mpz_t(), bn.get_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), bd.get_mpz_t(), exponent);
    return ExactRatio(num, den);
}

// ---------------------------------------------------------------------------
// Budget

void Budget::validate() const {
    if (max_work == 0) throw std::invalid_argument("budget max_work must be positive");
    if (max_digits == 0) throw std::invalid_argument("budget max_digits must be positive");
}

BudgetMeter::BudgetMeter(Budget budget) : budget_(budget) { budget_.validate(); }

void BudgetMeter::charge(std::uint64_t steps) {
    if (steps > budget_.max_work - used_) {
        used_ = budget_.max_work;
        throw BudgetExhausted("factorization work budget of " + std::to_string(budget_.max_work) +
                              " probe steps exhausted");
    }
    used_ += steps;
}

void BudgetMeter::require_digits(const Integer& n) const {
    const auto digits = decimal_digits(n);
    if (digits > budget_.max_digits)
        throw DigitLimit(std::to_string(digits) + "-digit value exceeds the limit of " +
                         std::to_string(budget_.max_digits) + " digits");
}

// ---------------------------------------------------------------------------
// Primality and factoring

std::size_t decimal_digits(const Integer& n) {
    if (n == 0) return 1;
    std::size_t estimate = mpz_sizeinbase(n.get_mpz_t(), 10);
    Integer lower;
    mpz_ui_pow_ui(lower.get_mpz_t(), 10, estimate - 1);
    return abs(n) < lower ? estimate - 1 : estimate;
}

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = sieve_primes(kTrialBound);
    return primes;
}

bool is_prime(const Integer& n) {
    if (n < 2) return false;
    for (const std::uint32_t p : small_primes()) {
        if (p > 1000) break;
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    if (n < 1000 * 1000) return true;

    Integer odd_part = n - 1;
    const unsigned long twos = mpz_scan1(odd_part.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(odd_part.get_mpz_t(), odd_part.get_mpz_t(), twos);

    for (const unsigned long base : kDeterministicBases) {
        if (!strong_probable_prime(n, Integer(base), odd_part, twos)) return false;
    }
    if (n < deterministic_limit()) return true;

    // Fixed seed keeps the verdict reproducible from run to run.
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(0x5157);
    const Integer span = n - 3;
    for (unsigned round = kDeterministicBases.size(); round < kRandomRounds; ++round) {
        const Integer base = rng.get_z_range(span) + 2;
        if (!strong_probable_prime(n, base, odd_part, twos)) return false;
    }
    return true;
}

bool is_square(const Integer& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

Factorization factor(const Integer& n, const Budget& budget) {
    BudgetMeter meter(budget);
    return factor(n, meter);
}

Factorization factor(const Integer& n, BudgetMeter& meter, FactorSource* cache) {
    if (n < 1) throw std::invalid_argument("factor requires n >= 1");
    meter.require_digits(n);
    if (cache) {
        if (auto hit = cache->lookup(n)) return *hit;
    }

    std::vector<PrimePower> parts;
    Integer rest = n;
    for (const std::uint32_t p : small_primes()) {
        if (rest == 1) break;
        if (rest < static_cast<unsigned long>(std::uint64_t{p} * p)) break;
        if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) continue;
        std::uint32_t e = 0;
        do {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
            ++e;
        } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
        parts.push_back(PrimePower{Integer(p), e});
    }
    if (rest > 1) {
        if (rest < static_cast<unsigned long>(std::uint64_t{kTrialBound} * kTrialBound)) {
            parts.push_back(PrimePower{rest, 1});
        } else {
            split_large(rest, 1, meter, cache, parts);
        }
    }
    auto result = Factorization::from_certified(std::move(parts));
    if (cache && decimal_digits(n) >= kRememberDigits) cache->remember(result);
    return result;
}

Factorization sigma_factorization(const Factorization& f, BudgetMeter& meter, FactorSource* cache) {
    Factorization result;
    for (const auto& part : f.parts()) {
        for (const std::uint32_t d : divisors_of(part.exponent + 1)) {
            if (d == 1) continue;
            result = multiply(result, factor(cyclotomic_value(d, part.prime), meter, cache));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Multiplicative functions

Integer cyclotomic_value(std::uint32_t d, const Integer& x) {
    if (d == 0) throw std::invalid_argument("cyclotomic index must be positive");
    // Phi_d(x) = prod over k | d of (x^k - 1)^mu(d/k)
    Integer num = 1, den = 1;
    for (const std::uint32_t k : divisors_of(d)) {
        std::uint32_t m = d / k;
        int mu = 1;
        for (std::uint32_t p = 2; p * p <= m; ++p) {
            if (m % p != 0) continue;
            m /= p;
            if (m % p == 0) {
                mu = 0;
                break;
            }
            mu = -mu;
        }
        if (mu != 0 && m > 1) mu = -mu;
        if (mu == 0) continue;
        Integer term;
        mpz_pow_ui(term.get_mpz_t(), x.get_mpz_t(), k);
        term -= 1;
        (mu > 0 ? num : den) *= term;
    }
    Integer out;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

Integer sigma_prime_power(const Integer& p, std::uint32_t e) {
    Integer pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e + 1);
    Integer out;
    const Integer num = pe - 1;
    const Integer den = p - 1;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

Integer sigma_pow_prime_power(const Integer& p, std::uint32_t e, std::uint32_t k) {
    if (k == 0) return Integer(e + 1);
    Integer pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);
    Integer sum = 1, term = 1;
    for (std::uint32_t i = 1; i <= e; ++i) {
        term *= pk;
        sum += term;
    }
    return sum;
}

Integer sigma(const Factorization& f) {
    Integer out = 1;
    for (const auto& part : f.parts()) out *= sigma_prime_power(part.prime, part.exponent);
    return out;
}

Integer sigma_pow(const Factorization& f, std::uint32_t k) {
    Integer out = 1;
    for (const auto& part : f.parts()) out *= sigma_pow_prime_power(part.prime, part.exponent, k);
    return out;
}

Integer aliquot(const Factorization& f) { return sigma(f) - f.value(); }

ExactRatio abundancy(const Factorization& f) { return ExactRatio(sigma(f), f.value()); }

Integer l_invariant(const Factorization& f) {
    Integer out = 1;
    for (const auto& part : f.parts()) {
        const Integer e1 = part.exponent + 1;
        mpz_lcm(out.get_mpz_t(), out.get_mpz_t(), e1.get_mpz_t());
    }
    return out;
}

Integer divisor_count(const Factorization& f) {
    Integer out = 1;
    for (const auto& part : f.parts()) out *= part.exponent + 1;
    return out;
}

std::size_t distinct_prime_count(const Factorization& f) { return f.parts().size(); }

bool is_squarefree(const Factorization& f) {
    return std::all_of(f.parts().begin(), f.parts().end(),
                       [](const PrimePower& part) { return part.exponent == 1; });
}

AbundancyBounds abundancy_bounds(const Factorization& f) {
    if (f.value() < 2) throw PreconditionViolated("abundancy bounds need m >= 2");
    mpq_class lower = 1, upper = 1;
    for (const auto& part : f.parts()) {
        lower *= mpq_class(part.prime + 1, part.prime);
        upper *= mpq_class(part.prime, part.prime - 1);
    }
    return {ExactRatio(lower), ExactRatio(upper)};
}

}  // namespace sigma_lab
