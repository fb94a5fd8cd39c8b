#include <doctest.h>

#include "oracles.hpp"
#include "sigma_lab/multiperfect.hpp"

using namespace sigma_lab;

namespace {

Integer Z(unsigned long v) { return Integer(v); }

std::vector<std::uint64_t> ns(const std::vector<MultiperfectRecord>& records) {
    std::vector<std::uint64_t> out;
    for (const auto& r : records) out.push_back(r.n.get_ui());
    return out;
}

}  // namespace

TEST_CASE("multiperfect_scan examples") {
    CHECK(ns(multiperfect_scan(100)) == std::vector<std::uint64_t>{6, 28});
    CHECK(multiperfect_scan(5).empty());
    CHECK(ns(multiperfect_scan(1'000'000)) ==
          std::vector<std::uint64_t>{6, 28, 120, 496, 672, 8128, 30240, 32760, 523776});

    const auto records = multiperfect_scan(1000);
    REQUIRE(records.size() == 5);
    CHECK(records[2].index == 3);  // 120
    CHECK(records[2].l == 4);
    CHECK(records[1].l == 6);  // 28 = 2^2 * 7
    CHECK_FALSE(records[1].l_prime);
    CHECK(records[0].l_prime);
    CHECK(records[0].squarefree);
}

TEST_CASE("multiperfect_scan agrees with a divisor-sum sieve and with any worker count") {
    const auto expected = oracle::multiperfect_up_to(200'000);
    CHECK(ns(multiperfect_scan(200'000)) == expected);
    CHECK(ns(multiperfect_scan(200'000, 4)) == expected);
    CHECK(ns(multiperfect_scan(10'000, 3)) == oracle::multiperfect_up_to(10'000));
}

TEST_CASE("record fields are consistent") {
    for (const auto& r : multiperfect_scan(1'000'000)) {
        REQUIRE(r.factorization.value() == r.n);
        REQUIRE(r.index * r.n == sigma(r.factorization));
        REQUIRE(r.l == l_invariant(r.factorization));
        REQUIRE(r.l_prime == is_prime(r.l));
        REQUIRE(r.squarefree == is_squarefree(r.factorization));
    }
    CHECK_THROWS_AS(make_multiperfect_record(factor(Z(12))), NotMultiperfect);
}

TEST_CASE("lprime_filter and squarefree scan") {
    CHECK(ns(lprime_filter(multiperfect_scan(1'000'000))) == std::vector<std::uint64_t>{6});
    CHECK(ns(squarefree_multiperfect_scan(1'000'000, 2)) == std::vector<std::uint64_t>{6});
}

TEST_CASE("cyclotomic_factor_check examples") {
    const auto a = cyclotomic_factor_check(Z(3), Z(5));
    CHECK(a.value == 121);
    REQUIRE(a.factors.size() == 1);
    CHECK(a.factors[0].q == 11);
    CHECK(a.factors[0].exponent == 2);
    CHECK(a.factors[0].cls == FactorClass::OneModL);
    CHECK(a.violations() == 0);

    const auto b = cyclotomic_factor_check(Z(7), Z(2));
    CHECK(b.value == 8);
    REQUIRE(b.factors.size() == 1);
    CHECK(b.factors[0].cls == FactorClass::EqualsL);

    const auto c = cyclotomic_factor_check(Z(2), Z(3));
    CHECK(c.value == 7);
    CHECK(c.factors[0].cls == FactorClass::OneModL);

    CHECK(cyclotomic_factor_check(Z(5), Z(5)).p_equals_l);
    CHECK_THROWS_AS(cyclotomic_factor_check(Z(4), Z(3)), PreconditionViolated);
    CHECK_THROWS_AS(cyclotomic_factor_check(Z(3), Z(9)), PreconditionViolated);
}

TEST_CASE("cyclotomic factors are L or 1 mod L on the grid") {
    std::size_t rows = 0;
    for (unsigned long p = 2; p < 100; ++p) {
        if (!oracle::is_prime(p)) continue;
        for (unsigned long l : {2UL, 3UL, 5UL, 7UL, 11UL}) {
            const auto report = cyclotomic_factor_check(Z(p), Z(l));
            REQUIRE(report.violations() == 0);
            Integer product = 1;
            for (const auto& f : report.factors) {
                REQUIRE((f.q == l) == (f.cls == FactorClass::EqualsL));
                for (std::uint32_t i = 0; i < f.exponent; ++i) product *= f.q;
            }
            REQUIRE(product == report.value);
            ++rows;
        }
    }
    CHECK(rows == 25 * 5);
}

TEST_CASE("exact_l_divisibility examples") {
    CHECK(exact_l_divisibility(Z(11), Z(5)).exact_once);
    const auto seven = exact_l_divisibility(Z(7), Z(3));  // 57 = 3 * 19
    CHECK(seven.valuation == 1);
    CHECK(exact_l_divisibility(Z(31), Z(3)).valuation == 1);  // 993 = 3 * 331

    CHECK_THROWS_AS(exact_l_divisibility(Z(5), Z(2)), PreconditionViolated);
    CHECK_THROWS_AS(exact_l_divisibility(Z(5), Z(3)), PreconditionViolated);
    CHECK_THROWS_AS(exact_l_divisibility(Z(15), Z(7)), PreconditionViolated);
}

TEST_CASE("L divides sigma(q^(L-1)) exactly once for odd L and q < 500") {
    std::size_t checked = 0;
    for (unsigned long q = 3; q < 500; ++q) {
        if (!oracle::is_prime(q)) continue;
        for (unsigned long l : {3UL, 5UL, 7UL, 11UL, 13UL}) {
            if (q % l != 1) continue;
            REQUIRE(exact_l_divisibility(Z(q), Z(l)).exact_once);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("l2_valuation_diagnostic shows the even case is different") {
    CHECK(l2_valuation_diagnostic(Z(5)) == 1);   // 6
    CHECK(l2_valuation_diagnostic(Z(3)) == 2);   // 4
    CHECK(l2_valuation_diagnostic(Z(7)) == 3);   // 8
    CHECK(l2_valuation_diagnostic(Z(13)) == 1);  // 14
}

TEST_CASE("result2_bound_check examples") {
    const auto six = result2_bound_check(make_multiperfect_record(factor(Z(6))));
    CHECK(six.lhs.to_string() == "4");
    CHECK(six.mid.to_string() == "2");
    CHECK(six.rhs.to_string() == "2");
    CHECK(six.consistent);

    CHECK(result2_bound_check(Z(3), 4, ExactRatio(Z(3))).consistent);
    const auto tight = result2_bound_check(Z(5), 2, ExactRatio(Z(5)));
    CHECK(tight.lhs.to_string() == "125/64");
    CHECK_FALSE(tight.consistent);

    CHECK(count_primes_one_mod(factor(Z(2 * 3 * 7 * 13)), Z(3)) == 2);
}

TEST_CASE("bound check holds for every L-prime multiperfect number found") {
    for (const auto& r : lprime_filter(multiperfect_scan(1'000'000))) CHECK(result2_bound_check(r).consistent);
}

TEST_CASE("prime_gap_check") {
    CHECK(prime_gap_check(factor(Z(6))));
    CHECK_FALSE(prime_gap_check(factor(Z(10))));
    CHECK_FALSE(prime_gap_check(factor(Z(42))));
    CHECK_THROWS_AS(prime_gap_check(factor(Z(7))), TooFewFactors);
    CHECK_THROWS_AS(prime_gap_check(factor(Z(12))), PreconditionViolated);
}
