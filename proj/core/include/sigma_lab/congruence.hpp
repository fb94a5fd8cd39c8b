#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab {

enum class CongruenceStatus { Resolved, UnresolvedBudget, NoKWithinHorizon };
std::string_view to_string(CongruenceStatus status);

struct ResidueRow {
    std::uint32_t k = 0;
    Integer residue;
};

struct CongruenceReport {
    Integer n;
    std::string goal;
    std::optional<std::uint32_t> smallest_k;
    std::uint32_t k_horizon = 0;
    std::vector<ResidueRow> residue_table;  // k = 1 .. last evaluated
    CongruenceStatus status = CongruenceStatus::NoKWithinHorizon;
};

inline constexpr std::string_view kGoalDivides = "n | sigma^k(n)";
inline constexpr std::string_view kGoalFirstFailure = "n does not divide sigma^k(n)";

/// Smallest k >= 1 with n | sigma^k(n), k <= k_max.
CongruenceReport smallest_k_divisibility(const Integer& n, std::uint32_t k_max,
                                         const Budget& budget = {}, FactorSource* cache = nullptr);

/// Smallest k >= 1 with n not dividing sigma^k(n), for multiperfect n >= 6.
CongruenceReport metaperfect_first_failure(const Integer& n, std::uint32_t k_max,
                                           const Budget& budget = {}, FactorSource* cache = nullptr);

struct PowerSumResidue {
    Integer p;
    std::uint32_t e = 0;
    std::uint32_t k = 0;
    std::uint32_t r = 0;   // gcd(k, e+1)
    Integer modulus;       // sigma(p^e)
    Integer predicted;     // r (p^(e+1)-1)/(p^r-1) mod sigma(p^e)
    Integer actual;        // sigma_k(p^e) mod sigma(p^e)
    bool match = false;
    bool divides = false;  // sigma(p^e) | sigma_k(p^e)
};

PowerSumResidue powersum_residue(const Integer& p, std::uint32_t e, std::uint32_t k);

struct TauCoprimeWitness {
    Integer n;
    std::uint32_t k = 0;
    Integer tau;
    Integer sigma;
    Integer sigma_k;
    std::optional<Integer> quotient;  // sigma_k / sigma when it divides
    bool divides = false;
};

/// Requires gcd(k, tau(n)) = 1; throws PreconditionViolated otherwise.
TauCoprimeWitness tau_coprime_divisibility(const Integer& n, std::uint32_t k);

struct OddKReport {
    Integer n;
    std::uint32_t k_max_odd = 0;
    std::vector<ResidueRow> residues;  // sigma_k(n) mod n, odd k only
    bool all_divide = false;
};

/// n multiperfect with tau(n) a power of two.
OddKReport odd_k_divisibility(const Integer& n, std::uint32_t k_max_odd);

struct PeriodReport {
    Integer n;
    Integer l;
    std::uint32_t horizon = 0;
    std::vector<Integer> residues;  // sigma_k(n) mod sigma(n), k = 1..horizon
    std::optional<std::uint32_t> observed_period;
    std::optional<bool> divides_l;  // present with observed_period
};

std::uint32_t default_period_horizon(const Integer& n);

/// Requires horizon >= 2 L(n).
PeriodReport periodicity_probe(const Integer& n, std::uint32_t horizon);
PeriodReport periodicity_probe(const Integer& n);

/// Least p <= size/2 for which the whole sequence is p-periodic.
std::optional<std::uint32_t> smallest_full_period(const std::vector<Integer>& values);

struct NamedCheck {
    std::string name;
    bool passed = false;
};

struct StructureReport {
    Integer n;
    bool satisfies_congruences = false;
    std::vector<PrimePower> odd_factor_multiplicities;
    std::optional<Integer> distinguished_prime;
    std::vector<NamedCheck> checks;
};

/// Tests sigma(n) = 0, sigma_2(n) = 2 (mod n) and n = 0 (mod 4); when all three
/// hold, checks the forced shape of the odd part of n.
StructureReport conjecture_structure_check(const Integer& n);

struct IterateVsPowerSumRow {
    std::uint32_t k = 0;
    std::optional<Integer> iterate_residue;  // sigma^k(n) mod n, absent past the budget
    Integer powersum_residue;                // sigma_k(n) mod n
};

std::vector<IterateVsPowerSumRow> iterate_vs_powersum_report(const Integer& n, std::uint32_t k_max,
                                                             const Budget& budget = {});

}  // namespace sigma_lab
