#pragma once

#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "sigma_lab/arith.hpp"
#include "sigma_lab/congruence.hpp"
#include "sigma_lab/iterate.hpp"
#include "sigma_lab/multiperfect.hpp"

namespace sigma_lab {

// JSON record shapes. Every record starts with a "type" tag and keeps a fixed
// field order, so identical inputs give byte-identical lines. Arbitrary
// precision values are written as decimal strings; counts and indices as
// JSON numbers.
using Record = nlohmann::ordered_json;

Record to_record(const Factorization& f);
Record to_record(const ExactRatio& r);
Record to_record(const SigmaTrace& trace);
Record to_record(const AliquotTrace& trace);
Record to_record(const GcdSequence& seq, const Integer& start);
Record to_record(const RatioSequence& seq, const Integer& start);
Record to_record(const LenstraResult& result);
Record to_record(const ErdosReport& report);
Record to_record(const AbundancyProductCheck& check, const Integer& n);
Record to_record(const CongruenceReport& report);
Record to_record(const PowerSumResidue& residue);
Record to_record(const TauCoprimeWitness& witness);
Record to_record(const OddKReport& report);
Record to_record(const PeriodReport& report);
Record to_record(const StructureReport& report);
Record to_record(const std::vector<IterateVsPowerSumRow>& rows, const Integer& n);
Record to_record(const MultiperfectRecord& record);
Record to_record(const CyclotomicReport& report);
Record to_record(const LValuation& valuation);
Record to_record(const BoundCheck& check);

/// One JSON document per line.
class JsonlWriter {
public:
    explicit JsonlWriter(std::ostream& out) : out_(out) {}

    void emit(const Record& record);

    template <class T>
    void emit_all(const std::vector<T>& items) {
        for (const auto& item : items) emit(to_record(item));
    }

private:
    std::ostream& out_;
};

/// `n,smallest_k,status` header then one row per report.
void write_divisibility_csv(std::ostream& out, const std::vector<CongruenceReport>& reports);

}  // namespace sigma_lab
