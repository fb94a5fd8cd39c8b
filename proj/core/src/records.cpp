#include "sigma_lab/records.hpp"

#include "sigma_lab/store.hpp"

namespace sigma_lab {

namespace {

std::string str(const Integer& v) { return v.get_str(); }

Record residue_rows(const std::vector<ResidueRow>& rows) {
    Record out = Record::array();
    for (const auto& row : rows) out.push_back(Record::array({row.k, str(row.residue)}));
    return out;
}

Record trace_entries(const std::vector<TraceEntry>& entries) {
    Record out = Record::array();
    for (const auto& entry : entries) {
        Record e;
        e["k"] = entry.k;
        e["value"] = str(entry.value);
        e["factorization"] = entry.factorization ? to_record(*entry.factorization) : Record(nullptr);
        e["residue"] = str(entry.residue);
        out.push_back(std::move(e));
    }
    return out;
}

template <class T>
Record optional_number(const std::optional<T>& v) {
    return v ? Record(*v) : Record(nullptr);
}

}  // namespace

Record to_record(const Factorization& f) {
    Record parts = Record::array();
    for (const auto& part : f.parts()) parts.push_back(Record::array({str(part.prime), part.exponent}));
    return parts;
}

Record to_record(const ExactRatio& r) { return r.to_string(); }

Record to_record(const SigmaTrace& trace) {
    Record out;
    out["type"] = "sigma_trace";
    out["start"] = str(trace.start);
    out["entries"] = trace_entries(trace.entries);
    out["status"] = to_string(trace.status);
    return out;
}

Record to_record(const AliquotTrace& trace) {
    Record out;
    out["type"] = "aliquot_trace";
    out["start"] = str(trace.start);
    out["entries"] = trace_entries(trace.entries);
    out["status"] = to_string(trace.status);
    out["cycle_length"] = trace.status == AliquotStatus::Cycle ? Record(trace.cycle_length) : Record(nullptr);
    return out;
}

Record to_record(const GcdSequence& seq, const Integer& start) {
    Record out;
    out["type"] = "gcd_sequence";
    out["start"] = str(start);
    Record values = Record::array();
    for (const auto& v : seq.values) values.push_back(str(v));
    out["values"] = std::move(values);
    out["status"] = to_string(seq.status);
    return out;
}

Record to_record(const RatioSequence& seq, const Integer& start) {
    Record out;
    out["type"] = "ratio_sequence";
    out["start"] = str(start);
    Record values = Record::array();
    for (const auto& v : seq.values) values.push_back(v.to_string());
    out["values"] = std::move(values);
    out["status"] = to_string(seq.status);
    return out;
}

Record to_record(const LenstraResult& result) {
    Record out;
    out["type"] = "lenstra_chain";
    out["k"] = result.k;
    out["m_max"] = result.m_max;
    out["m"] = optional_number(result.m);
    Record chain = Record::array();
    for (const auto& v : result.chain) chain.push_back(str(v));
    out["chain"] = std::move(chain);
    return out;
}

Record to_record(const ErdosReport& report) {
    Record out;
    out["type"] = "erdos_sample";
    out["k"] = report.k;
    out["delta"] = report.delta.to_string();
    out["m_lo"] = report.m_lo;
    out["m_hi"] = report.m_hi;
    out["applicable"] = report.applicable;
    out["inapplicable"] = report.inapplicable;
    out["violations_by_step"] = report.violations_by_step;
    out["violating"] = report.violating;
    out["violating_sample"] = report.violating_sample;
    return out;
}

Record to_record(const AbundancyProductCheck& check, const Integer& n) {
    Record out;
    out["type"] = "abundancy_product";
    out["n"] = str(n);
    out["lhs"] = check.lhs.to_string();
    out["rhs"] = check.rhs.to_string();
    out["holds"] = check.holds;
    return out;
}

Record to_record(const CongruenceReport& report) {
    Record out;
    out["type"] = "congruence";
    out["n"] = str(report.n);
    out["goal"] = report.goal;
    out["smallest_k"] = optional_number(report.smallest_k);
    out["k_horizon"] = report.k_horizon;
    out["residue_table"] = residue_rows(report.residue_table);
    out["status"] = to_string(report.status);
    return out;
}

Record to_record(const PowerSumResidue& r) {
    Record out;
    out["type"] = "powersum_residue";
    out["p"] = str(r.p);
    out["e"] = r.e;
    out["k"] = r.k;
    out["r"] = r.r;
    out["modulus"] = str(r.modulus);
    out["predicted"] = str(r.predicted);
    out["actual"] = str(r.actual);
    out["match"] = r.match;
    out["divides"] = r.divides;
    return out;
}

Record to_record(const TauCoprimeWitness& w) {
    Record out;
    out["type"] = "tau_coprime";
    out["n"] = str(w.n);
    out["k"] = w.k;
    out["tau"] = str(w.tau);
    out["sigma"] = str(w.sigma);
    out["sigma_k"] = str(w.sigma_k);
    out["quotient"] = w.quotient ? Record(str(*w.quotient)) : Record(nullptr);
    out["divides"] = w.divides;
    return out;
}

Record to_record(const OddKReport& report) {
    Record out;
    out["type"] = "odd_k_divisibility";
    out["n"] = str(report.n);
    out["k_max_odd"] = report.k_max_odd;
    out["residues"] = residue_rows(report.residues);
    out["all_divide"] = report.all_divide;
    return out;
}

Record to_record(const PeriodReport& report) {
    Record out;
    out["type"] = "period";
    out["n"] = str(report.n);
    out["L"] = str(report.l);
    out["horizon"] = report.horizon;
    Record residues = Record::array();
    for (const auto& v : report.residues) residues.push_back(str(v));
    out["residues"] = std::move(residues);
    out["observed_period"] = optional_number(report.observed_period);
    out["divides_L"] = optional_number(report.divides_l);
    return out;
}

Record to_record(const StructureReport& report) {
    Record out;
    out["type"] = "structure";
    out["n"] = str(report.n);
    out["satisfies_congruences"] = report.satisfies_congruences;
    Record odd = Record::array();
    for (const auto& part : report.odd_factor_multiplicities)
        odd.push_back(Record::array({str(part.prime), part.exponent}));
    out["odd_factor_multiplicities"] = std::move(odd);
    out["distinguished_prime"] = report.distinguished_prime ? Record(str(*report.distinguished_prime)) : Record(nullptr);
    Record checks = Record::array();
    for (const auto& check : report.checks) {
        Record c;
        c["name"] = check.name;
        c["passed"] = check.passed;
        checks.push_back(std::move(c));
    }
    out["checks"] = std::move(checks);
    return out;
}

Record to_record(const std::vector<IterateVsPowerSumRow>& rows, const Integer& n) {
    Record out;
    out["type"] = "iterate_vs_powersum";
    out["n"] = str(n);
    Record table = Record::array();
    for (const auto& row : rows) {
        Record r;
        r["k"] = row.k;
        r["iterate_residue"] = row.iterate_residue ? Record(str(*row.iterate_residue)) : Record(nullptr);
        r["powersum_residue"] = str(row.powersum_residue);
        table.push_back(std::move(r));
    }
    out["rows"] = std::move(table);
    return out;
}

Record to_record(const MultiperfectRecord& record) {
    Record out;
    out["type"] = "multiperfect";
    out["n"] = str(record.n);
    out["factorization"] = to_record(record.factorization);
    out["index"] = str(record.index);
    out["L"] = str(record.l);
    out["L_prime"] = record.l_prime;
    out["squarefree"] = record.squarefree;
    return out;
}

Record to_record(const CyclotomicReport& report) {
    Record out;
    out["type"] = "cyclotomic_factors";
    out["p"] = str(report.p);
    out["L"] = str(report.l);
    out["value"] = str(report.value);
    out["p_equals_L"] = report.p_equals_l;
    Record factors = Record::array();
    for (const auto& f : report.factors) factors.push_back(Record::array({str(f.q), f.exponent, to_string(f.cls)}));
    out["factors"] = std::move(factors);
    out["violations"] = report.violations();
    return out;
}

Record to_record(const LValuation& v) {
    Record out;
    out["type"] = "l_valuation";
    out["q"] = str(v.q);
    out["L"] = str(v.l);
    out["valuation"] = v.valuation;
    out["exact_once"] = v.exact_once;
    return out;
}

Record to_record(const BoundCheck& check) {
    Record out;
    out["type"] = "index_bound";
    out["lhs"] = check.lhs.to_string();
    out["mid"] = check.mid.to_string();
    out["rhs"] = check.rhs.to_string();
    out["consistent"] = check.consistent;
    return out;
}

void JsonlWriter::emit(const Record& record) {
    out_ << record.dump() << '\n';
    if (!out_) throw IoFailure("failed to write JSON Lines record");
}

void write_divisibility_csv(std::ostream& out, const std::vector<CongruenceReport>& reports) {
    out << "n,smallest_k,status\n";
    for (const auto& report : reports) {
        out << report.n.get_str() << ',';
        if (report.smallest_k) out << *report.smallest_k;
        out << ',' << to_string(report.status) << '\n';
    }
    if (!out) throw IoFailure("failed to write CSV table");
}

}  // namespace sigma_lab
