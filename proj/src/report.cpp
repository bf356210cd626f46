#include "tmfchase/pipeline.hpp"

#include <sstream>

namespace tmfchase {

std::string render_report_text(const FamilyReport& r)
{
    std::ostringstream os;
    os << "tmf chart chase: family pipeline report\n";
    os << "dataset: " << r.dataset_source << " (schema 1)\n";
    os << "candidates examined: " << r.verdicts.size() << "\n";
    os << "\n";
    for (const auto& v : r.verdicts) {
        os << "candidate " << v.candidate << " (stem " << v.stem << ")\n";
        os << "  outcome: " << verdict_outcome_name(v.outcome) << "\n";
        os << "  projection: " << v.projection << " in C stem " << v.projection_stem << "\n";
        if (v.outcome == VerdictOutcome::Family) {
            os << "  witness: " << v.witness << " in S stem " << v.projection_stem << "\n";
            os << "  family base dimension: " << v.family_base_dim << "\n";
        }
        for (const auto& line : v.fact_lines)
            os << "  - " << line << "\n";
        if (!v.note.empty())
            os << "  data provenance: " << v.note << "\n";
        os << "\n";
    }
    os << "families found: " << r.base_dims.size() << " (period " << r.period << ")\n";
    for (const auto& [base, dims] : r.family_dims) {
        os << "  base " << base << ":";
        for (int d : dims)
            os << " " << d;
        os << "\n";
    }
    os << "congruence classes mod 192:";
    for (int c : r.congruence_classes)
        os << " " << c;
    os << "\n";
    return os.str();
}

std::string render_report_tsv(const FamilyReport& r)
{
    std::ostringstream os;
    os << "candidate\tstem\toutcome\tprojection\twitness\tbase_dim\n";
    for (const auto& v : r.verdicts) {
        os << v.candidate << "\t" << v.stem << "\t" << verdict_outcome_name(v.outcome) << "\t"
           << v.projection << "\t" << (v.witness.empty() ? "-" : v.witness) << "\t";
        if (v.family_base_dim >= 0)
            os << v.family_base_dim;
        else
            os << "-";
        os << "\n";
    }
    return os.str();
}

}  // namespace tmfchase
