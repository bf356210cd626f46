#pragma once

#include "tmfchase/chart.hpp"

#include <map>
#include <string>
#include <vector>

namespace tmfchase {

struct Violation {
    std::string code;      // e.g. RelationViolation, FlagViolation, SchemaViolation
    std::string location;  // "S@122" or "Y: kbar(y_{83,3})"
    std::string message;
};

std::string render_violations(const std::vector<Violation>& vs);

// Hurewicz non-image entry: a named element of the S chart with provenance.
struct NonImageEntry {
    std::string display;  // name as printed in reports, e.g. "2nu*Delta^2"
    std::string gen;      // underlying generator
    Coeff coeff = 1;
    int stem = 0;
    std::string provenance;
};

struct AxiomSet {
    bool pham_surjectivity = true;
    std::string pham_provenance;
    bool delta8_faithful = true;
    std::string delta8_provenance;
    std::vector<NonImageEntry> hurewicz_nonimage;

    bool is_nonimage(const Element& e) const;
};

// A loaded dataset: the four charts plus axioms.
struct Dataset {
    std::map<std::string, Chart> charts;  // keyed by spectrum: S, C, Y, V0
    AxiomSet axioms;
    std::string source;  // directory or "bundled"

    const Chart& chart(const std::string& spectrum) const;
};

Chart load_chart(const std::string& path);
Chart load_chart_from_json_text(const std::string& text, const std::string& origin);
std::string emit_chart(const Chart& chart);

AxiomSet load_axioms(const std::string& path);

std::vector<Violation> validate_chart(const Chart& chart);
std::vector<Violation> validate_dataset(const Dataset& ds);

// Resolves "bundled" (or a directory path) to a Dataset. The bundled data
// location comes from $TMFCHASE_DATA or the build-time default.
Dataset load_dataset(const std::string& path_or_bundled);
std::string bundled_data_dir();

// Convenience: one bundled chart by dataset name (tmf_S, tmf_C, tmf_Y, tmf_V0).
Chart bundled_dataset(const std::string& name);

}  // namespace tmfchase
