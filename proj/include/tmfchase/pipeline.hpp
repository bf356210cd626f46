#pragma once

#include "tmfchase/chart_io.hpp"
#include "tmfchase/query.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tmfchase {

struct SphereCandidate {
    std::string display;  // printed name, e.g. "2nu*Delta^2"
    Element element;      // element of the full S chart
    int stem = 0;
    bool eta_divisible = false;
    bool in_hurewicz_image = false;
    std::string provenance;

    bool retained() const { return !eta_divisible && !in_hurewicz_image; }
};

enum class VerdictOutcome {
    Family,
    RejectProjectsToZero,
    RejectNotInSphereImage,
    RejectNoSimple2TorsionTarget,
    Inconclusive,
};
const char* verdict_outcome_name(VerdictOutcome v);

struct CandidateVerdict {
    std::string candidate;  // Y generator name
    int stem = 0;
    VerdictOutcome outcome = VerdictOutcome::Inconclusive;
    std::string projection;  // rendered element of C (or "0")
    int projection_stem = 0;
    std::string witness;  // sphere element establishing the family
    int family_base_dim = -1;
    std::vector<std::string> fact_lines;
    std::string note;   // provenance remarks for the verdict
    std::string trace;  // serialized solver trace of the chase system
};

struct FamilyReport {
    std::string dataset_source;
    int k_max = 5;
    std::vector<CandidateVerdict> verdicts;  // ordered by candidate stem
    std::vector<int> base_dims;
    int period = 192;
    std::vector<int> congruence_classes;
    std::map<int, std::vector<int>> family_dims;
};

// Chase recipes: per-candidate instance windows and squares, shipped as data.
struct InstanceRecipe {
    std::string triple;
    int lo = 0, hi = 0;
};

struct SquareRecipe {
    std::string kind;  // "oplink" or "composite"
    int a = -1, b = -1;
    std::string op;
    std::string label;
    // composite corners: {instance index, map name, stem}
    struct Corner {
        int instance = -1;
        std::string map;
        int stem = 0;
    } top, left, bottom, right;
};

struct CandidateRecipe {
    std::string name;
    bool has_project = false;
    InstanceRecipe project;
    std::vector<InstanceRecipe> aux;
    std::vector<SquareRecipe> squares;
    bool has_pullback = false;
    InstanceRecipe pullback;
};

std::map<std::string, CandidateRecipe> load_recipes(const std::string& path);
std::map<std::string, CandidateRecipe> bundled_recipes();

// --- operations ---

std::vector<SphereCandidate> candidate_sphere_elements(const Chart& chart_S, const AxiomSet& axioms);
std::set<int> candidate_dims(const std::vector<SphereCandidate>& candidates);
std::vector<Element> simple_v_torsion_candidates(const Chart& chart_Y_restricted, const std::set<int>& dims);

struct LiftFact {
    std::string element;
    std::vector<std::string> justification;
};
LiftFact lift_exists_via_A1(const Dataset& ds, const Element& y);

// Builds the candidate's chase system (project + aux instances + squares).
ChaseSystem build_candidate_system(const Dataset& ds, const CandidateRecipe& recipe);

CandidateVerdict chase_candidate(const Dataset& ds, const Element& y,
                                 const std::map<std::string, CandidateRecipe>& recipes);

FamilyReport run_pipeline(const Dataset& ds, int k_max = 5);

std::vector<int> family_members(int base, int k_max);
int congruence_class_union(const std::vector<int>& prior, const std::vector<int>& fresh);

// Report rendering (text and tab-separated); byte-deterministic.
std::string render_report_text(const FamilyReport& r);
std::string render_report_tsv(const FamilyReport& r);

}  // namespace tmfchase
