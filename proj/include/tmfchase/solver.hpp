#pragma once

#include "tmfchase/les.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tmfchase {

struct EntryKey {
    MapSlot slot;
    std::string gen;  // source generator

    auto operator<=>(const EntryKey&) const = default;
};

// One rule application. domain_after is the entry's candidate list after the
// application; a singleton domain is a determined map value.
struct Deduction {
    int id = 0;
    std::string rule;     // R0..R7, R3, PIN
    std::string context;  // node or link description
    EntryKey entry;
    std::vector<Element> domain_after;
    std::vector<int> premises;  // ids of deductions this one read
    bool caveat = false;        // value pinned up to higher filtration only
};

struct Fact {
    EntryKey entry;
    Element value;
    bool caveat = false;
    int deduction_id = 0;
    std::string map_name;  // rendered, e.g. "C-two-Y.p[76]"
};

struct PropFact {
    MapSlot slot;
    MapProp prop;
    std::vector<int> premises;
};

struct SolveResult {
    std::vector<Deduction> log;
    std::vector<Fact> facts;          // determined entries
    std::vector<PropFact> props;      // derived per-map properties
    bool inconsistent = false;
    std::string conflict_entry;       // description of the emptied entry
    std::vector<std::string> conflict_core;  // minimal conflicting inputs

    const Fact* find(const std::string& map_name, const std::string& gen) const;
};

class Solver {
public:
    explicit Solver(const ChaseSystem& sys);

    SolveResult solve();

    // Serializes facts with their justification closure, one rule application
    // per line.
    static std::string serialize_trace(const SolveResult& r);

    // Re-executes the rule applications of a serialized trace against a fresh
    // system and checks every recorded conclusion is re-derived bit for bit.
    static bool replay_trace(const ChaseSystem& sys, const std::string& trace, std::string* why = nullptr);

private:
    struct Domain {
        std::vector<Element> values;  // sorted, deduped
        int last_deduction = -1;      // id of latest deduction touching this entry
        bool caveat = false;
    };

    const ChaseSystem& sys_;
    std::map<EntryKey, Domain> domains_;
    std::vector<Deduction> log_;
    bool inconsistent_ = false;
    bool changed_ = false;
    bool minimizing_ = false;
    std::string conflict_entry_;
    std::set<EntryKey> masked_;

    void init_domains();
    void record(const std::string& rule, const std::string& context, const EntryKey& key,
                std::vector<Element> domain_after, std::vector<int> premises, bool caveat);
    bool prune(const std::string& rule, const std::string& context, const EntryKey& key,
               const std::vector<Element>& keep, std::vector<int> premises, bool caveat);

    std::vector<int> read_premises(const std::vector<EntryKey>& keys) const;

    void run_r0_selfmap();
    void run_r1_zero();
    void run_r7_order();
    void run_r5_filtration();
    void run_r2_nodes();
    void run_r4_linearity();
    void run_r6_squares();
    void apply_operator_link(const std::string& rule, int ia, int ib, const std::string& opname);
    void run_pins();
    void derive_props(SolveResult& out) const;
    void minimize_conflict(SolveResult& out);

    friend struct ReplayAccess;
};

}  // namespace tmfchase
