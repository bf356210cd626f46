#pragma once

#include "tmfchase/les.hpp"
#include "tmfchase/solver.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace tmfchase {

// A complete assignment of the unknown (i and p) map entries of a system.
struct Filling {
    std::map<EntryKey, Element> entries;

    Element apply(const ChaseSystem& sys, const MapSlot& slot, const Element& x) const;
};

// Exhaustive enumeration of exact fillings. Deliberately independent of the
// propagation solver: candidates start from the full target groups and every
// constraint (exactness, linearity, filtration, order, squares) is checked
// against its definition.
std::vector<Filling> enumerate_fillings(const ChaseSystem& sys, std::uint64_t bound = 4096);

// Total order product of the groups in the system's windows (capped).
std::uint64_t system_total_order(const ChaseSystem& sys);

// Scans one filling for exactness at every interior node; returns failure
// descriptions (empty = exact everywhere).
std::vector<std::string> exactness_scan(const ChaseSystem& sys, const Filling& f);

// --- randomized instances for the soundness suite ---

struct RandomSystem {
    Dataset dataset;  // synthetic charts "X" and "C"
    CofiberTriple triple;
    int lo = 0, hi = 0;
    std::string describe;
};

RandomSystem make_random_system(std::uint64_t seed);

struct SoundnessReport {
    int instances = 0;
    int inconsistent_instances = 0;
    int unsatisfiable_instances = 0;
    std::uint64_t facts_checked = 0;
    std::uint64_t fillings_seen = 0;
    std::vector<std::string> violations;  // empty = sound
};

// Runs `count` seeded random instances through solve + enumerate_fillings and
// cross-checks every fact against every filling, plus the exactness scan.
SoundnessReport run_soundness_suite(int count, std::uint64_t seed, std::uint64_t bound = 4096);

}  // namespace tmfchase
