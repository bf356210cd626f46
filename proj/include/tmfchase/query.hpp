#pragma once

#include "tmfchase/oracle.hpp"
#include "tmfchase/solver.hpp"

#include <string>

namespace tmfchase {

struct Assertion {
    enum class Kind { MapValueEq, MapValueNonzero, MapIso };
    Kind kind = Kind::MapValueEq;
    MapSlot slot;
    Element x;  // source element (Eq / Nonzero)
    Element e;  // asserted value (Eq)
    std::string text;
};

enum class QueryVerdict { Forced, Contingent, Impossible };
const char* query_verdict_name(QueryVerdict v);

struct QueryResult {
    QueryVerdict verdict = QueryVerdict::Contingent;
    bool caveat = false;      // holds up to filtration renaming
    bool via_oracle = false;  // oracle fallback (or confirmation) ran
    std::string detail;
};

// Element literal: terms joined by top-level '+', each an optional integer
// coefficient "<n>*" followed by a generator name (names may contain '*', '^',
// '+' inside parentheses). "0" is the zero element.
Element parse_element(const Chart& chart, int stem, const std::string& text);

// Assertion grammar: <map>(<element>) = <element|0>, <map>(<element>) != 0,
// iso(<map>, <stem>). <map> is i, p, or the triple's self-map operator name.
// The map is resolved against the system's instances; ambiguity is an error.
Assertion parse_assertion(const ChaseSystem& sys, const std::string& text);

// Solver facts first; enumeration fallback (and cross-check) within bound.
QueryResult query(const ChaseSystem& sys, const SolveResult& solved, const Assertion& a,
                  std::uint64_t bound = 4096);

}  // namespace tmfchase
