#pragma once

#include "tmfchase/chart.hpp"
#include "tmfchase/chart_io.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tmfchase {

// Cofiber triple of a self map theta: Sigma^d X -> X -> Cof.
// The induced long exact sequence repeats
//   ... -> Cof@(k+d+1) -P-> X@k -theta-> X@(k+d) -I-> Cof@(k+d) -P-> X@(k-1) -> ...
struct CofiberTriple {
    std::string label;
    std::string source;    // X
    std::string cofiber;   // Cof
    std::string map_op;    // theta operator name
    int degree = 0;        // theta stem shift d
};

const std::vector<CofiberTriple>& builtin_triples();
const CofiberTriple& triple_by_label(const std::string& label);

enum class MapKind { Theta, I, P };
const char* map_kind_name(MapKind k);

struct MapRef {
    MapKind kind;
    int stem;  // source stem

    auto operator<=>(const MapRef&) const = default;
};

struct MapTags {
    bool pi_s_linear = false;
    bool filtration_nondecreasing = false;
};

enum class MapProp { Zero, Injective, Surjective, Iso };
const char* map_prop_name(MapProp p);

// Windowed LES instance over the v1-torsion parts of two charts.
class LESInstance {
public:
    LESInstance(CofiberTriple triple, const Chart* x_restricted, const Chart* c_restricted, int lo, int hi);

    const CofiberTriple& triple() const { return triple_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    const Chart& x_chart() const { return *x_; }
    const Chart& c_chart() const { return *c_; }

    const std::vector<MapRef>& maps() const { return maps_; }
    bool has_map(MapRef m) const;

    const Chart& source_chart(MapRef m) const;
    const Chart& target_chart(MapRef m) const;
    int source_stem(MapRef m) const { return m.stem; }
    int target_stem(MapRef m) const;
    const std::vector<CyclicSummand>& source_group(MapRef m) const;
    const std::vector<CyclicSummand>& target_group(MapRef m) const;
    MapTags tags(MapRef m) const;

    // Interior exactness nodes, as (incoming map, outgoing map) pairs.
    struct Node {
        MapRef in;
        MapRef out;
        std::string describe;
    };
    const std::vector<Node>& nodes() const { return nodes_; }

    std::string describe_map(MapRef m) const;

private:
    CofiberTriple triple_;
    const Chart* x_;
    const Chart* c_;
    int lo_, hi_;
    std::vector<MapRef> maps_;
    std::vector<Node> nodes_;
};

// A chase system: restricted charts + instances + square constraints.
// Square constraints come in two kinds:
//  - operator link: one operator alpha relates every map position of
//    instance a at stem k to the same position of instance b at stem
//    k + shift(alpha):  f_b(alpha x) = alpha f_a(x).
//  - composite square: right . top = bottom . left for four named maps.
struct MapSlot {
    int instance = -1;
    MapRef ref{};

    auto operator<=>(const MapSlot&) const = default;
};

struct SquareConstraint {
    enum class Kind { OperatorLink, Composite };
    Kind kind = Kind::OperatorLink;
    // OperatorLink
    int inst_a = -1;
    int inst_b = -1;
    std::string op;
    // Composite
    MapSlot top, left, bottom, right;
    std::string label;
};

class ChaseSystem {
public:
    explicit ChaseSystem(const Dataset& ds);
    ChaseSystem(const ChaseSystem&) = delete;
    ChaseSystem& operator=(const ChaseSystem&) = delete;
    ChaseSystem(ChaseSystem&&) = default;
    ChaseSystem& operator=(ChaseSystem&&) = default;

    // Adds an instance for a builtin triple label over a window; returns index.
    int add_instance(const std::string& triple_label, int lo, int hi);
    // Custom triple (randomized test systems and the like).
    int add_instance(const CofiberTriple& triple, int lo, int hi);
    void add_square(SquareConstraint sq) { squares_.push_back(std::move(sq)); }

    const std::vector<LESInstance>& instances() const { return instances_; }
    const LESInstance& instance(int i) const { return instances_.at(static_cast<size_t>(i)); }
    const std::vector<SquareConstraint>& squares() const { return squares_; }
    const Chart& restricted(const std::string& spectrum) const;
    const Chart& full_chart(const std::string& spectrum) const { return dataset_->chart(spectrum); }
    const Dataset& dataset() const { return *dataset_; }

private:
    const Dataset* dataset_;
    std::map<std::string, Chart> restricted_;
    std::vector<LESInstance> instances_;
    std::vector<SquareConstraint> squares_;
};

}  // namespace tmfchase
