#pragma once

#include "tmfchase/element.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tmfchase {

enum class FiltrationScheme { AdamsNovikov, Adams, None };

const char* scheme_name(FiltrationScheme s);
FiltrationScheme scheme_from_name(const std::string& s);

inline constexpr const char* kFlagV1Torsion = "V1_TORSION";
inline constexpr const char* kFlagHurewiczImage = "HUREWICZ_IMAGE";

struct CyclicSummand {
    std::string name;
    SummandOrder order;
    std::optional<int> filtration;
    std::set<std::string> flags;
    std::string provenance;
    std::vector<std::string> aliases;

    bool has_flag(const std::string& f) const { return flags.count(f) != 0; }
};

struct Operator {
    std::string name;
    int stem_shift = 0;
    std::optional<int> filtration_shift;
};

// Standard operator shifts: two 0, eta 1, v 2, nu 3, kbar 20, delta8 192.
std::optional<int> builtin_operator_shift(const std::string& name);

struct PeriodicExtension {
    std::string op;                           // always "delta8" in bundled data
    std::vector<std::string> faithful_flags;  // faithfulness holds on these flags
    std::string provenance;
};

// Immutable graded chart: per-stem summand lists plus operator action tables.
// The "two" action is implicit doubling and never stored.
class Chart {
public:
    Chart() = default;
    Chart(std::string spectrum, FiltrationScheme scheme, int lo, int hi)
        : spectrum_(std::move(spectrum)), scheme_(scheme), lo_(lo), hi_(hi)
    {
    }

    const std::string& spectrum() const { return spectrum_; }
    FiltrationScheme scheme() const { return scheme_; }
    int range_lo() const { return lo_; }
    int range_hi() const { return hi_; }
    bool in_range(int stem) const { return stem >= lo_ && stem <= hi_; }

    const std::set<int>& complete_stems() const { return complete_stems_; }
    bool is_complete(int stem) const { return complete_stems_.count(stem) != 0; }
    void mark_complete(int stem) { complete_stems_.insert(stem); }

    void add_summand(int stem, CyclicSummand s);
    const std::vector<CyclicSummand>& group(int stem) const;
    const CyclicSummand* find_summand(const std::string& name_or_alias) const;
    // Stem of a generator (by primary name); throws NotFound otherwise.
    int stem_of(const std::string& gen) const;

    void declare_operator(Operator op);
    const std::vector<Operator>& operators() const { return operators_; }
    const Operator* find_operator(const std::string& name) const;

    void set_action(const std::string& op, const std::string& source_gen, Element target);
    bool has_action(const std::string& op, const std::string& source_gen) const;

    void set_relations(std::vector<std::vector<std::string>> words) { relations_ = std::move(words); }
    const std::vector<std::vector<std::string>>& relations() const { return relations_; }

    void set_periodic_extension(PeriodicExtension p) { periodic_ = std::move(p); }
    const std::optional<PeriodicExtension>& periodic_extension() const { return periodic_; }

    void set_block_provenance(int stem, std::string p) { block_provenance_[stem] = std::move(p); }
    const std::map<int, std::string>& block_provenance() const { return block_provenance_; }

    // --- element algebra ---

    Element zero(int stem) const { return Element(spectrum_, stem); }
    Element generator(const std::string& name) const;
    // Reduces coefficients modulo summand orders; throws on unknown generators.
    Element reduce(Element e) const;
    Element add(const Element& a, const Element& b) const;
    Element negate(const Element& a) const;
    Element scalar_mul(Coeff c, const Element& a) const;

    // Equality with the sign convention: exact, or matching after global negation
    // when any summand involved has order > 2 or is infinite.
    bool elements_equal(const Element& a, const Element& b) const;

    // Leading (minimal) filtration over the element's terms; nullopt when any
    // term lacks filtration data. Zero has no leading filtration.
    std::optional<int> leading_filtration(const Element& e) const;

    // --- operations ---

    Element act(const std::string& op, const Element& x) const;
    std::vector<Element> kernel_of_operator(const std::string& op, int stem, Coeff coeff_window = 8) const;
    bool is_divisible(const std::string& op, const Element& x, Coeff coeff_window = 8) const;
    Chart v1_torsion_restriction() const;
    Element delta8_translate(const Element& x, int k) const;

    // All elements of the stem group. Finite summands enumerate fully; infinite
    // summands contribute coefficients in [-coeff_window, coeff_window].
    std::vector<Element> enumerate_stem(int stem, Coeff coeff_window = 8) const;

    // Relation identities (operator words acting as zero) on every generator
    // where each intermediate action is available; returns human-readable
    // descriptions of failures.
    std::vector<std::string> check_relations() const;

private:
    void require_complete(int stem, const char* what) const;

    std::string spectrum_;
    FiltrationScheme scheme_ = FiltrationScheme::None;
    int lo_ = 0;
    int hi_ = 0;
    std::set<int> complete_stems_;
    std::map<int, std::vector<CyclicSummand>> groups_;
    std::map<std::string, int> gen_stem_;                   // primary name -> stem
    std::map<std::string, std::string> alias_to_primary_;   // alias -> primary name
    std::vector<Operator> operators_;
    std::map<std::pair<std::string, std::string>, Element> actions_;
    std::vector<std::vector<std::string>> relations_;
    std::optional<PeriodicExtension> periodic_;
    std::map<int, std::string> block_provenance_;

    friend class ChartBuilderAccess;
};

// Filtration renaming: a chart automorphism sending each generator to itself
// plus strictly higher-filtration order-2 generators of the same stem, and
// commuting with the operator actions. Chart names only determine classes up
// to such a renaming.
struct Gauge {
    std::map<std::string, Element> images;  // generator -> image (defaults to identity)

    Element apply(const Chart& chart, const Element& e) const;
    Element invert(const Chart& chart, const Element& e) const;
};

std::vector<Gauge> enumerate_gauges(const Chart& chart);

}  // namespace tmfchase
