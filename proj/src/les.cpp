#include "tmfchase/les.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>
#include <sstream>

namespace tmfchase {

const std::vector<CofiberTriple>& builtin_triples()
{
    static const std::vector<CofiberTriple> triples = {
        {"S-eta-C", "S", "C", "eta", 1},
        {"C-two-Y", "C", "Y", "two", 0},
        {"Y-v-A1", "Y", "A1", "v", 2},
        {"V0-eta-Y", "V0", "Y", "eta", 1},
        {"S-two-V0", "S", "V0", "two", 0},
    };
    return triples;
}

const CofiberTriple& triple_by_label(const std::string& label)
{
    for (const auto& t : builtin_triples())
        if (t.label == label)
            return t;
    throw Error(ErrorCode::NotFound, "unknown cofiber triple " + label);
}

const char* map_kind_name(MapKind k)
{
    switch (k) {
        case MapKind::Theta: return "theta";
        case MapKind::I: return "i";
        case MapKind::P: return "p";
    }
    return "?";
}

const char* map_prop_name(MapProp p)
{
    switch (p) {
        case MapProp::Zero: return "ZERO";
        case MapProp::Injective: return "INJECTIVE";
        case MapProp::Surjective: return "SURJECTIVE";
        case MapProp::Iso: return "ISO";
    }
    return "?";
}

LESInstance::LESInstance(CofiberTriple triple, const Chart* x_restricted, const Chart* c_restricted, int lo,
                         int hi)
    : triple_(std::move(triple)), x_(x_restricted), c_(c_restricted), lo_(lo), hi_(hi)
{
    const int d = triple_.degree;
    auto in_window = [&](int s) { return s >= lo_ && s <= hi_; };
    std::vector<int> missing;
    auto require = [&](const Chart& c, int stem) {
        if (!c.is_complete(stem))
            missing.push_back(stem);
    };

    for (int k = lo_; k <= hi_; ++k) {
        if (in_window(k) && in_window(k + d)) {
            maps_.push_back({MapKind::Theta, k});
            require(*x_, k);
            require(*x_, k + d);
        }
        if (in_window(k)) {
            maps_.push_back({MapKind::I, k});
            require(*x_, k);
            require(*c_, k);
        }
        if (in_window(k) && in_window(k - d - 1)) {
            maps_.push_back({MapKind::P, k});
            require(*c_, k);
            require(*x_, k - d - 1);
        }
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        std::ostringstream os;
        os << triple_.label << " window [" << lo_ << "," << hi_ << "] needs untranscribed stems:";
        for (int s : missing)
            os << " " << s;
        throw Error(ErrorCode::IncompleteData, os.str());
    }
    std::sort(maps_.begin(), maps_.end());

    // Interior nodes.
    for (int k = lo_; k <= hi_; ++k) {
        // X@k as (P-target from Cof@(k+d+1), theta-source).
        if (has_map({MapKind::P, k + d + 1}) && has_map({MapKind::Theta, k}))
            nodes_.push_back({{MapKind::P, k + d + 1},
                              {MapKind::Theta, k},
                              triple_.source + "@" + std::to_string(k) + " (p-target/theta-source)"});
        // X@(k+d) as (theta-target, I-source).
        if (has_map({MapKind::Theta, k}) && has_map({MapKind::I, k + d}))
            nodes_.push_back({{MapKind::Theta, k},
                              {MapKind::I, k + d},
                              triple_.source + "@" + std::to_string(k + d) + " (theta-target/i-source)"});
        // Cof@k as (I-target, P-source).
        if (has_map({MapKind::I, k}) && has_map({MapKind::P, k}))
            nodes_.push_back({{MapKind::I, k},
                              {MapKind::P, k},
                              triple_.cofiber + "@" + std::to_string(k) + " (i-target/p-source)"});
    }
}

bool LESInstance::has_map(MapRef m) const
{
    return std::binary_search(maps_.begin(), maps_.end(), m);
}

const Chart& LESInstance::source_chart(MapRef m) const
{
    return m.kind == MapKind::P ? *c_ : *x_;
}

const Chart& LESInstance::target_chart(MapRef m) const
{
    return m.kind == MapKind::I ? *c_ : *x_;
}

int LESInstance::target_stem(MapRef m) const
{
    switch (m.kind) {
        case MapKind::Theta: return m.stem + triple_.degree;
        case MapKind::I: return m.stem;
        case MapKind::P: return m.stem - triple_.degree - 1;
    }
    return m.stem;
}

const std::vector<CyclicSummand>& LESInstance::source_group(MapRef m) const
{
    return source_chart(m).group(source_stem(m));
}

const std::vector<CyclicSummand>& LESInstance::target_group(MapRef m) const
{
    return target_chart(m).group(target_stem(m));
}

MapTags LESInstance::tags(MapRef m) const
{
    MapTags t;
    t.pi_s_linear = true;
    if (m.kind != MapKind::Theta)
        t.filtration_nondecreasing = source_chart(m).scheme() == target_chart(m).scheme() &&
                                     source_chart(m).scheme() != FiltrationScheme::None;
    return t;
}

std::string LESInstance::describe_map(MapRef m) const
{
    std::ostringstream os;
    std::string op = m.kind == MapKind::Theta ? triple_.map_op : map_kind_name(m.kind);
    os << triple_.label << "." << op << "[" << m.stem << "]";
    return os.str();
}

ChaseSystem::ChaseSystem(const Dataset& ds) : dataset_(&ds)
{
    for (const auto& [name, chart] : ds.charts)
        restricted_.emplace(name, chart.v1_torsion_restriction());
}

const Chart& ChaseSystem::restricted(const std::string& spectrum) const
{
    auto it = restricted_.find(spectrum);
    if (it == restricted_.end())
        throw Error(ErrorCode::NotFound, "no chart loaded for spectrum " + spectrum);
    return it->second;
}

int ChaseSystem::add_instance(const std::string& triple_label, int lo, int hi)
{
    return add_instance(triple_by_label(triple_label), lo, hi);
}

int ChaseSystem::add_instance(const CofiberTriple& t, int lo, int hi)
{
    auto sx = restricted_.find(t.source);
    auto sc = restricted_.find(t.cofiber);
    if (sx == restricted_.end() || sc == restricted_.end())
        throw Error(ErrorCode::IncompleteData,
                    "triple " + t.label + " needs charts for " + t.source + " and " + t.cofiber);
    instances_.emplace_back(t, &sx->second, &sc->second, lo, hi);
    return static_cast<int>(instances_.size()) - 1;
}

}  // namespace tmfchase
