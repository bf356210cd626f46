#include "tmfchase/query.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace tmfchase {

const char* query_verdict_name(QueryVerdict v)
{
    switch (v) {
        case QueryVerdict::Forced: return "FORCED";
        case QueryVerdict::Contingent: return "CONTINGENT";
        case QueryVerdict::Impossible: return "IMPOSSIBLE";
    }
    return "?";
}

namespace {

std::string strip(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_top_level(const std::string& s, char sep)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[')
            depth++;
        if (c == ')' || c == '}' || c == ']')
            depth--;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Element parse_element(const Chart& chart, int stem, const std::string& text)
{
    std::string t = strip(text);
    if (t == "0")
        return chart.zero(stem);
    Element out = chart.zero(stem);
    for (const auto& raw : split_top_level(t, '+')) {
        std::string term = strip(raw);
        if (term.empty())
            throw Error(ErrorCode::ParseError, "empty term in element '" + text + "'");
        Coeff coeff = 1;
        std::string name = term;
        if (!chart.find_summand(term)) {
            std::size_t star = term.find('*');
            bool digits = star != std::string::npos && star > 0;
            for (std::size_t i = 0; digits && i < star; ++i)
                if (!std::isdigit(static_cast<unsigned char>(term[i])))
                    digits = false;
            if (digits && chart.find_summand(term.substr(star + 1))) {
                coeff = std::stoll(term.substr(0, star));
                name = term.substr(star + 1);
            } else {
                throw Error(ErrorCode::ParseError,
                            "unknown generator '" + term + "' in " + chart.spectrum() + "@" +
                                std::to_string(stem));
            }
        }
        const CyclicSummand* s = chart.find_summand(name);
        Element g = chart.generator(s->name);
        if (g.stem() != stem)
            throw Error(ErrorCode::ParseError, "generator " + name + " lives in stem " +
                                                   std::to_string(g.stem()) + ", expected " +
                                                   std::to_string(stem));
        out = chart.add(out, chart.scalar_mul(coeff, g));
    }
    return out;
}

Assertion parse_assertion(const ChaseSystem& sys, const std::string& text)
{
    std::string t = strip(text);
    Assertion a;
    a.text = t;

    if (t.rfind("iso(", 0) == 0) {
        if (t.back() != ')')
            throw Error(ErrorCode::ParseError, "expected iso(<map>, <stem>)");
        auto parts = split_top_level(t.substr(4, t.size() - 5), ',');
        if (parts.size() != 2)
            throw Error(ErrorCode::ParseError, "expected iso(<map>, <stem>)");
        std::string mapname = strip(parts[0]);
        int stem = std::stoi(strip(parts[1]));
        a.kind = Assertion::Kind::MapIso;
        for (int i = 0; i < static_cast<int>(sys.instances().size()); ++i) {
            const LESInstance& inst = sys.instance(i);
            MapKind kind;
            if (mapname == "i")
                kind = MapKind::I;
            else if (mapname == "p")
                kind = MapKind::P;
            else if (mapname == inst.triple().map_op)
                kind = MapKind::Theta;
            else
                continue;
            if (inst.has_map({kind, stem})) {
                a.slot = MapSlot{i, {kind, stem}};
                return a;
            }
        }
        throw Error(ErrorCode::NotFound, "no instance carries map " + mapname + "[" + std::to_string(stem) + "]");
    }

    bool negated = false;
    std::size_t eq = std::string::npos;
    if (auto ne = t.find("!="); ne != std::string::npos) {
        negated = true;
        eq = ne;
    } else if (auto e2 = t.rfind('='); e2 != std::string::npos) {
        eq = e2;
    } else {
        throw Error(ErrorCode::ParseError, "assertion needs '=' or '!=' : " + text);
    }
    std::string lhs = strip(t.substr(0, eq));
    std::string rhs = strip(t.substr(eq + (negated ? 2 : 1)));
    if (negated && rhs != "0")
        throw Error(ErrorCode::ParseError, "only '!= 0' comparisons are supported");

    std::size_t open = lhs.find('(');
    if (open == std::string::npos || lhs.back() != ')')
        throw Error(ErrorCode::ParseError, "expected <map>(<element>)");
    std::string mapname = strip(lhs.substr(0, open));
    std::string arg = lhs.substr(open + 1, lhs.size() - open - 2);

    // Resolve the map: try every instance that knows a generator of the
    // argument in the right source chart.
    for (int i = 0; i < static_cast<int>(sys.instances().size()); ++i) {
        const LESInstance& inst = sys.instance(i);
        MapKind kind;
        if (mapname == "i")
            kind = MapKind::I;
        else if (mapname == "p")
            kind = MapKind::P;
        else if (mapname == inst.triple().map_op)
            kind = MapKind::Theta;
        else
            continue;
        const Chart& src = kind == MapKind::P ? inst.c_chart() : inst.x_chart();
        // The argument's first generator determines the stem.
        std::string first = strip(split_top_level(strip(arg), '+')[0]);
        std::string name = first;
        if (!src.find_summand(name)) {
            std::size_t star = first.find('*');
            if (star != std::string::npos && src.find_summand(first.substr(star + 1)))
                name = first.substr(star + 1);
            else
                continue;
        }
        int stem = src.stem_of(name);
        MapRef ref{kind, stem};
        if (!inst.has_map(ref))
            continue;
        a.slot = MapSlot{i, ref};
        a.x = parse_element(src, stem, arg);
        const Chart& tgt = inst.target_chart(ref);
        int ts = inst.target_stem(ref);
        if (negated) {
            a.kind = Assertion::Kind::MapValueNonzero;
        } else {
            a.kind = Assertion::Kind::MapValueEq;
            a.e = rhs == "0" ? tgt.zero(ts) : parse_element(tgt, ts, rhs);
        }
        return a;
    }
    throw Error(ErrorCode::NotFound, "could not resolve assertion '" + text + "' against the loaded instances");
}

namespace {

// Evaluates an Eq/Nonzero assertion against one filling.
Element filling_value(const ChaseSystem& sys, const Filling& f, const Assertion& a)
{
    return f.apply(sys, a.slot, a.x);
}

bool gauge_fixable(const ChaseSystem& sys, const Filling& f, const Assertion& a)
{
    const LESInstance& inst = sys.instance(a.slot.instance);
    const Chart& src = inst.source_chart(a.slot.ref);
    const Chart& tgt = inst.target_chart(a.slot.ref);
    bool same = src.spectrum() == tgt.spectrum();
    auto gs = enumerate_gauges(src);
    auto gt = enumerate_gauges(tgt);
    for (const auto& g_src : gs) {
        Element pre = g_src.invert(src, a.x);
        Element raw = f.apply(sys, a.slot, pre);
        for (const auto& g_tgt : gt) {
            if (same && !(g_src.images == g_tgt.images))
                continue;
            if (tgt.elements_equal(g_tgt.apply(tgt, raw), a.e))
                return true;
        }
    }
    return false;
}

bool filling_iso(const ChaseSystem& sys, const Filling& f, const MapSlot& slot)
{
    const LESInstance& inst = sys.instance(slot.instance);
    const Chart& src = inst.source_chart(slot.ref);
    const Chart& tgt = inst.target_chart(slot.ref);
    std::set<Element> image;
    bool inj = true;
    for (const auto& x : src.enumerate_stem(inst.source_stem(slot.ref))) {
        Element y = f.apply(sys, slot, x);
        if (y.is_zero() && !x.is_zero())
            inj = false;
        image.insert(y);
    }
    return inj && image.size() == tgt.enumerate_stem(inst.target_stem(slot.ref)).size();
}

}  // namespace

QueryResult query(const ChaseSystem& sys, const SolveResult& solved, const Assertion& a, std::uint64_t bound)
{
    QueryResult res;
    const LESInstance& inst = sys.instance(a.slot.instance);
    const Chart& tgt = inst.target_chart(a.slot.ref);

    // Solver-facts pass.
    bool solver_decided = false;
    bool solver_caveat = false;
    bool solver_truth = false;
    if (a.kind != Assertion::Kind::MapIso) {
        Element val = tgt.zero(inst.target_stem(a.slot.ref));
        bool known = true;
        for (const auto& t : a.x.terms()) {
            const Fact* f = solved.find(inst.describe_map(a.slot.ref), t.gen);
            if (!f) {
                known = false;
                break;
            }
            solver_caveat = solver_caveat || f->caveat;
            val = tgt.add(val, tgt.scalar_mul(t.coeff, f->value));
        }
        if (known) {
            solver_decided = true;
            if (a.kind == Assertion::Kind::MapValueEq)
                solver_truth = tgt.elements_equal(val, a.e);
            else
                solver_truth = !val.is_zero();
        }
    } else {
        for (const auto& p : solved.props) {
            if (p.slot == a.slot && p.prop == MapProp::Iso) {
                solver_decided = true;
                solver_truth = true;
            }
        }
    }

    // Oracle pass (confirmation or fallback).
    std::vector<Filling> fillings;
    bool oracle_ran = false;
    try {
        fillings = enumerate_fillings(sys, bound);
        oracle_ran = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TooLarge)
            throw;
        if (!solver_decided)
            throw;  // nothing decisive and no fallback available
    }

    if (!oracle_ran) {
        res.verdict = solver_truth ? QueryVerdict::Forced : QueryVerdict::Impossible;
        res.caveat = solver_caveat;
        res.detail = "solver facts only (oracle beyond bound)";
        return res;
    }

    if (fillings.empty())
        throw Error(ErrorCode::InconsistentInstance, "no exact filling satisfies the instance data");

    res.via_oracle = true;
    std::size_t sat = 0;
    if (a.kind == Assertion::Kind::MapIso) {
        for (const auto& f : fillings)
            sat += filling_iso(sys, f, a.slot) ? 1 : 0;
    } else if (a.kind == Assertion::Kind::MapValueNonzero) {
        for (const auto& f : fillings)
            sat += filling_value(sys, f, a).is_zero() ? 0 : 1;
    } else {
        for (const auto& f : fillings)
            sat += tgt.elements_equal(filling_value(sys, f, a), a.e) ? 1 : 0;
    }

    if (sat == fillings.size()) {
        res.verdict = QueryVerdict::Forced;
        res.detail = "holds in all " + std::to_string(fillings.size()) + " exact fillings";
    } else if (a.kind == Assertion::Kind::MapValueEq) {
        // Up to filtration renaming?
        bool all_fix = true;
        for (const auto& f : fillings)
            if (!gauge_fixable(sys, f, a)) {
                all_fix = false;
                break;
            }
        if (all_fix) {
            res.verdict = QueryVerdict::Forced;
            res.caveat = true;
            res.detail = "holds in all " + std::to_string(fillings.size()) +
                         " exact fillings up to filtration renaming";
        } else if (sat == 0) {
            res.verdict = QueryVerdict::Impossible;
            res.detail = "fails in all exact fillings";
        } else {
            res.verdict = QueryVerdict::Contingent;
            res.detail = std::to_string(sat) + "/" + std::to_string(fillings.size()) + " fillings";
        }
    } else if (sat == 0) {
        res.verdict = QueryVerdict::Impossible;
        res.detail = "fails in all exact fillings";
    } else {
        res.verdict = QueryVerdict::Contingent;
        res.detail = std::to_string(sat) + "/" + std::to_string(fillings.size()) + " fillings";
    }

    // The propagation solver must never contradict the enumeration.
    if (solver_decided && !solver_caveat) {
        bool oracle_truth = res.verdict == QueryVerdict::Forced;
        if (solver_truth && res.verdict == QueryVerdict::Impossible)
            throw Error(ErrorCode::InconsistentInstance,
                        "solver and enumeration disagree on " + a.text);
        if (!solver_truth && oracle_truth && !res.caveat)
            throw Error(ErrorCode::InconsistentInstance,
                        "solver and enumeration disagree on " + a.text);
    }
    return res;
}

}  // namespace tmfchase
