#include "tmfchase/oracle.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace tmfchase {

namespace {

Coeff elem_order(const Chart& chart, const Element& e)
{
    Coeff ord = 1;
    for (const auto& t : e.terms()) {
        const CyclicSummand* s = chart.find_summand(t.gen);
        Coeff o = static_cast<Coeff>(s->order.value());
        Coeff c = t.coeff % o;
        if (c < 0)
            c += o;
        if (c == 0)
            continue;
        Coeff g = std::gcd(c, o);
        ord = std::lcm(ord, o / g);
    }
    return ord;
}

Element linear_apply(const Chart& tgt, int tgt_stem, const std::vector<std::string>& gens,
                     const std::vector<Element>& vals, const Element& x)
{
    Element out = tgt.zero(tgt_stem);
    for (const auto& t : x.terms())
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i] == t.gen) {
                out = tgt.add(out, tgt.scalar_mul(t.coeff, vals[i]));
                break;
            }
    return out;
}

struct UnknownEntry {
    EntryKey key;
    std::vector<Element> candidates;
};

struct Constraint {
    enum class Kind { Node, OpLink, Composite } kind;
    int instance = -1;
    std::size_t node_index = 0;
    // OpLink
    int inst_a = -1, inst_b = -1;
    std::string op;
    MapRef map_a{}, map_b{};
    std::string gen;  // source generator (OpLink/Composite)
    // Composite
    MapSlot top, left, bottom, right;
    // entries this constraint reads
    std::vector<EntryKey> involved;
};

struct Enumerator {
    const ChaseSystem& sys;
    std::vector<UnknownEntry> unknowns;
    std::map<EntryKey, int> index_of;
    std::map<EntryKey, Element> theta;  // data-known values
    std::vector<Constraint> constraints;
    std::vector<std::vector<std::size_t>> fire_at;  // per unknown index: constraints complete there
    std::vector<Element> current;
    std::vector<Filling> out;
    std::uint64_t steps = 0;
    std::uint64_t step_cap = 10'000'000;

    explicit Enumerator(const ChaseSystem& s) : sys(s) {}

    Element value_of(const MapSlot& slot, const std::string& gen, int depth) const
    {
        EntryKey k{slot, gen};
        if (auto it = theta.find(k); it != theta.end())
            return it->second;
        auto it = index_of.find(k);
        if (it == index_of.end() || it->second > depth)
            throw Error(ErrorCode::InvalidInput, "oracle read an unassigned entry");
        return current[static_cast<std::size_t>(it->second)];
    }

    Element apply_map(const MapSlot& slot, const Element& x, int depth) const
    {
        const LESInstance& inst = sys.instance(slot.instance);
        const Chart& tgt = inst.target_chart(slot.ref);
        int ts = inst.target_stem(slot.ref);
        Element out = tgt.zero(ts);
        for (const auto& t : x.terms())
            out = tgt.add(out, tgt.scalar_mul(t.coeff, value_of(slot, t.gen, depth)));
        return out;
    }

    bool check(const Constraint& c, int depth) const
    {
        if (c.kind == Constraint::Kind::Node) {
            const LESInstance& inst = sys.instance(c.instance);
            const auto& node = inst.nodes()[c.node_index];
            const Chart& node_chart = inst.target_chart(node.in);
            int node_stem = inst.target_stem(node.in);
            std::set<Element> im;
            for (const auto& x : inst.source_chart(node.in).enumerate_stem(inst.source_stem(node.in)))
                im.insert(apply_map({c.instance, node.in}, x, depth));
            std::set<Element> ker;
            for (const auto& x : node_chart.enumerate_stem(node_stem))
                if (apply_map({c.instance, node.out}, x, depth).is_zero())
                    ker.insert(x);
            return im == ker;
        }
        if (c.kind == Constraint::Kind::OpLink) {
            const LESInstance& a = sys.instance(c.inst_a);
            const Chart& src = a.source_chart(c.map_a);
            const Chart& tgt = a.target_chart(c.map_a);
            Element ax = src.act(c.op, src.generator(c.gen));
            Element fa = value_of({c.inst_a, c.map_a}, c.gen, depth);
            for (const auto& t : fa.terms())
                if (!tgt.has_action(c.op, t.gen))
                    return true;  // not checkable at this value
            Element rhs = tgt.act(c.op, fa);
            Element lhs = apply_map({c.inst_b, c.map_b}, ax, depth);
            const Chart& tb = sys.instance(c.inst_b).target_chart(c.map_b);
            return tb.elements_equal(lhs, rhs);
        }
        // Composite: right(top(x)) = bottom(left(x))
        const LESInstance& ti = sys.instance(c.top.instance);
        const Chart& src = ti.source_chart(c.top.ref);
        Element x = src.generator(c.gen);
        Element tv = apply_map(c.top, x, depth);
        Element lv = apply_map(c.left, x, depth);
        Element lhs = apply_map(c.right, tv, depth);
        Element rhs = apply_map(c.bottom, lv, depth);
        const Chart& corner = sys.instance(c.right.instance).target_chart(c.right.ref);
        return corner.elements_equal(lhs, rhs);
    }

    void dfs(std::size_t depth)
    {
        if (++steps > step_cap)
            throw Error(ErrorCode::TooLarge, "filling enumeration exceeded the step cap");
        if (depth == unknowns.size()) {
            Filling f;
            for (std::size_t i = 0; i < unknowns.size(); ++i)
                f.entries[unknowns[i].key] = current[i];
            for (const auto& [k, v] : theta)
                f.entries[k] = v;
            out.push_back(std::move(f));
            return;
        }
        const UnknownEntry& u = unknowns[depth];
        for (const auto& cand : u.candidates) {
            current[depth] = cand;
            bool ok = true;
            for (std::size_t ci : fire_at[depth])
                if (!check(constraints[ci], static_cast<int>(depth))) {
                    ok = false;
                    break;
                }
            if (ok)
                dfs(depth + 1);
        }
    }
};

void collect_constraints(const ChaseSystem& sys, Enumerator& en)
{
    for (int i = 0; i < static_cast<int>(sys.instances().size()); ++i) {
        const LESInstance& inst = sys.instance(i);
        for (std::size_t n = 0; n < inst.nodes().size(); ++n) {
            Constraint c;
            c.kind = Constraint::Kind::Node;
            c.instance = i;
            c.node_index = n;
            for (const auto& s : inst.source_group(inst.nodes()[n].in))
                c.involved.push_back({MapSlot{i, inst.nodes()[n].in}, s.name});
            for (const auto& s : inst.source_group(inst.nodes()[n].out))
                c.involved.push_back({MapSlot{i, inst.nodes()[n].out}, s.name});
            en.constraints.push_back(std::move(c));
        }
        // intra-instance operator links
        for (const auto& op : inst.x_chart().operators()) {
            if (op.name == "two" || !inst.c_chart().find_operator(op.name))
                continue;
            for (const MapRef& ma : inst.maps()) {
                MapRef mb{ma.kind, ma.stem + op.stem_shift};
                if (!inst.has_map(mb))
                    continue;
                const Chart& src = inst.source_chart(ma);
                for (const auto& s : inst.source_group(ma)) {
                    if (!src.has_action(op.name, s.name))
                        continue;
                    Constraint c;
                    c.kind = Constraint::Kind::OpLink;
                    c.inst_a = c.inst_b = i;
                    c.op = op.name;
                    c.map_a = ma;
                    c.map_b = mb;
                    c.gen = s.name;
                    c.involved.push_back({MapSlot{i, ma}, s.name});
                    Element ax = src.act(op.name, src.generator(s.name));
                    for (const auto& t : ax.terms())
                        c.involved.push_back({MapSlot{i, mb}, t.gen});
                    en.constraints.push_back(std::move(c));
                }
            }
        }
    }

    for (const auto& sq : sys.squares()) {
        if (sq.kind == SquareConstraint::Kind::OperatorLink) {
            const LESInstance& a = sys.instance(sq.inst_a);
            const LESInstance& b = sys.instance(sq.inst_b);
            const Operator* op_x = a.x_chart().find_operator(sq.op);
            if (!op_x || !b.x_chart().find_operator(sq.op) || !a.c_chart().find_operator(sq.op))
                continue;
            for (const MapRef& ma : a.maps()) {
                MapRef mb{ma.kind, ma.stem + op_x->stem_shift};
                if (!b.has_map(mb))
                    continue;
                const Chart& src = a.source_chart(ma);
                for (const auto& s : a.source_group(ma)) {
                    if (!src.has_action(sq.op, s.name))
                        continue;
                    Constraint c;
                    c.kind = Constraint::Kind::OpLink;
                    c.inst_a = sq.inst_a;
                    c.inst_b = sq.inst_b;
                    c.op = sq.op;
                    c.map_a = ma;
                    c.map_b = mb;
                    c.gen = s.name;
                    c.involved.push_back({MapSlot{sq.inst_a, ma}, s.name});
                    Element ax = src.act(sq.op, src.generator(s.name));
                    for (const auto& t : ax.terms())
                        c.involved.push_back({MapSlot{sq.inst_b, mb}, t.gen});
                    en.constraints.push_back(std::move(c));
                }
            }
        } else {
            const LESInstance& ti = sys.instance(sq.top.instance);
            for (const auto& s : ti.source_group(sq.top.ref)) {
                Constraint c;
                c.kind = Constraint::Kind::Composite;
                c.top = sq.top;
                c.left = sq.left;
                c.bottom = sq.bottom;
                c.right = sq.right;
                c.gen = s.name;
                c.involved.push_back({sq.top, s.name});
                c.involved.push_back({sq.left, s.name});
                for (const auto& g : sys.instance(sq.right.instance).source_group(sq.right.ref))
                    c.involved.push_back({sq.right, g.name});
                for (const auto& g : sys.instance(sq.bottom.instance).source_group(sq.bottom.ref))
                    c.involved.push_back({sq.bottom, g.name});
                en.constraints.push_back(std::move(c));
            }
        }
    }
}

}  // namespace

Element Filling::apply(const ChaseSystem& sys, const MapSlot& slot, const Element& x) const
{
    const LESInstance& inst = sys.instance(slot.instance);
    const Chart& tgt = inst.target_chart(slot.ref);
    int ts = inst.target_stem(slot.ref);
    Element out = tgt.zero(ts);
    for (const auto& t : x.terms()) {
        auto it = entries.find(EntryKey{slot, t.gen});
        if (it == entries.end())
            throw Error(ErrorCode::NotFound, "filling has no entry for " + t.gen);
        out = tgt.add(out, tgt.scalar_mul(t.coeff, it->second));
    }
    return out;
}

std::uint64_t system_total_order(const ChaseSystem& sys)
{
    std::set<std::pair<std::string, int>> groups;
    std::uint64_t prod = 1;
    for (const auto& inst : sys.instances()) {
        for (const MapRef& m : inst.maps()) {
            for (auto [chart, stem] : {std::make_pair(&inst.source_chart(m), inst.source_stem(m)),
                                       std::make_pair(&inst.target_chart(m), inst.target_stem(m))}) {
                auto key = std::make_pair(chart->spectrum(), stem);
                if (groups.count(key))
                    continue;
                groups.insert(key);
                std::uint64_t order = 1;
                for (const auto& s : chart->group(stem)) {
                    if (s.order.is_infinite())
                        throw Error(ErrorCode::TooLarge, "infinite summand inside an instance window");
                    order *= s.order.value();
                    if (order > (1ull << 40))
                        return order;
                }
                prod *= std::max<std::uint64_t>(order, 1);
                if (prod > (1ull << 40))
                    return prod;
            }
        }
    }
    return prod;
}

std::vector<Filling> enumerate_fillings(const ChaseSystem& sys, std::uint64_t bound)
{
    std::uint64_t total = system_total_order(sys);
    if (total > bound)
        throw Error(ErrorCode::TooLarge, "total window order " + std::to_string(total) +
                                             " exceeds the oracle bound " + std::to_string(bound));

    Enumerator en(sys);
    for (int i = 0; i < static_cast<int>(sys.instances().size()); ++i) {
        const LESInstance& inst = sys.instance(i);
        for (const MapRef& m : inst.maps()) {
            if (m.kind == MapKind::Theta) {
                const Chart& x = inst.x_chart();
                for (const auto& s : inst.source_group(m)) {
                    if (inst.triple().map_op != "two" && !x.has_action(inst.triple().map_op, s.name))
                        throw Error(ErrorCode::MissingActionData,
                                    "self-map action missing for " + s.name + " in " + inst.describe_map(m));
                    en.theta[{MapSlot{i, m}, s.name}] =
                        x.act(inst.triple().map_op, x.generator(s.name));
                }
                continue;
            }
            const Chart& tgt = inst.target_chart(m);
            const Chart& src = inst.source_chart(m);
            std::vector<Element> all = tgt.enumerate_stem(inst.target_stem(m));
            for (const auto& s : inst.source_group(m)) {
                UnknownEntry u;
                u.key = {MapSlot{i, m}, s.name};
                Coeff so = elem_order(src, src.generator(s.name));
                auto fil = s.filtration;
                bool nondecr = inst.tags(m).filtration_nondecreasing;
                for (const auto& v : all) {
                    if (elem_order(tgt, v) > so)
                        continue;
                    if (nondecr && fil && !v.is_zero()) {
                        auto lead = tgt.leading_filtration(v);
                        if (lead && *lead < *fil)
                            continue;
                    }
                    u.candidates.push_back(v);
                }
                en.unknowns.push_back(std::move(u));
            }
        }
    }
    std::sort(en.unknowns.begin(), en.unknowns.end(),
              [](const UnknownEntry& a, const UnknownEntry& b) { return a.key < b.key; });
    for (std::size_t i = 0; i < en.unknowns.size(); ++i)
        en.index_of[en.unknowns[i].key] = static_cast<int>(i);

    collect_constraints(sys, en);
    en.fire_at.assign(std::max<std::size_t>(en.unknowns.size(), 1), {});
    std::vector<std::size_t> immediate;
    for (std::size_t ci = 0; ci < en.constraints.size(); ++ci) {
        int last = -1;
        for (const auto& k : en.constraints[ci].involved) {
            auto it = en.index_of.find(k);
            if (it != en.index_of.end())
                last = std::max(last, it->second);
        }
        if (last < 0)
            immediate.push_back(ci);  // only data-known entries involved
        else
            en.fire_at[static_cast<std::size_t>(last)].push_back(ci);
    }
    for (std::size_t ci : immediate)
        if (!en.check(en.constraints[ci], -1))
            return {};  // the data alone is already inconsistent

    if (en.unknowns.empty()) {
        Filling f;
        for (const auto& [k, v] : en.theta)
            f.entries[k] = v;
        return {f};
    }
    en.current.assign(en.unknowns.size(), Element());
    en.dfs(0);
    return std::move(en.out);
}

std::vector<std::string> exactness_scan(const ChaseSystem& sys, const Filling& f)
{
    std::vector<std::string> failures;
    for (int i = 0; i < static_cast<int>(sys.instances().size()); ++i) {
        const LESInstance& inst = sys.instance(i);
        for (const auto& node : inst.nodes()) {
            const Chart& node_chart = inst.target_chart(node.in);
            int node_stem = inst.target_stem(node.in);
            // image via full source scan
            std::set<Element> im;
            for (const auto& x : inst.source_chart(node.in).enumerate_stem(inst.source_stem(node.in)))
                im.insert(f.apply(sys, {i, node.in}, x));
            std::set<Element> ker;
            for (const auto& x : node_chart.enumerate_stem(node_stem))
                if (f.apply(sys, {i, node.out}, x).is_zero())
                    ker.insert(x);
            if (im != ker)
                failures.push_back("im != ker at " + inst.triple().label + " " + node.describe);
        }
    }
    return failures;
}

RandomSystem make_random_system(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto rint = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };

    RandomSystem rs;
    for (int attempt = 0; attempt < 64; ++attempt) {
        int d = rint(0, 2);
        int lo = 10;
        int hi = lo + rint(2, 5);
        Chart x("X", FiltrationScheme::AdamsNovikov, lo - d - 2, hi + d + 2);
        Chart c("C", FiltrationScheme::AdamsNovikov, lo - d - 2, hi + d + 2);
        Operator theta{"theta", d, std::nullopt};
        x.declare_operator(theta);

        int gen_id = 0;
        auto fill_chart = [&](Chart& ch, const char* prefix) {
            for (int s = ch.range_lo(); s <= ch.range_hi(); ++s) {
                ch.mark_complete(s);
                int n = rint(0, 2);
                std::uint64_t order_budget = 8;
                for (int j = 0; j < n; ++j) {
                    std::uint64_t ord = 1u << rint(1, 3);
                    if (ord > order_budget)
                        break;
                    order_budget /= ord;
                    CyclicSummand cs;
                    cs.name = std::string(prefix) + std::to_string(s) + "_" + std::to_string(gen_id++);
                    cs.order = SummandOrder::finite(ord);
                    cs.filtration = rint(0, 5);
                    cs.flags.insert(kFlagV1Torsion);
                    cs.provenance = "random";
                    ch.add_summand(s, cs);
                }
            }
        };
        fill_chart(x, "x");
        fill_chart(c, "c");

        // random theta action on X, order-respecting
        for (int s = x.range_lo(); s + d <= x.range_hi(); ++s) {
            for (const auto& g : x.group(s)) {
                std::vector<Element> cands;
                Coeff so = elem_order(x, x.generator(g.name));
                for (const auto& v : x.enumerate_stem(s + d))
                    if (elem_order(x, v) <= so)
                        cands.push_back(v);
                x.set_action("theta", g.name, cands[static_cast<std::size_t>(rint(0, static_cast<int>(cands.size()) - 1))]);
            }
        }

        Dataset ds;
        ds.source = "random(" + std::to_string(seed) + ")";
        ds.charts.emplace("X", std::move(x));
        ds.charts.emplace("C", std::move(c));

        rs.dataset = std::move(ds);
        rs.triple = CofiberTriple{"X-theta-C", "X", "C", "theta", d};
        rs.lo = lo;
        rs.hi = hi;
        rs.describe = "seed=" + std::to_string(seed) + " d=" + std::to_string(d) + " window=[" +
                      std::to_string(lo) + "," + std::to_string(hi) + "]";

        ChaseSystem sys(rs.dataset);
        sys.add_instance(rs.triple, rs.lo, rs.hi);
        if (system_total_order(sys) <= 4096)
            return rs;
        seed = rng();
    }
    throw Error(ErrorCode::TooLarge, "could not draw a random system within the order bound");
}

SoundnessReport run_soundness_suite(int count, std::uint64_t seed, std::uint64_t bound)
{
    SoundnessReport rep;
    std::mt19937_64 seeder(seed);
    for (int i = 0; i < count; ++i) {
        std::uint64_t s = seeder();
        RandomSystem rs = make_random_system(s);
        ChaseSystem sys(rs.dataset);
        sys.add_instance(rs.triple, rs.lo, rs.hi);

        Solver solver(sys);
        SolveResult res = solver.solve();
        Solver solver2(sys);
        SolveResult res2 = solver2.solve();
        if (Solver::serialize_trace(res) != Solver::serialize_trace(res2))
            rep.violations.push_back(rs.describe + ": nondeterministic solve");

        std::vector<Filling> fillings = enumerate_fillings(sys, bound);
        rep.instances++;
        rep.fillings_seen += fillings.size();
        if (res.inconsistent) {
            rep.inconsistent_instances++;
            if (!fillings.empty())
                rep.violations.push_back(rs.describe + ": solver reported inconsistent but " +
                                         std::to_string(fillings.size()) + " exact fillings exist");
            continue;
        }
        if (fillings.empty())
            rep.unsatisfiable_instances++;

        for (const auto& f : fillings) {
            auto fails = exactness_scan(sys, f);
            for (const auto& msg : fails)
                rep.violations.push_back(rs.describe + ": " + msg);
        }
        for (const auto& fact : res.facts) {
            if (fact.caveat)
                continue;  // caveat facts are pinned values, checked mod gauge below
            rep.facts_checked++;
            for (const auto& f : fillings) {
                auto it = f.entries.find(fact.entry);
                if (it == f.entries.end())
                    continue;
                const LESInstance& inst = sys.instance(fact.entry.slot.instance);
                const Chart& tgt = inst.target_chart(fact.entry.slot.ref);
                if (!tgt.elements_equal(it->second, fact.value)) {
                    rep.violations.push_back(rs.describe + ": fact " + fact.map_name + "(" + fact.entry.gen +
                                             ") = " + fact.value.to_string() + " contradicted by a filling (" +
                                             it->second.to_string() + ")");
                    break;
                }
            }
        }
        for (const auto& fact : res.facts) {
            if (!fact.caveat)
                continue;
            rep.facts_checked++;
            const LESInstance& inst = sys.instance(fact.entry.slot.instance);
            const Chart& src = inst.source_chart(fact.entry.slot.ref);
            const Chart& tgt = inst.target_chart(fact.entry.slot.ref);
            auto src_gauges = enumerate_gauges(src);
            auto tgt_gauges = enumerate_gauges(tgt);
            for (const auto& f : fillings) {
                bool fixable = false;
                for (const auto& gs : src_gauges) {
                    for (const auto& gt : tgt_gauges) {
                        if (src.spectrum() == tgt.spectrum() &&
                            !(gs.images == gt.images))
                            continue;
                        Element pre = gs.invert(src, src.generator(fact.entry.gen));
                        Element val = gt.apply(tgt, f.apply(sys, fact.entry.slot, pre));
                        if (tgt.elements_equal(val, fact.value)) {
                            fixable = true;
                            break;
                        }
                    }
                    if (fixable)
                        break;
                }
                if (!fixable) {
                    rep.violations.push_back(rs.describe + ": pinned fact " + fact.map_name + "(" +
                                             fact.entry.gen + ") = " + fact.value.to_string() +
                                             " not reachable by renaming in some filling");
                    break;
                }
            }
        }
    }
    return rep;
}

}  // namespace tmfchase
