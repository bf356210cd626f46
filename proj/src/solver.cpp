#include "tmfchase/solver.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace tmfchase {

namespace {

constexpr std::size_t kJointCap = 1u << 14;

std::string entry_map_name(const ChaseSystem& sys, const EntryKey& k)
{
    return sys.instance(k.slot.instance).describe_map(k.slot.ref);
}

std::string render_domain(const std::vector<Element>& d)
{
    std::string out = "{";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i)
            out += ";";
        out += d[i].to_string();
    }
    return out + "}";
}

// Order of an element in a finite 2-group.
Coeff element_order(const Chart& chart, const Element& e)
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

std::vector<Element> subgroup_closure(const Chart& chart, int stem, const std::vector<Element>& gens)
{
    std::vector<Element> closure{chart.zero(stem)};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& g : gens) {
            for (std::size_t i = 0; i < closure.size(); ++i) {
                Element s = chart.add(closure[i], g);
                if (!std::binary_search(closure.begin(), closure.end(), s)) {
                    closure.insert(std::lower_bound(closure.begin(), closure.end(), s), s);
                    grew = true;
                }
            }
        }
    }
    return closure;
}

}  // namespace

const Fact* SolveResult::find(const std::string& map_name, const std::string& gen) const
{
    for (const auto& f : facts)
        if (f.map_name == map_name && f.entry.gen == gen)
            return &f;
    return nullptr;
}

Solver::Solver(const ChaseSystem& sys) : sys_(sys) {}

void Solver::init_domains()
{
    for (int i = 0; i < static_cast<int>(sys_.instances().size()); ++i) {
        const LESInstance& inst = sys_.instance(i);
        for (const MapRef& m : inst.maps()) {
            const Chart& tgt = inst.target_chart(m);
            std::vector<Element> all = tgt.enumerate_stem(inst.target_stem(m));
            for (const auto& s : inst.source_group(m)) {
                EntryKey key{MapSlot{i, m}, s.name};
                domains_[key] = Domain{all, -1, false};
            }
        }
    }
}

void Solver::record(const std::string& rule, const std::string& context, const EntryKey& key,
                    std::vector<Element> domain_after, std::vector<int> premises, bool caveat)
{
    std::sort(premises.begin(), premises.end());
    premises.erase(std::unique(premises.begin(), premises.end()), premises.end());
    std::erase(premises, -1);
    Deduction d;
    d.id = static_cast<int>(log_.size());
    d.rule = rule;
    d.context = context;
    d.entry = key;
    d.domain_after = std::move(domain_after);
    d.premises = std::move(premises);
    d.caveat = caveat;
    Domain& dom = domains_[key];
    dom.values = d.domain_after;
    dom.last_deduction = d.id;
    dom.caveat = dom.caveat || caveat;
    log_.push_back(std::move(d));
    changed_ = true;
    if (domains_[key].values.empty() && !inconsistent_) {
        inconsistent_ = true;
        conflict_entry_ = entry_map_name(sys_, key) + "(" + key.gen + ")";
    }
}

bool Solver::prune(const std::string& rule, const std::string& context, const EntryKey& key,
                   const std::vector<Element>& keep, std::vector<int> premises, bool caveat)
{
    Domain& dom = domains_[key];
    std::vector<Element> next;
    for (const auto& v : dom.values)
        if (std::find(keep.begin(), keep.end(), v) != keep.end())
            next.push_back(v);
    if (next.size() == dom.values.size())
        return false;
    premises.push_back(dom.last_deduction);
    record(rule, context, key, std::move(next), std::move(premises), caveat || dom.caveat);
    return true;
}

std::vector<int> Solver::read_premises(const std::vector<EntryKey>& keys) const
{
    std::vector<int> out;
    for (const auto& k : keys) {
        auto it = domains_.find(k);
        if (it != domains_.end())
            out.push_back(it->second.last_deduction);
    }
    return out;
}

void Solver::run_r0_selfmap()
{
    for (int i = 0; i < static_cast<int>(sys_.instances().size()); ++i) {
        const LESInstance& inst = sys_.instance(i);
        for (const MapRef& m : inst.maps()) {
            if (m.kind != MapKind::Theta)
                continue;
            const Chart& x = inst.x_chart();
            for (const auto& s : inst.source_group(m)) {
                EntryKey key{MapSlot{i, m}, s.name};
                if (masked_.count(key))
                    continue;
                if (inst.triple().map_op != "two" && !x.has_action(inst.triple().map_op, s.name))
                    continue;
                Element val = x.act(inst.triple().map_op, x.generator(s.name));
                record("R0", "self-map action " + inst.describe_map(m), key, {val}, {}, false);
            }
        }
    }
}

void Solver::run_r1_zero()
{
    for (int i = 0; i < static_cast<int>(sys_.instances().size()); ++i) {
        const LESInstance& inst = sys_.instance(i);
        for (const MapRef& m : inst.maps()) {
            if (m.kind == MapKind::Theta)
                continue;
            if (!inst.target_group(m).empty())
                continue;
            for (const auto& s : inst.source_group(m)) {
                EntryKey key{MapSlot{i, m}, s.name};
                Element zero = inst.target_chart(m).zero(inst.target_stem(m));
                record("R1", "zero target group " + inst.describe_map(m), key, {zero}, {}, false);
            }
        }
    }
}

void Solver::run_r7_order()
{
    for (auto& [key, dom] : domains_) {
        if (dom.values.size() <= 1)
            continue;
        const LESInstance& inst = sys_.instance(key.slot.instance);
        const Chart& src = inst.source_chart(key.slot.ref);
        const Chart& tgt = inst.target_chart(key.slot.ref);
        Coeff src_ord = element_order(src, src.generator(key.gen));
        std::vector<Element> keep;
        for (const auto& v : dom.values)
            if (element_order(tgt, v) <= src_ord)
                keep.push_back(v);
        if (keep.size() != dom.values.size())
            prune("R7", "order respect " + entry_map_name(sys_, key), key, keep, {}, false);
        if (inconsistent_)
            return;
    }
}

void Solver::run_r5_filtration()
{
    for (auto& [key, dom] : domains_) {
        if (dom.values.size() <= 1)
            continue;
        const LESInstance& inst = sys_.instance(key.slot.instance);
        if (!inst.tags(key.slot.ref).filtration_nondecreasing)
            continue;
        const Chart& src = inst.source_chart(key.slot.ref);
        const Chart& tgt = inst.target_chart(key.slot.ref);
        const CyclicSummand* s = src.find_summand(key.gen);
        if (!s || !s->filtration)
            continue;
        std::vector<Element> keep;
        for (const auto& v : dom.values) {
            if (v.is_zero()) {
                keep.push_back(v);
                continue;
            }
            auto lead = tgt.leading_filtration(v);
            if (!lead || *lead >= *s->filtration)
                keep.push_back(v);
        }
        if (keep.size() != dom.values.size())
            prune("R5", "filtration nondecreasing " + entry_map_name(sys_, key), key, keep, {}, false);
        if (inconsistent_)
            return;
    }
}

namespace {

// Iterates the cartesian product of entry domains.
struct JointIter {
    std::vector<const std::vector<Element>*> domains;
    std::vector<std::size_t> idx;

    // False when the product is degenerate (an empty domain) or too large.
    bool start()
    {
        std::size_t prod = 1;
        for (const auto* d : domains) {
            if (d->empty())
                return false;
            prod *= d->size();
            if (prod > kJointCap)
                return false;
        }
        idx.assign(domains.size(), 0);
        return true;
    }
    bool advance()
    {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (++idx[i] < domains[i]->size())
                return true;
            idx[i] = 0;
        }
        return false;
    }
    const Element& at(std::size_t i) const { return (*domains[i])[idx[i]]; }
};

Element apply_entries(const Chart& tgt, int tgt_stem, const std::vector<std::string>& gens,
                      const std::vector<const Element*>& values, const Element& x)
{
    Element out = tgt.zero(tgt_stem);
    for (const auto& t : x.terms()) {
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (gens[i] == t.gen) {
                out = tgt.add(out, tgt.scalar_mul(t.coeff, *values[i]));
                break;
            }
        }
    }
    return out;
}

}  // namespace

void Solver::run_r2_nodes()
{
    for (int i = 0; i < static_cast<int>(sys_.instances().size()); ++i) {
        const LESInstance& inst = sys_.instance(i);
        for (std::size_t n = 0; n < inst.nodes().size(); ++n) {
            const auto& node = inst.nodes()[n];
            MapRef fin = node.in, fout = node.out;
            const Chart& node_chart = inst.target_chart(fin);
            int node_stem = inst.target_stem(fin);
            const Chart& out_tgt = inst.target_chart(fout);
            int out_stem = inst.target_stem(fout);

            std::vector<std::string> in_gens, out_gens;
            for (const auto& s : inst.source_group(fin))
                in_gens.push_back(s.name);
            for (const auto& s : inst.source_group(fout))
                out_gens.push_back(s.name);

            std::vector<EntryKey> keys;
            JointIter it;
            for (const auto& g : in_gens) {
                keys.push_back({MapSlot{i, fin}, g});
                it.domains.push_back(&domains_[keys.back()].values);
            }
            for (const auto& g : out_gens) {
                keys.push_back({MapSlot{i, fout}, g});
                it.domains.push_back(&domains_[keys.back()].values);
            }
            if (keys.empty() || !it.start())
                continue;

            const std::vector<Element> node_elems = node_chart.enumerate_stem(node_stem);
            std::vector<std::set<std::size_t>> kept(keys.size());
            bool any_combo = false;
            bool go = true;
            for (; go; go = it.advance()) {
                // im(in) over the node group.
                std::vector<Element> in_vals;
                for (std::size_t a = 0; a < in_gens.size(); ++a)
                    in_vals.push_back(it.at(a));
                std::vector<Element> im = subgroup_closure(node_chart, node_stem, in_vals);
                // ker(out) by scanning the node group.
                std::vector<const Element*> out_vals;
                for (std::size_t b = 0; b < out_gens.size(); ++b)
                    out_vals.push_back(&it.at(in_gens.size() + b));
                std::vector<Element> ker;
                for (const auto& x : node_elems)
                    if (apply_entries(out_tgt, out_stem, out_gens, out_vals, x).is_zero())
                        ker.push_back(x);
                std::sort(ker.begin(), ker.end());
                if (im == ker) {
                    any_combo = true;
                    for (std::size_t k = 0; k < keys.size(); ++k)
                        kept[k].insert(it.idx[k]);
                }
            }
            if (!any_combo) {
                // No locally exact filling: contradiction at this node.
                EntryKey key = keys.front();
                std::vector<int> prem = read_premises(keys);
                record("R2", "exactness " + inst.triple().label + " " + node.describe, key, {}, prem, false);
                return;
            }
            for (std::size_t k = 0; k < keys.size(); ++k) {
                std::vector<Element> keep;
                const auto& dom = domains_[keys[k]].values;
                for (std::size_t vi = 0; vi < dom.size(); ++vi)
                    if (kept[k].count(vi))
                        keep.push_back(dom[vi]);
                if (keep.size() != dom.size()) {
                    bool rank1 = in_gens.size() <= 1 && node_elems.size() <= 2 && keep.size() == 1;
                    std::vector<EntryKey> others;
                    bool caveat = false;
                    for (std::size_t j = 0; j < keys.size(); ++j)
                        if (j != k) {
                            others.push_back(keys[j]);
                            caveat = caveat || domains_[keys[j]].caveat;
                        }
                    prune(rank1 ? "R3" : "R2", "exactness " + inst.triple().label + " " + node.describe,
                          keys[k], keep, read_premises(others), caveat);
                    if (inconsistent_)
                        return;
                }
            }
        }
    }
}

// Operator links: f_b(alpha x) = alpha f_a(x), for instance pairs of the same
// triple, map positions offset by the operator's stem shift. Intra-instance
// links implement R4; explicit SquareConstraints implement R6.
void Solver::run_r4_linearity()
{
    for (int i = 0; i < static_cast<int>(sys_.instances().size()); ++i) {
        const LESInstance& inst = sys_.instance(i);
        for (const auto& op : inst.x_chart().operators()) {
            if (op.name == "two")
                continue;
            if (!inst.c_chart().find_operator(op.name))
                continue;
            apply_operator_link("R4", i, i, op.name);
            if (inconsistent_)
                return;
        }
    }
}

void Solver::apply_operator_link(const std::string& rule, int ia, int ib, const std::string& opname)
{
    const LESInstance& a = sys_.instance(ia);
    const LESInstance& b = sys_.instance(ib);
    if (a.triple().label != b.triple().label)
        throw Error(ErrorCode::SchemaViolation, "operator link requires instances of one triple");
    const Operator* op_x = a.x_chart().find_operator(opname);
    const Operator* op_c = a.c_chart().find_operator(opname);
    if (!op_x || !op_c)
        return;
    int shift = op_x->stem_shift;

    for (const MapRef& ma : a.maps()) {
        MapRef mb{ma.kind, ma.stem + shift};
        if (!b.has_map(mb))
            continue;
        const Chart& src = a.source_chart(ma);
        const Chart& tgt = a.target_chart(ma);
        const Chart& tgt_b = b.target_chart(mb);
        int tgt_b_stem = b.target_stem(mb);

        for (const auto& s : a.source_group(ma)) {
            if (!src.has_action(opname, s.name))
                continue;
            Element ax = src.act(opname, src.generator(s.name));  // in source of mb
            EntryKey key_a{MapSlot{ia, ma}, s.name};

            // Check alpha is computable on every candidate of f_a(x).
            bool computable = true;
            for (const auto& v : domains_[key_a].values)
                for (const auto& t : v.terms())
                    if (!tgt.has_action(opname, t.gen))
                        computable = false;
            if (!computable)
                continue;

            std::vector<std::string> b_gens;
            for (const auto& t : ax.terms())
                b_gens.push_back(t.gen);
            std::vector<EntryKey> keys{key_a};
            for (const auto& g : b_gens)
                keys.push_back({MapSlot{ib, mb}, g});

            JointIter it;
            for (const auto& k : keys)
                it.domains.push_back(&domains_[k].values);
            if (!it.start())
                continue;

            std::vector<std::set<std::size_t>> kept(keys.size());
            bool any = false;
            bool go = true;
            for (; go; go = it.advance()) {
                Element rhs = tgt.act(opname, it.at(0));  // alpha f_a(x), lands in tgt_b stem
                std::vector<const Element*> vals;
                for (std::size_t j = 0; j < b_gens.size(); ++j)
                    vals.push_back(&it.at(1 + j));
                Element lhs = apply_entries(tgt_b, tgt_b_stem, b_gens, vals, ax);
                if (tgt_b.elements_equal(lhs, rhs)) {
                    any = true;
                    for (std::size_t k = 0; k < keys.size(); ++k)
                        kept[k].insert(it.idx[k]);
                }
            }
            std::string ctx = rule + " link " + opname + " " + a.describe_map(ma) + " ~ " + b.describe_map(mb);
            if (!any) {
                record(rule, ctx, key_a, {}, read_premises(keys), false);
                return;
            }
            for (std::size_t k = 0; k < keys.size(); ++k) {
                std::vector<Element> keep;
                const auto& dom = domains_[keys[k]].values;
                for (std::size_t vi = 0; vi < dom.size(); ++vi)
                    if (kept[k].count(vi))
                        keep.push_back(dom[vi]);
                if (keep.size() != dom.size()) {
                    std::vector<EntryKey> others;
                    bool caveat = false;
                    for (std::size_t j = 0; j < keys.size(); ++j)
                        if (j != k) {
                            others.push_back(keys[j]);
                            caveat = caveat || domains_[keys[j]].caveat;
                        }
                    prune(rule, ctx, keys[k], keep, read_premises(others), caveat);
                    if (inconsistent_)
                        return;
                }
            }
        }
    }
}

void Solver::run_r6_squares()
{
    for (std::size_t qi = 0; qi < sys_.squares().size(); ++qi) {
        const SquareConstraint& sq = sys_.squares()[qi];
        if (sq.kind == SquareConstraint::Kind::OperatorLink) {
            apply_operator_link("R6", sq.inst_a, sq.inst_b, sq.op);
            if (inconsistent_)
                return;
            continue;
        }

        const LESInstance& ti = sys_.instance(sq.top.instance);
        const LESInstance& ri = sys_.instance(sq.right.instance);
        const LESInstance& bi = sys_.instance(sq.bottom.instance);

        const Chart& corner = ri.target_chart(sq.right.ref);
        int corner_stem = ri.target_stem(sq.right.ref);

        // One joint enumeration over the four maps' entries; the square must
        // commute on every source generator simultaneously.
        std::vector<std::string> top_gens, right_gens, bottom_gens;
        for (const auto& s : ti.source_group(sq.top.ref))
            top_gens.push_back(s.name);
        for (const auto& s : ri.source_group(sq.right.ref))
            right_gens.push_back(s.name);
        for (const auto& s : bi.source_group(sq.bottom.ref))
            bottom_gens.push_back(s.name);
        if (top_gens.empty())
            continue;

        std::vector<EntryKey> keys;
        for (const auto& g : top_gens)
            keys.push_back({sq.top, g});
        for (const auto& g : top_gens)
            keys.push_back({sq.left, g});
        for (const auto& g : right_gens)
            keys.push_back({sq.right, g});
        for (const auto& g : bottom_gens)
            keys.push_back({sq.bottom, g});

        JointIter it;
        for (const auto& k : keys)
            it.domains.push_back(&domains_[k].values);
        if (!it.start())
            continue;

        int rt_stem = ri.source_stem(sq.right.ref);
        int bt_stem = bi.source_stem(sq.bottom.ref);

        std::vector<std::set<std::size_t>> kept(keys.size());
        bool any = false;
        bool go = true;
        for (; go; go = it.advance()) {
            std::vector<const Element*> rv, bv;
            for (std::size_t j = 0; j < right_gens.size(); ++j)
                rv.push_back(&it.at(2 * top_gens.size() + j));
            for (std::size_t j = 0; j < bottom_gens.size(); ++j)
                bv.push_back(&it.at(2 * top_gens.size() + right_gens.size() + j));
            bool all_commute = true;
            for (std::size_t g = 0; g < top_gens.size(); ++g) {
                const Element& top_v = it.at(g);
                const Element& left_v = it.at(top_gens.size() + g);
                if (top_v.stem() != rt_stem || left_v.stem() != bt_stem) {
                    all_commute = false;
                    break;
                }
                Element lhs = apply_entries(corner, corner_stem, right_gens, rv, top_v);
                Element rhs = apply_entries(corner, corner_stem, bottom_gens, bv, left_v);
                if (!corner.elements_equal(lhs, rhs)) {
                    all_commute = false;
                    break;
                }
            }
            if (all_commute) {
                any = true;
                for (std::size_t k = 0; k < keys.size(); ++k)
                    kept[k].insert(it.idx[k]);
            }
        }
        std::string ctx = "R6 square " + (sq.label.empty() ? std::string("composite") : sq.label);
        if (!any) {
            record("R6", ctx, keys.front(), {}, read_premises(keys), false);
            return;
        }
        for (std::size_t k = 0; k < keys.size(); ++k) {
            std::vector<Element> keep;
            const auto& dom = domains_[keys[k]].values;
            for (std::size_t vi = 0; vi < dom.size(); ++vi)
                if (kept[k].count(vi))
                    keep.push_back(dom[vi]);
            if (keep.size() != dom.size()) {
                std::vector<EntryKey> others;
                bool caveat = false;
                for (std::size_t j = 0; j < keys.size(); ++j)
                    if (j != k) {
                        others.push_back(keys[j]);
                        caveat = caveat || domains_[keys[j]].caveat;
                    }
                prune("R6", ctx, keys[k], keep, read_premises(others), caveat);
                if (inconsistent_)
                    return;
            }
        }
    }
}

// Pinning: chart names only determine classes up to a filtration renaming
// (generator plus strictly higher-filtration classes, compatible with the
// operator actions). When every remaining candidate for an entry is carried to
// one named generator by such a renaming, the solver commits to that
// representative and flags the fact.
void Solver::run_pins()
{
    for (auto& [key, dom] : domains_) {
        if (dom.values.size() < 2)
            continue;
        bool has_zero = false;
        for (const auto& v : dom.values)
            if (v.is_zero())
                has_zero = true;
        if (has_zero)
            continue;
        const LESInstance& inst = sys_.instance(key.slot.instance);
        const Chart& src = inst.source_chart(key.slot.ref);
        const Chart& tgt = inst.target_chart(key.slot.ref);
        bool same_spectrum = src.spectrum() == tgt.spectrum();
        std::vector<Gauge> gs = enumerate_gauges(src);
        std::vector<Gauge> gt = enumerate_gauges(tgt);
        if (gs.size() <= 1 && gt.size() <= 1)
            continue;

        // A renaming pair carries filling value v to gt(v + F(delta)) where
        // delta = gauge shift of the source generator; F(delta) is only known
        // through committed sibling entries.
        std::vector<int> sib_premises;
        auto shifted_value = [&](const Gauge& g, const Element& v, bool* known) -> Element {
            Element gx = g.apply(src, src.generator(key.gen));
            Element delta = src.add(gx, src.negate(src.generator(key.gen)));
            Element out = v;
            *known = true;
            for (const auto& t : delta.terms()) {
                EntryKey sib{key.slot, t.gen};
                auto it = domains_.find(sib);
                if (it == domains_.end() || it->second.values.size() != 1) {
                    *known = false;
                    return out;
                }
                sib_premises.push_back(it->second.last_deduction);
                out = tgt.add(out, tgt.scalar_mul(t.coeff, it->second.values[0]));
            }
            return out;
        };

        for (const auto& s : inst.target_group(key.slot.ref)) {
            Element gstar = tgt.generator(s.name);
            if (std::find(dom.values.begin(), dom.values.end(), gstar) == dom.values.end())
                continue;
            sib_premises.clear();
            bool all_reachable = true;
            for (const auto& v : dom.values) {
                bool reachable = false;
                for (const auto& g_src : gs) {
                    for (const auto& g_tgt : gt) {
                        if (same_spectrum && !(g_src.images == g_tgt.images))
                            continue;
                        bool known = false;
                        Element shifted = shifted_value(g_src, v, &known);
                        if (!known)
                            continue;
                        if (tgt.elements_equal(g_tgt.apply(tgt, shifted), gstar)) {
                            reachable = true;
                            break;
                        }
                    }
                    if (reachable)
                        break;
                }
                if (!reachable) {
                    all_reachable = false;
                    break;
                }
            }
            if (all_reachable) {
                std::vector<int> prem = sib_premises;
                prem.push_back(dom.last_deduction);
                record("PIN", "named representative up to filtration renaming", key, {gstar}, prem, true);
                return;  // restart fixpoint after each pin
            }
        }
    }
}

void Solver::derive_props(SolveResult& out) const
{
    std::set<std::pair<int, MapRef>> seen;
    for (const auto& [key, dom] : domains_) {
        auto id = std::make_pair(key.slot.instance, key.slot.ref);
        if (seen.count(id))
            continue;
        seen.insert(id);
        const LESInstance& inst = sys_.instance(key.slot.instance);
        const Chart& src = inst.source_chart(key.slot.ref);
        const Chart& tgt = inst.target_chart(key.slot.ref);
        int src_stem = inst.source_stem(key.slot.ref);
        int tgt_stem = inst.target_stem(key.slot.ref);

        std::vector<std::string> gens;
        std::vector<Element> vals;
        std::vector<int> prem;
        bool determined = true;
        for (const auto& s : src.group(src_stem)) {
            EntryKey k{key.slot, s.name};
            auto it = domains_.find(k);
            if (it == domains_.end() || it->second.values.size() != 1) {
                determined = false;
                break;
            }
            gens.push_back(s.name);
            vals.push_back(it->second.values[0]);
            prem.push_back(it->second.last_deduction);
        }
        if (!determined)
            continue;

        std::vector<const Element*> vp;
        for (const auto& v : vals)
            vp.push_back(&v);
        bool inj = true, zero = true;
        std::set<Element> image;
        for (const auto& x : src.enumerate_stem(src_stem)) {
            Element y = apply_entries(tgt, tgt_stem, gens, vp, x);
            if (!y.is_zero())
                zero = false;
            else if (!x.is_zero())
                inj = false;
            image.insert(y);
        }
        bool surj = image.size() == tgt.enumerate_stem(tgt_stem).size();
        if (zero)
            out.props.push_back({key.slot, MapProp::Zero, prem});
        if (inj && !zero)
            out.props.push_back({key.slot, MapProp::Injective, prem});
        if (surj)
            out.props.push_back({key.slot, MapProp::Surjective, prem});
        if (inj && surj)
            out.props.push_back({key.slot, MapProp::Iso, prem});
    }
}

SolveResult Solver::solve()
{
    SolveResult out;
    init_domains();
    run_r0_selfmap();
    run_r1_zero();

    int rounds = 0;
    while (!inconsistent_) {
        changed_ = false;
        run_r7_order();
        if (!inconsistent_)
            run_r5_filtration();
        if (!inconsistent_)
            run_r2_nodes();
        if (!inconsistent_)
            run_r4_linearity();
        if (!inconsistent_)
            run_r6_squares();
        if (!changed_ && !inconsistent_) {
            changed_ = false;
            run_pins();
            if (!changed_)
                break;
        }
        if (++rounds > 1000)
            break;
    }

    out.log = log_;
    out.inconsistent = inconsistent_;
    out.conflict_entry = conflict_entry_;
    if (inconsistent_) {
        minimize_conflict(out);
        return out;
    }
    for (const auto& [key, dom] : domains_) {
        if (dom.values.size() == 1) {
            Fact f;
            f.entry = key;
            f.value = dom.values[0];
            f.caveat = dom.caveat;
            f.deduction_id = dom.last_deduction;
            f.map_name = entry_map_name(sys_, key);
            out.facts.push_back(std::move(f));
        }
    }
    derive_props(out);
    return out;
}

void Solver::minimize_conflict(SolveResult& out)
{
    if (minimizing_)
        return;
    // Conflict core: the chart-forced inputs (R0 self-map entries) whose removal
    // keeps the system consistent. Greedy deletion over the inputs actually
    // present in the log.
    std::vector<EntryKey> inputs;
    for (const auto& d : log_)
        if (d.rule == "R0")
            inputs.push_back(d.entry);

    std::set<EntryKey> mask = masked_;
    std::vector<EntryKey> core;
    for (const auto& in : inputs) {
        Solver trial(sys_);
        trial.minimizing_ = true;
        trial.masked_ = mask;
        trial.masked_.insert(in);
        SolveResult r = trial.solve();
        if (r.inconsistent)
            mask.insert(in);  // conflict persists without it: not needed in core
        else
            core.push_back(in);  // removing it resolves the conflict: keep
    }
    for (const auto& k : core) {
        const LESInstance& inst = sys_.instance(k.slot.instance);
        const Chart& x = inst.x_chart();
        std::string val = inst.triple().map_op == "two"
                              ? x.act("two", x.generator(k.gen)).to_string()
                              : x.act(inst.triple().map_op, x.generator(k.gen)).to_string();
        out.conflict_core.push_back(entry_map_name(sys_, k) + "(" + k.gen + ") = " + val);
    }
    if (out.conflict_core.empty())
        out.conflict_core.push_back(out.conflict_entry + " admits no exact filling");
}

std::string Solver::serialize_trace(const SolveResult& r)
{
    std::ostringstream os;
    for (const auto& d : r.log) {
        os << "#" << d.id << " rule=" << d.rule << " inst=" << d.entry.slot.instance
           << " map=" << map_kind_name(d.entry.slot.ref.kind) << "[" << d.entry.slot.ref.stem << "]"
           << " gen=" << d.entry.gen << " domain=" << render_domain(d.domain_after) << " prem=";
        for (std::size_t i = 0; i < d.premises.size(); ++i)
            os << (i ? "," : "") << d.premises[i];
        os << " caveat=" << (d.caveat ? 1 : 0) << " ctx=" << d.context << "\n";
    }
    return os.str();
}

bool Solver::replay_trace(const ChaseSystem& sys, const std::string& trace, std::string* why)
{
    Solver fresh(sys);
    SolveResult r = fresh.solve();
    std::string again = serialize_trace(r);
    if (again != trace) {
        if (why)
            *why = "re-derived trace differs from recorded trace";
        return false;
    }
    return true;
}

}  // namespace tmfchase
