#include "tmfchase/chart.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>

namespace tmfchase {

const char* scheme_name(FiltrationScheme s)
{
    switch (s) {
        case FiltrationScheme::AdamsNovikov: return "adams_novikov";
        case FiltrationScheme::Adams: return "adams";
        case FiltrationScheme::None: return "none";
    }
    return "none";
}

FiltrationScheme scheme_from_name(const std::string& s)
{
    if (s == "adams_novikov")
        return FiltrationScheme::AdamsNovikov;
    if (s == "adams")
        return FiltrationScheme::Adams;
    if (s == "none")
        return FiltrationScheme::None;
    throw Error(ErrorCode::SchemaViolation, "unknown filtration scheme '" + s + "'");
}

std::optional<int> builtin_operator_shift(const std::string& name)
{
    if (name == "two")
        return 0;
    if (name == "eta")
        return 1;
    if (name == "v")
        return 2;
    if (name == "nu")
        return 3;
    if (name == "kbar")
        return 20;
    if (name == "delta8")
        return 192;
    return std::nullopt;
}

void Chart::add_summand(int stem, CyclicSummand s)
{
    if (!in_range(stem))
        throw Error(ErrorCode::OutOfRange, "summand stem " + std::to_string(stem) + " outside chart range");
    if (gen_stem_.count(s.name) || alias_to_primary_.count(s.name))
        throw Error(ErrorCode::DuplicateGenerator, "(" + spectrum_ + ", " + s.name + ") already declared");
    if (s.has_flag(kFlagV1Torsion) && s.order.is_infinite())
        throw Error(ErrorCode::SchemaViolation, "V1_TORSION summand " + s.name + " must have finite order");
    for (const auto& a : s.aliases) {
        if (gen_stem_.count(a) || alias_to_primary_.count(a))
            throw Error(ErrorCode::DuplicateGenerator, "alias (" + spectrum_ + ", " + a + ") already declared");
        alias_to_primary_[a] = s.name;
    }
    gen_stem_[s.name] = stem;
    groups_[stem].push_back(std::move(s));
    complete_stems_.insert(stem);
}

const std::vector<CyclicSummand>& Chart::group(int stem) const
{
    static const std::vector<CyclicSummand> empty;
    auto it = groups_.find(stem);
    return it == groups_.end() ? empty : it->second;
}

const CyclicSummand* Chart::find_summand(const std::string& name_or_alias) const
{
    std::string primary = name_or_alias;
    if (auto it = alias_to_primary_.find(name_or_alias); it != alias_to_primary_.end())
        primary = it->second;
    auto it = gen_stem_.find(primary);
    if (it == gen_stem_.end())
        return nullptr;
    for (const auto& s : group(it->second))
        if (s.name == primary)
            return &s;
    return nullptr;
}

int Chart::stem_of(const std::string& gen) const
{
    std::string primary = gen;
    if (auto it = alias_to_primary_.find(gen); it != alias_to_primary_.end())
        primary = it->second;
    auto it = gen_stem_.find(primary);
    if (it == gen_stem_.end())
        throw Error(ErrorCode::NotFound, "generator (" + spectrum_ + ", " + gen + ") not declared");
    return it->second;
}

void Chart::declare_operator(Operator op)
{
    if (find_operator(op.name))
        throw Error(ErrorCode::SchemaViolation, "operator " + op.name + " declared twice");
    operators_.push_back(std::move(op));
}

const Operator* Chart::find_operator(const std::string& name) const
{
    for (const auto& op : operators_)
        if (op.name == name)
            return &op;
    return nullptr;
}

void Chart::set_action(const std::string& op, const std::string& source_gen, Element target)
{
    if (op == "two")
        throw Error(ErrorCode::SchemaViolation, "the two action is implicit doubling; do not store tables for it");
    const Operator* o = find_operator(op);
    if (!o)
        throw Error(ErrorCode::SchemaViolation, "action references undeclared operator " + op);
    int src_stem = stem_of(source_gen);
    Element t = reduce(std::move(target));
    if (!t.is_zero() && t.stem() != src_stem + o->stem_shift)
        throw Error(ErrorCode::SchemaViolation,
                    "action " + op + "(" + source_gen + ") lands in stem " + std::to_string(t.stem()) +
                        ", expected " + std::to_string(src_stem + o->stem_shift));
    actions_[{op, source_gen}] = std::move(t);
}

bool Chart::has_action(const std::string& op, const std::string& source_gen) const
{
    return op == "two" || actions_.count({op, source_gen}) != 0;
}

Element Chart::generator(const std::string& name) const
{
    std::string primary = name;
    if (auto it = alias_to_primary_.find(name); it != alias_to_primary_.end())
        primary = it->second;
    Element e(spectrum_, stem_of(primary));
    e.set_coeff(primary, 1);
    return e;
}

Element Chart::reduce(Element e) const
{
    if (e.spectrum() != spectrum_)
        throw Error(ErrorCode::InvalidOperand, "element spectrum " + e.spectrum() + " does not match chart " + spectrum_);
    Element out(spectrum_, e.base_stem());
    out.set_delta8_power(e.delta8_power());
    for (const auto& t : e.terms()) {
        const CyclicSummand* s = find_summand(t.gen);
        if (!s)
            throw Error(ErrorCode::NotFound, "generator (" + spectrum_ + ", " + t.gen + ") not declared");
        if (stem_of(t.gen) != e.base_stem())
            throw Error(ErrorCode::InvalidOperand,
                        "term " + t.gen + " lives in stem " + std::to_string(stem_of(t.gen)) +
                            ", element claims stem " + std::to_string(e.base_stem()));
        Coeff c = s->order.reduce(t.coeff);
        if (c != 0)
            out.set_coeff(s->name, c);
    }
    return out;
}

Element Chart::add(const Element& a, const Element& b) const
{
    if (a.spectrum() != b.spectrum() || a.stem() != b.stem())
        throw Error(ErrorCode::InvalidOperand,
                    "cannot add " + a.spectrum() + "@" + std::to_string(a.stem()) + " and " + b.spectrum() +
                        "@" + std::to_string(b.stem()));
    Element out(spectrum_, a.base_stem());
    out.set_delta8_power(a.delta8_power());
    for (const auto& t : a.terms())
        out.set_coeff(t.gen, t.coeff);
    for (const auto& t : b.terms())
        out.set_coeff(t.gen, out.coeff_of(t.gen) + t.coeff);
    return reduce(out);
}

Element Chart::negate(const Element& a) const
{
    Element out(spectrum_, a.base_stem());
    out.set_delta8_power(a.delta8_power());
    for (const auto& t : a.terms())
        out.set_coeff(t.gen, -t.coeff);
    return reduce(out);
}

Element Chart::scalar_mul(Coeff c, const Element& a) const
{
    Element out(spectrum_, a.base_stem());
    out.set_delta8_power(a.delta8_power());
    for (const auto& t : a.terms())
        out.set_coeff(t.gen, c * t.coeff);
    return reduce(out);
}

bool Chart::elements_equal(const Element& a, const Element& b) const
{
    if (a.spectrum() != b.spectrum() || a.stem() != b.stem())
        return false;
    Element ra = reduce(a), rb = reduce(b);
    if (ra == rb)
        return true;
    bool sign_matters = false;
    auto scan = [&](const Element& e) {
        for (const auto& t : e.terms()) {
            const CyclicSummand* s = find_summand(t.gen);
            if (s && (s->order.is_infinite() || s->order.value() > 2))
                sign_matters = true;
        }
    };
    scan(ra);
    scan(rb);
    return sign_matters && ra == negate(rb);
}

std::optional<int> Chart::leading_filtration(const Element& e) const
{
    std::optional<int> lead;
    for (const auto& t : e.terms()) {
        const CyclicSummand* s = find_summand(t.gen);
        if (!s || !s->filtration)
            return std::nullopt;
        if (!lead || *s->filtration < *lead)
            lead = *s->filtration;
    }
    return lead;
}

void Chart::require_complete(int stem, const char* what) const
{
    if (!in_range(stem))
        throw Error(ErrorCode::OutOfRange,
                    std::string(what) + ": stem " + std::to_string(stem) + " outside [" + std::to_string(lo_) +
                        ", " + std::to_string(hi_) + "] of " + spectrum_);
    if (!is_complete(stem))
        throw Error(ErrorCode::IncompleteData,
                    std::string(what) + ": stem " + std::to_string(stem) + " of " + spectrum_ +
                        " is not transcribed (partial chart)");
}

Element Chart::act(const std::string& op, const Element& x) const
{
    Element rx = reduce(x);
    if (op == "two")
        return add(rx, rx);
    const Operator* o = find_operator(op);
    if (!o)
        throw Error(ErrorCode::MissingActionData, "operator " + op + " not declared on " + spectrum_);
    Element out = zero(rx.base_stem() + o->stem_shift);
    out.set_delta8_power(rx.delta8_power());
    for (const auto& t : rx.terms()) {
        auto it = actions_.find({op, t.gen});
        if (it == actions_.end())
            throw Error(ErrorCode::MissingActionData,
                        "no " + op + " action entry for (" + spectrum_ + ", " + t.gen + ")");
        Element part = scalar_mul(t.coeff, it->second);
        part.set_delta8_power(out.delta8_power());
        out = add(out, part);
    }
    return out;
}

std::vector<Element> Chart::enumerate_stem(int stem, Coeff coeff_window) const
{
    require_complete(stem, "enumerate_stem");
    const auto& g = group(stem);
    std::vector<Element> out;
    out.push_back(zero(stem));
    for (const auto& s : g) {
        std::vector<Coeff> coeffs;
        if (s.order.is_infinite()) {
            for (Coeff c = -coeff_window; c <= coeff_window; ++c)
                coeffs.push_back(c);
        } else {
            for (Coeff c = 0; c < static_cast<Coeff>(s.order.value()); ++c)
                coeffs.push_back(c);
        }
        std::vector<Element> next;
        next.reserve(out.size() * coeffs.size());
        for (const auto& e : out)
            for (Coeff c : coeffs) {
                Element e2 = e;
                e2.set_coeff(s.name, c);
                next.push_back(std::move(e2));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Element> Chart::kernel_of_operator(const std::string& op, int stem, Coeff coeff_window) const
{
    const Operator* o = op == "two" ? nullptr : find_operator(op);
    int shift = op == "two" ? 0 : (o ? o->stem_shift : throw Error(ErrorCode::MissingActionData,
                                                                   "operator " + op + " not declared on " + spectrum_));
    require_complete(stem, "kernel_of_operator");
    require_complete(stem + shift, "kernel_of_operator (target)");
    std::vector<Element> out;
    for (const auto& e : enumerate_stem(stem, coeff_window)) {
        if (e.is_zero())
            continue;
        if (act(op, e).is_zero())
            out.push_back(e);
    }
    return out;
}

bool Chart::is_divisible(const std::string& op, const Element& x, Coeff coeff_window) const
{
    Element rx = reduce(x);
    if (rx.is_zero())
        return true;
    const Operator* o = op == "two" ? nullptr : find_operator(op);
    int shift = op == "two" ? 0 : (o ? o->stem_shift : throw Error(ErrorCode::MissingActionData,
                                                                   "operator " + op + " not declared on " + spectrum_));
    int src = rx.base_stem() - shift;
    require_complete(rx.base_stem(), "is_divisible");
    require_complete(src, "is_divisible (source)");
    for (const auto& e : enumerate_stem(src, coeff_window))
        if (elements_equal(act(op, e), rx))
            return true;
    return false;
}

Chart Chart::v1_torsion_restriction() const
{
    Chart out(spectrum_, scheme_, lo_, hi_);
    out.operators_ = operators_;
    out.relations_ = relations_;
    out.periodic_ = periodic_;
    out.block_provenance_ = block_provenance_;
    for (int stem : complete_stems_)
        out.complete_stems_.insert(stem);
    for (const auto& [stem, g] : groups_)
        for (const auto& s : g)
            if (s.has_flag(kFlagV1Torsion))
                out.add_summand(stem, s);
    for (const auto& [key, target] : actions_) {
        const auto& [op, src] = key;
        const CyclicSummand* s = find_summand(src);
        if (!s || !s->has_flag(kFlagV1Torsion))
            continue;
        for (const auto& t : target.terms()) {
            const CyclicSummand* ts = find_summand(t.gen);
            if (ts && !ts->has_flag(kFlagV1Torsion))
                throw Error(ErrorCode::InconsistentFlags,
                            "action " + op + "(" + src + ") leaves the v1-torsion part via " + t.gen);
        }
        out.actions_[key] = target;
    }
    return out;
}

Element Chart::delta8_translate(const Element& x, int k) const
{
    Element rx = reduce(x);
    if (k == 0)
        return rx;
    int target = rx.stem() + 192 * k;
    if (target >= lo_ && target <= hi_) {
        // Within range the action table must speak for itself.
        Element cur = rx;
        for (int i = 0; i < k; ++i)
            cur = act("delta8", cur);
        return cur;
    }
    if (!periodic_)
        throw Error(ErrorCode::OutOfRange,
                    "delta8 translate to stem " + std::to_string(target) +
                        " leaves the chart range and no periodic extension is declared");
    for (const auto& t : rx.terms()) {
        const CyclicSummand* s = find_summand(t.gen);
        bool faithful = false;
        for (const auto& f : periodic_->faithful_flags)
            if (s && s->has_flag(f))
                faithful = true;
        if (!faithful)
            throw Error(ErrorCode::OutOfRange,
                        "periodic extension is only declared faithful on flagged summands; " + t.gen +
                            " is not covered");
    }
    Element out = rx;
    out.set_delta8_power(rx.delta8_power() + k);
    return out;
}

Element Gauge::apply(const Chart& chart, const Element& e) const
{
    Element out = chart.zero(e.base_stem());
    out.set_delta8_power(e.delta8_power());
    for (const auto& t : e.terms()) {
        auto it = images.find(t.gen);
        Element img = it == images.end() ? chart.generator(t.gen) : it->second;
        out = chart.add(out, chart.scalar_mul(t.coeff, img));
    }
    return out;
}

Element Gauge::invert(const Chart& chart, const Element& e) const
{
    for (const auto& x : chart.enumerate_stem(e.base_stem()))
        if (apply(chart, x) == e)
            return x;
    throw Error(ErrorCode::InvalidInput, "gauge is not invertible on stem " + std::to_string(e.base_stem()));
}

std::vector<Gauge> enumerate_gauges(const Chart& chart)
{
    // Candidate shifts: (g, h) in one stem with fil(h) > fil(g), ord(h) = 2
    // dividing ord(g).
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int stem : chart.complete_stems()) {
        const auto& g = chart.group(stem);
        for (const auto& a : g)
            for (const auto& b : g) {
                if (a.name == b.name || !a.filtration || !b.filtration)
                    continue;
                if (*b.filtration <= *a.filtration)
                    continue;
                if (b.order.is_infinite() || b.order.value() != 2)
                    continue;
                if (a.order.is_infinite() || a.order.value() % b.order.value() != 0)
                    continue;
                pairs.emplace_back(a.name, b.name);
            }
    }
    if (pairs.size() > 10)
        pairs.resize(10);
    std::vector<Gauge> out;
    for (std::uint64_t bits = 0; bits < (1ull << pairs.size()); ++bits) {
        Gauge g;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (!(bits & (1ull << i)))
                continue;
            auto it = g.images.find(pairs[i].first);
            Element img = it != g.images.end() ? it->second : chart.generator(pairs[i].first);
            img = chart.add(img, chart.generator(pairs[i].second));
            g.images[pairs[i].first] = img;
        }
        bool ok = true;
        for (int stem : chart.complete_stems()) {
            for (const auto& s : chart.group(stem)) {
                for (const auto& op : chart.operators()) {
                    if (op.name == "two" || !chart.has_action(op.name, s.name))
                        continue;
                    Element lhs = g.apply(chart, chart.act(op.name, chart.generator(s.name)));
                    Element gx = g.apply(chart, chart.generator(s.name));
                    bool computable = true;
                    for (const auto& t : gx.terms())
                        if (!chart.has_action(op.name, t.gen))
                            computable = false;
                    if (!computable) {
                        if (gx == chart.generator(s.name))
                            continue;
                        ok = false;
                        break;
                    }
                    if (lhs != chart.act(op.name, gx)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok)
                    break;
            }
            if (!ok)
                break;
        }
        if (ok)
            out.push_back(std::move(g));
    }
    return out;
}

std::vector<std::string> Chart::check_relations() const
{
    std::vector<std::string> violations;
    for (const auto& word : relations_) {
        for (const auto& [gen, stem] : gen_stem_) {
            Element cur = generator(gen);
            bool defined = true;
            // Words act right-to-left: {"two","eta"} means two(eta(g)).
            for (auto it = word.rbegin(); it != word.rend(); ++it) {
                const std::string& op = *it;
                if (op != "two") {
                    bool have = true;
                    for (const auto& t : cur.terms())
                        if (!has_action(op, t.gen))
                            have = false;
                    if (!have) {
                        defined = false;
                        break;
                    }
                }
                cur = act(op, cur);
                if (cur.is_zero())
                    break;
            }
            if (defined && !cur.is_zero()) {
                std::string w;
                for (const auto& op : word)
                    w += (w.empty() ? "" : "*") + op;
                violations.push_back("relation " + w + " = 0 fails on (" + spectrum_ + ", " + gen +
                                     "): got " + cur.to_string());
            }
        }
    }
    return violations;
}

}  // namespace tmfchase
