#include "tmfchase/pipeline.hpp"

#include "tmfchase/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace tmfchase {

const char* verdict_outcome_name(VerdictOutcome v)
{
    switch (v) {
        case VerdictOutcome::Family: return "FAMILY";
        case VerdictOutcome::RejectProjectsToZero: return "REJECT_PROJECTS_TO_ZERO";
        case VerdictOutcome::RejectNotInSphereImage: return "REJECT_NOT_IN_SPHERE_IMAGE";
        case VerdictOutcome::RejectNoSimple2TorsionTarget: return "REJECT_NO_SIMPLE_2_TORSION_TARGET";
        case VerdictOutcome::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

std::map<std::string, CandidateRecipe> load_recipes(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    std::map<std::string, CandidateRecipe> out;
    for (const auto& c : doc.at("candidates")) {
        CandidateRecipe r;
        r.name = c.at("name").get<std::string>();
        if (c.contains("project") && !c["project"].is_null()) {
            r.has_project = true;
            r.project.triple = c["project"].at("triple").get<std::string>();
            r.project.lo = c["project"].at("window").at(0).get<int>();
            r.project.hi = c["project"].at("window").at(1).get<int>();
        }
        for (const auto& a : c.value("aux", json::array())) {
            InstanceRecipe ir;
            ir.triple = a.at("triple").get<std::string>();
            ir.lo = a.at("window").at(0).get<int>();
            ir.hi = a.at("window").at(1).get<int>();
            r.aux.push_back(ir);
        }
        for (const auto& s : c.value("squares", json::array())) {
            SquareRecipe sr;
            sr.kind = s.at("kind").get<std::string>();
            if (sr.kind == "oplink") {
                sr.a = s.at("a").get<int>();
                sr.b = s.at("b").get<int>();
                sr.op = s.at("op").get<std::string>();
            } else {
                sr.label = s.value("label", std::string());
                auto corner = [&](const char* key, SquareRecipe::Corner& c2) {
                    c2.instance = s.at(key).at("instance").get<int>();
                    c2.map = s.at(key).at("map").get<std::string>();
                    c2.stem = s.at(key).at("stem").get<int>();
                };
                corner("top", sr.top);
                corner("left", sr.left);
                corner("bottom", sr.bottom);
                corner("right", sr.right);
            }
            r.squares.push_back(sr);
        }
        if (c.contains("pullback") && !c["pullback"].is_null()) {
            r.has_pullback = true;
            r.pullback.triple = c["pullback"].at("triple").get<std::string>();
            r.pullback.lo = c["pullback"].at("window").at(0).get<int>();
            r.pullback.hi = c["pullback"].at("window").at(1).get<int>();
        }
        out[r.name] = std::move(r);
    }
    return out;
}

std::map<std::string, CandidateRecipe> bundled_recipes()
{
    return load_recipes(bundled_data_dir() + "/recipes.json");
}

std::vector<SphereCandidate> candidate_sphere_elements(const Chart& chart_S, const AxiomSet& axioms)
{
    std::vector<SphereCandidate> out;
    for (const auto& n : axioms.hurewicz_nonimage) {
        SphereCandidate c;
        c.display = n.display;
        c.stem = n.stem;
        c.element = chart_S.scalar_mul(n.coeff, chart_S.generator(n.gen));
        c.in_hurewicz_image = false;  // listed as outside the Hurewicz image
        c.eta_divisible = chart_S.is_divisible("eta", c.element);
        c.provenance = n.provenance;
        if (c.retained())
            out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const SphereCandidate& a, const SphereCandidate& b) {
        return a.stem != b.stem ? a.stem < b.stem : a.display < b.display;
    });
    return out;
}

std::set<int> candidate_dims(const std::vector<SphereCandidate>& candidates)
{
    std::set<int> out;
    for (const auto& c : candidates)
        out.insert(c.stem + 1);
    return out;
}

std::vector<Element> simple_v_torsion_candidates(const Chart& chart_Y_restricted, const std::set<int>& dims)
{
    std::vector<Element> out;
    for (int k : dims) {
        for (const auto& e : chart_Y_restricted.kernel_of_operator("v", k))
            out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LiftFact lift_exists_via_A1(const Dataset& ds, const Element& y)
{
    if (!ds.axioms.pham_surjectivity)
        throw Error(ErrorCode::AxiomDisabled, "surjectivity axiom for the A1 Hurewicz map is disabled");
    const Chart& yR = ds.chart("Y").v1_torsion_restriction();
    Element ry = yR.reduce(y);
    LiftFact f;
    f.element = ry.to_string();
    if (ry.is_zero()) {
        f.justification = {"zero lifts to zero"};
        return f;
    }
    if (!yR.act("v", ry).is_zero())
        throw Error(ErrorCode::NotVTorsion, ry.to_string() + " is not simple v-torsion");
    f.justification = {
        "v(" + ry.to_string() + ") = 0 in the Y chart (simple v-torsion)",
        "exactness of the A1 sequence puts " + ry.to_string() + " in the image of p from the A1 groups",
        "surjectivity axiom (" + ds.axioms.pham_provenance + ") lifts the A1 class to homotopy",
        "commutativity of the comparison square carries the lift to " + ry.to_string(),
    };
    return f;
}

ChaseSystem build_candidate_system(const Dataset& ds, const CandidateRecipe& recipe)
{
    ChaseSystem sys(ds);
    if (recipe.has_project)
        sys.add_instance(recipe.project.triple, recipe.project.lo, recipe.project.hi);
    for (const auto& a : recipe.aux)
        sys.add_instance(a.triple, a.lo, a.hi);
    for (const auto& s : recipe.squares) {
        SquareConstraint sq;
        if (s.kind == "oplink") {
            sq.kind = SquareConstraint::Kind::OperatorLink;
            sq.inst_a = s.a;
            sq.inst_b = s.b;
            sq.op = s.op;
        } else {
            sq.kind = SquareConstraint::Kind::Composite;
            sq.label = s.label;
            auto to_slot = [&](const SquareRecipe::Corner& c) {
                MapKind kind = c.map == "i" ? MapKind::I : c.map == "p" ? MapKind::P : MapKind::Theta;
                return MapSlot{c.instance, {kind, c.stem}};
            };
            sq.top = to_slot(s.top);
            sq.left = to_slot(s.left);
            sq.bottom = to_slot(s.bottom);
            sq.right = to_slot(s.right);
        }
        sys.add_square(sq);
    }
    return sys;
}

namespace {

bool has_simple_two_torsion(const Chart& chart, int stem)
{
    auto elems = chart.enumerate_stem(stem);
    std::set<Element> doubled;
    for (const auto& e : elems)
        doubled.insert(chart.add(e, e));
    for (const auto& e : elems) {
        if (e.is_zero())
            continue;
        if (chart.add(e, e).is_zero() && !doubled.count(e))
            return true;
    }
    return false;
}

std::string facts_summary(const SolveResult& res, const LESInstance& inst, MapRef ref)
{
    std::ostringstream os;
    for (const auto& f : res.facts)
        if (f.map_name == inst.describe_map(ref))
            os << f.map_name << "(" << f.entry.gen << ") = " << f.value.to_string()
               << (f.caveat ? " [up to filtration renaming]" : "") << "; ";
    return os.str();
}

// Solver facts first; when the fixpoint leaves the entry open, fall back to
// the exact-filling enumeration and accept a value on which all fillings
// agree.
std::optional<Element> forced_entry_value(const ChaseSystem& sys, const SolveResult& res,
                                          const MapSlot& slot, const std::string& gen)
{
    const LESInstance& inst = sys.instance(slot.instance);
    const Fact* f = res.find(inst.describe_map(slot.ref), gen);
    if (f && !f->caveat)
        return f->value;
    std::vector<Filling> fills = enumerate_fillings(sys);
    if (fills.empty())
        throw Error(ErrorCode::InconsistentInstance, "no exact filling for the chase system");
    const Chart& tgt = inst.target_chart(slot.ref);
    Element first = fills.front().entries.at(EntryKey{slot, gen});
    for (const auto& fl : fills)
        if (!tgt.elements_equal(fl.entries.at(EntryKey{slot, gen}), first))
            return std::nullopt;
    return first;
}

}  // namespace

CandidateVerdict chase_candidate(const Dataset& ds, const Element& y,
                                 const std::map<std::string, CandidateRecipe>& recipes)
{
    CandidateVerdict v;
    if (y.terms().size() != 1 || y.terms()[0].coeff != 1)
        throw Error(ErrorCode::InvalidInput, "candidate must be a named generator of the Y chart");
    v.candidate = y.terms()[0].gen;
    v.stem = y.stem();

    LiftFact lift = lift_exists_via_A1(ds, y);
    for (const auto& j : lift.justification)
        v.fact_lines.push_back("lift: " + j);

    // Screen: a nonzero target group without simple 2-torsion cannot receive a
    // usable projection.
    Chart cR = ds.chart("C").v1_torsion_restriction();
    int tstem = v.stem - 1;
    v.projection_stem = tstem;
    if (!cR.group(tstem).empty() && !has_simple_two_torsion(cR, tstem)) {
        v.outcome = VerdictOutcome::RejectNoSimple2TorsionTarget;
        v.projection = "(not computed)";
        v.fact_lines.push_back("target group C@" + std::to_string(tstem) +
                               " is nonzero with no simple 2-torsion");
        for (const auto& s : cR.group(tstem))
            v.note += s.provenance;
        return v;
    }

    auto rit = recipes.find(v.candidate);
    if (rit == recipes.end() || !rit->second.has_project) {
        v.outcome = VerdictOutcome::Inconclusive;
        v.fact_lines.push_back("no chase recipe for this candidate");
        return v;
    }
    const CandidateRecipe& recipe = rit->second;

    ChaseSystem sys = build_candidate_system(ds, recipe);
    Solver solver(sys);
    SolveResult res = solver.solve();
    if (res.inconsistent)
        throw Error(ErrorCode::InconsistentInstance,
                    "chase system for " + v.candidate + " is inconsistent at " + res.conflict_entry);
    v.trace = Solver::serialize_trace(res);

    const LESInstance& proj = sys.instance(0);
    MapRef pref{MapKind::P, v.stem};
    if (!proj.has_map(pref))
        throw Error(ErrorCode::IncompleteData, "projection window does not include p at stem " +
                                                   std::to_string(v.stem));
    std::optional<Element> pv = forced_entry_value(sys, res, MapSlot{0, pref}, v.candidate);
    if (!pv) {
        v.outcome = VerdictOutcome::Inconclusive;
        v.fact_lines.push_back("projection not forced by the chase");
        return v;
    }

    Assertion asrt;
    asrt.kind = Assertion::Kind::MapValueEq;
    asrt.slot = MapSlot{0, pref};
    asrt.x = y;
    asrt.e = *pv;
    asrt.text = "p(" + v.candidate + ") = " + pv->to_string();
    QueryResult qr = query(sys, res, asrt);
    if (qr.verdict != QueryVerdict::Forced || qr.caveat) {
        v.outcome = VerdictOutcome::Inconclusive;
        v.fact_lines.push_back("projection value is " + std::string(query_verdict_name(qr.verdict)));
        return v;
    }
    v.projection = pv->to_string();
    v.fact_lines.push_back("p(" + v.candidate + ") = " + v.projection + " [" + qr.detail + "]");
    v.fact_lines.push_back("chase facts: " + facts_summary(res, proj, pref));

    if (pv->is_zero()) {
        v.outcome = VerdictOutcome::RejectProjectsToZero;
        return v;
    }
    for (const auto& t : pv->terms()) {
        const CyclicSummand* s = cR.find_summand(t.gen);
        if (s && !s->provenance.empty())
            v.note += s->provenance;
    }

    // Pullback: look for a retained sphere element mapping onto the projection.
    if (!recipe.has_pullback) {
        v.outcome = VerdictOutcome::Inconclusive;
        v.fact_lines.push_back("no pullback window in the recipe");
        return v;
    }
    ChaseSystem pb(ds);
    pb.add_instance(recipe.pullback.triple, recipe.pullback.lo, recipe.pullback.hi);
    const LESInstance& pbi = pb.instance(0);
    MapRef iref{MapKind::I, tstem};
    if (!pbi.has_map(iref))
        throw Error(ErrorCode::IncompleteData, "pullback window does not include i at stem " +
                                                   std::to_string(tstem));
    Solver pbs(pb);
    SolveResult pbres = pbs.solve();
    if (pbres.inconsistent)
        throw Error(ErrorCode::InconsistentInstance, "pullback system for " + v.candidate +
                                                         " is inconsistent at " + pbres.conflict_entry);
    v.trace += Solver::serialize_trace(pbres);

    std::vector<SphereCandidate> sphere = candidate_sphere_elements(ds.chart("S"), ds.axioms);
    const Chart& sR = pbi.x_chart();
    Element target = *pv;
    for (const auto& sc : sphere) {
        if (sc.stem != tstem)
            continue;
        bool in_restricted = true;
        for (const auto& t : sc.element.terms())
            if (!sR.find_summand(t.gen))
                in_restricted = false;
        if (!in_restricted)
            continue;

        Assertion pa;
        pa.kind = Assertion::Kind::MapValueEq;
        pa.slot = MapSlot{0, iref};
        pa.x = sR.reduce(sc.element);
        pa.e = target;
        pa.text = "i(" + sc.display + ") = " + target.to_string();
        QueryResult pq = query(pb, pbres, pa);
        if (pq.verdict == QueryVerdict::Forced) {
            v.outcome = VerdictOutcome::Family;
            v.witness = sc.display;
            v.family_base_dim = v.stem - 3;
            v.fact_lines.push_back("i(" + sc.display + ") = " + target.to_string() + " [" + pq.detail + "]");
            v.fact_lines.push_back("witness " + sc.display + ": not eta-divisible; outside the Hurewicz image (" +
                                   sc.provenance + ")");
            return v;
        }
    }

    // No witness: is the projection provably outside the image of i?
    std::vector<Filling> fills = enumerate_fillings(pb);
    bool ever_hit = false;
    for (const auto& f : fills) {
        for (const auto& x : sR.enumerate_stem(tstem)) {
            if (pbi.c_chart().elements_equal(f.apply(pb, MapSlot{0, iref}, x), target)) {
                ever_hit = true;
                break;
            }
        }
        if (ever_hit)
            break;
    }
    if (!ever_hit) {
        v.outcome = VerdictOutcome::RejectNotInSphereImage;
        v.fact_lines.push_back(target.to_string() + " is outside the image of i from the sphere chart in every exact filling");
        return v;
    }
    v.outcome = VerdictOutcome::Inconclusive;
    v.fact_lines.push_back("image membership of " + target.to_string() + " is contingent");
    return v;
}

FamilyReport run_pipeline(const Dataset& ds, int k_max)
{
    FamilyReport rep;
    rep.dataset_source = ds.source;
    rep.k_max = k_max;

    std::vector<SphereCandidate> sphere = candidate_sphere_elements(ds.chart("S"), ds.axioms);
    std::set<int> dims = candidate_dims(sphere);
    Chart yR = ds.chart("Y").v1_torsion_restriction();
    std::vector<Element> simple = simple_v_torsion_candidates(yR, dims);

    std::map<std::string, CandidateRecipe> recipes;
    if (!simple.empty()) {
        std::string dir = ds.source == "bundled" ? bundled_data_dir() : ds.source;
        recipes = load_recipes(dir + "/recipes.json");
    }

    for (const auto& y : simple) {
        CandidateVerdict v = chase_candidate(ds, y, recipes);
        rep.verdicts.push_back(std::move(v));
    }
    std::sort(rep.verdicts.begin(), rep.verdicts.end(),
              [](const CandidateVerdict& a, const CandidateVerdict& b) { return a.stem < b.stem; });

    for (const auto& v : rep.verdicts)
        if (v.outcome == VerdictOutcome::Family)
            rep.base_dims.push_back(v.family_base_dim);
    std::sort(rep.base_dims.begin(), rep.base_dims.end());
    for (int b : rep.base_dims) {
        rep.family_dims[b] = family_members(b, k_max);
        rep.congruence_classes.push_back(((b % 192) + 192) % 192);
    }
    std::sort(rep.congruence_classes.begin(), rep.congruence_classes.end());
    rep.congruence_classes.erase(std::unique(rep.congruence_classes.begin(), rep.congruence_classes.end()),
                                 rep.congruence_classes.end());
    return rep;
}

std::vector<int> family_members(int base, int k_max)
{
    if (base < 0 || k_max < 0)
        throw Error(ErrorCode::InvalidInput, "family_members needs base >= 0 and k_max >= 0");
    std::vector<int> out;
    for (int k = 0; k <= k_max; ++k)
        out.push_back(base + 192 * k);
    return out;
}

int congruence_class_union(const std::vector<int>& prior, const std::vector<int>& fresh)
{
    std::set<int> all;
    for (int r : prior) {
        if (r < 0 || r >= 192)
            throw Error(ErrorCode::InvalidInput, "residue " + std::to_string(r) + " outside [0, 192)");
        all.insert(r);
    }
    for (int r : fresh) {
        if (r < 0 || r >= 192)
            throw Error(ErrorCode::InvalidInput, "residue " + std::to_string(r) + " outside [0, 192)");
        all.insert(r);
    }
    return static_cast<int>(all.size());
}

}  // namespace tmfchase
