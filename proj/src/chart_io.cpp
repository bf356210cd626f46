#include "tmfchase/chart_io.hpp"

#include "tmfchase/config.hpp"
#include "tmfchase/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace tmfchase {

namespace {

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

Element parse_terms(const std::string& spectrum, int stem, const json& terms, const std::string& where)
{
    Element e(spectrum, stem);
    if (!terms.is_array())
        throw Error(ErrorCode::ParseError, where + ": target must be an array of [gen, coeff] pairs");
    for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_string() || !t[1].is_number_integer())
            throw Error(ErrorCode::ParseError, where + ": bad term entry");
        e.set_coeff(t[0].get<std::string>(), e.coeff_of(t[0].get<std::string>()) + t[1].get<Coeff>());
    }
    return e;
}

}  // namespace

Chart load_chart_from_json_text(const std::string& text, const std::string& origin)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, origin + ": " + e.what());
    }

    auto need = [&](const char* key) -> const json& {
        if (!doc.contains(key))
            throw Error(ErrorCode::ParseError, origin + ": missing field '" + std::string(key) + "'");
        return doc[key];
    };

    if (need("schema_version").get<std::string>() != "1")
        throw Error(ErrorCode::SchemaViolation, origin + ": unsupported schema_version");

    std::string spectrum = need("spectrum").get<std::string>();
    FiltrationScheme scheme = scheme_from_name(doc.value("scheme", std::string("none")));
    const json& range = need("range");
    Chart chart(spectrum, scheme, range.at(0).get<int>(), range.at(1).get<int>());

    for (const auto& op : doc.value("operators", json::array())) {
        Operator o;
        o.name = op.at("name").get<std::string>();
        if (op.contains("stem_shift"))
            o.stem_shift = op["stem_shift"].get<int>();
        else if (auto s = builtin_operator_shift(o.name))
            o.stem_shift = *s;
        else
            throw Error(ErrorCode::SchemaViolation, origin + ": operator " + o.name + " needs stem_shift");
        if (auto s = builtin_operator_shift(o.name); s && *s != o.stem_shift)
            throw Error(ErrorCode::SchemaViolation, origin + ": operator " + o.name + " has fixed stem shift " +
                                                        std::to_string(*s));
        if (op.contains("filtration_shift"))
            o.filtration_shift = op["filtration_shift"].get<int>();
        chart.declare_operator(std::move(o));
    }

    for (const auto& stem : doc.value("complete_stems", json::array()))
        chart.mark_complete(stem.get<int>());

    for (const auto& s : need("summands")) {
        CyclicSummand cs;
        int stem = s.at("stem").get<int>();
        cs.name = s.at("name").get<std::string>();
        const json& order = s.at("order");
        if (order.is_string() && order.get<std::string>() == "infinite")
            cs.order = SummandOrder::infinite();
        else if (order.is_number_unsigned() || order.is_number_integer())
            cs.order = SummandOrder::finite(order.get<std::uint64_t>());
        else
            throw Error(ErrorCode::ParseError, origin + ": bad order for " + cs.name);
        if (s.contains("filtration") && !s["filtration"].is_null())
            cs.filtration = s["filtration"].get<int>();
        for (const auto& f : s.value("flags", json::array()))
            cs.flags.insert(f.get<std::string>());
        cs.provenance = s.value("provenance", std::string());
        for (const auto& a : s.value("aliases", json::array()))
            cs.aliases.push_back(a.get<std::string>());
        chart.add_summand(stem, std::move(cs));
    }

    for (const auto& a : doc.value("actions", json::array())) {
        std::string op = a.at("op").get<std::string>();
        std::string src = a.at("source").get<std::string>();
        const CyclicSummand* s = chart.find_summand(src);
        if (!s)
            throw Error(ErrorCode::SchemaViolation, origin + ": action source " + src + " is not a declared summand");
        const Operator* o = chart.find_operator(op);
        if (!o)
            throw Error(ErrorCode::SchemaViolation, origin + ": action uses undeclared operator " + op);
        int target_stem = chart.stem_of(src) + o->stem_shift;
        Element target = parse_terms(spectrum, target_stem, a.at("target"),
                                     origin + ": " + op + "(" + src + ")");
        for (const auto& t : target.terms())
            if (!chart.find_summand(t.gen))
                throw Error(ErrorCode::SchemaViolation,
                            origin + ": action target term " + t.gen + " is not a declared summand");
        chart.set_action(op, src, std::move(target));
    }

    std::vector<std::vector<std::string>> relations;
    for (const auto& w : doc.value("relations", json::array())) {
        std::vector<std::string> word;
        for (const auto& op : w)
            word.push_back(op.get<std::string>());
        relations.push_back(std::move(word));
    }
    chart.set_relations(std::move(relations));

    if (doc.contains("periodic_extension") && !doc["periodic_extension"].is_null()) {
        const json& p = doc["periodic_extension"];
        PeriodicExtension pe;
        pe.op = p.at("operator").get<std::string>();
        for (const auto& f : p.value("faithful_on_flags", json::array()))
            pe.faithful_flags.push_back(f.get<std::string>());
        pe.provenance = p.value("provenance", std::string());
        chart.set_periodic_extension(std::move(pe));
    }

    const json blocks = doc.value("provenance_blocks", json::object());
    for (const auto& [stem, prov] : blocks.items())
        chart.set_block_provenance(std::stoi(stem), prov.get<std::string>());

    return chart;
}

Chart load_chart(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_chart_from_json_text(ss.str(), path);
}

std::string emit_chart(const Chart& chart)
{
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["spectrum"] = chart.spectrum();
    doc["scheme"] = scheme_name(chart.scheme());
    doc["range"] = {chart.range_lo(), chart.range_hi()};

    ordered_json ops = ordered_json::array();
    for (const auto& o : chart.operators()) {
        ordered_json j;
        j["name"] = o.name;
        j["stem_shift"] = o.stem_shift;
        if (o.filtration_shift)
            j["filtration_shift"] = *o.filtration_shift;
        ops.push_back(j);
    }
    doc["operators"] = ops;

    ordered_json stems = ordered_json::array();
    for (int s : chart.complete_stems())
        stems.push_back(s);
    doc["complete_stems"] = stems;

    ordered_json summands = ordered_json::array();
    for (int stem : chart.complete_stems()) {
        for (const auto& s : chart.group(stem)) {
            ordered_json j;
            j["stem"] = stem;
            j["name"] = s.name;
            if (s.order.is_infinite())
                j["order"] = "infinite";
            else
                j["order"] = s.order.value();
            if (s.filtration)
                j["filtration"] = *s.filtration;
            ordered_json flags = ordered_json::array();
            for (const auto& f : s.flags)
                flags.push_back(f);
            j["flags"] = flags;
            j["provenance"] = s.provenance;
            if (!s.aliases.empty()) {
                ordered_json al = ordered_json::array();
                for (const auto& a : s.aliases)
                    al.push_back(a);
                j["aliases"] = al;
            }
            summands.push_back(j);
        }
    }
    doc["summands"] = summands;

    ordered_json actions = ordered_json::array();
    for (int stem : chart.complete_stems()) {
        for (const auto& s : chart.group(stem)) {
            for (const auto& o : chart.operators()) {
                if (!chart.has_action(o.name, s.name) || o.name == "two")
                    continue;
                Element t = chart.act(o.name, chart.generator(s.name));
                ordered_json j;
                j["op"] = o.name;
                j["source"] = s.name;
                ordered_json terms = ordered_json::array();
                for (const auto& term : t.terms())
                    terms.push_back(ordered_json::array({term.gen, term.coeff}));
                j["target"] = terms;
                actions.push_back(j);
            }
        }
    }
    doc["actions"] = actions;

    ordered_json rels = ordered_json::array();
    for (const auto& w : chart.relations()) {
        ordered_json word = ordered_json::array();
        for (const auto& op : w)
            word.push_back(op);
        rels.push_back(word);
    }
    doc["relations"] = rels;

    if (chart.periodic_extension()) {
        const auto& p = *chart.periodic_extension();
        ordered_json j;
        j["operator"] = p.op;
        ordered_json fl = ordered_json::array();
        for (const auto& f : p.faithful_flags)
            fl.push_back(f);
        j["faithful_on_flags"] = fl;
        j["provenance"] = p.provenance;
        doc["periodic_extension"] = j;
    }

    if (!chart.block_provenance().empty()) {
        ordered_json pb = ordered_json::object();
        for (const auto& [stem, prov] : chart.block_provenance())
            pb[std::to_string(stem)] = prov;
        doc["provenance_blocks"] = pb;
    }

    return doc.dump(2) + "\n";
}

bool AxiomSet::is_nonimage(const Element& e) const
{
    for (const auto& n : hurewicz_nonimage) {
        if (e.spectrum() != "S" || e.stem() != n.stem)
            continue;
        if (e.terms().size() == 1 && e.terms()[0].gen == n.gen && e.terms()[0].coeff == n.coeff)
            return true;
    }
    return false;
}

AxiomSet load_axioms(const std::string& path)
{
    json doc = read_json_file(path);
    AxiomSet ax;
    ax.pham_surjectivity = doc.at("pham_surjectivity").at("value").get<bool>();
    ax.pham_provenance = doc.at("pham_surjectivity").value("provenance", std::string());
    ax.delta8_faithful = doc.at("delta8_faithful").at("value").get<bool>();
    ax.delta8_provenance = doc.at("delta8_faithful").value("provenance", std::string());
    for (const auto& n : doc.at("hurewicz_nonimage")) {
        NonImageEntry e;
        e.display = n.at("display").get<std::string>();
        e.gen = n.at("gen").get<std::string>();
        e.coeff = n.value("coeff", 1);
        e.stem = n.at("stem").get<int>();
        e.provenance = n.value("provenance", std::string());
        ax.hurewicz_nonimage.push_back(std::move(e));
    }
    return ax;
}

std::string render_violations(const std::vector<Violation>& vs)
{
    if (vs.empty())
        return "ok: 0 violations\n";
    std::ostringstream os;
    for (const auto& v : vs)
        os << v.code << " at " << v.location << ": " << v.message << "\n";
    os << vs.size() << " violation(s)\n";
    return os.str();
}

std::vector<Violation> validate_chart(const Chart& chart)
{
    std::vector<Violation> out;
    const std::string spec = chart.spectrum();

    // Range closure and flag discipline of every action entry.
    for (int stem : chart.complete_stems()) {
        for (const auto& s : chart.group(stem)) {
            for (const auto& o : chart.operators()) {
                if (o.name == "two")
                    continue;
                int target = stem + o.stem_shift;
                bool target_known = chart.is_complete(target);
                if (chart.has_action(o.name, s.name)) {
                    Element t = chart.act(o.name, chart.generator(s.name));
                    if (!t.is_zero() && !chart.in_range(t.stem()))
                        out.push_back({"RangeViolation", spec + ": " + o.name + "(" + s.name + ")",
                                       "action target outside chart range"});
                    if (!t.is_zero() && !target_known)
                        out.push_back({"RangeViolation", spec + ": " + o.name + "(" + s.name + ")",
                                       "nonzero action lands in a stem not transcribed"});
                    if (s.has_flag(kFlagV1Torsion)) {
                        for (const auto& term : t.terms()) {
                            const CyclicSummand* ts = chart.find_summand(term.gen);
                            if (ts && !ts->has_flag(kFlagV1Torsion))
                                out.push_back({"FlagViolation", spec + ": " + o.name + "(" + s.name + ")",
                                               "V1_TORSION class maps onto unflagged " + term.gen});
                        }
                    }
                } else if (target_known && chart.in_range(target)) {
                    out.push_back({"TotalityViolation", spec + ": " + o.name + "(" + s.name + ")",
                                   "missing action entry into transcribed stem " + std::to_string(target)});
                }
            }
            if (s.has_flag(kFlagV1Torsion) && s.order.is_infinite())
                out.push_back({"FlagViolation", spec + "@" + std::to_string(stem),
                               s.name + " flagged V1_TORSION with infinite order"});
        }
    }

    // Filtration scheme uniformity: a chart carries one scheme; summands with
    // filtration must belong to it.
    if (chart.scheme() == FiltrationScheme::None) {
        for (int stem : chart.complete_stems())
            for (const auto& s : chart.group(stem))
                if (s.filtration)
                    out.push_back({"SchemeViolation", spec + "@" + std::to_string(stem),
                                   s.name + " carries filtration but the chart declares scheme none"});
    }

    for (const auto& msg : chart.check_relations())
        out.push_back({"RelationViolation", spec, msg});

    return out;
}

std::vector<Violation> validate_dataset(const Dataset& ds)
{
    std::vector<Violation> out;
    for (const auto& [name, chart] : ds.charts) {
        auto vs = validate_chart(chart);
        out.insert(out.end(), vs.begin(), vs.end());
    }
    auto it = ds.charts.find("S");
    if (it != ds.charts.end()) {
        for (const auto& n : ds.axioms.hurewicz_nonimage) {
            const CyclicSummand* s = it->second.find_summand(n.gen);
            if (!s)
                out.push_back({"SchemaViolation", "axioms: " + n.display,
                               "non-image entry references undeclared S generator " + n.gen});
            else if (it->second.stem_of(n.gen) != n.stem)
                out.push_back({"SchemaViolation", "axioms: " + n.display, "stem mismatch with S chart"});
        }
    }
    return out;
}

const Chart& Dataset::chart(const std::string& spectrum) const
{
    auto it = charts.find(spectrum);
    if (it == charts.end())
        throw Error(ErrorCode::NotFound, "dataset has no chart for spectrum " + spectrum);
    return it->second;
}

std::string bundled_data_dir()
{
    if (const char* env = std::getenv("TMFCHASE_DATA"))
        return env;
    return TMFCHASE_BUNDLED_DATA_DIR;
}

Dataset load_dataset(const std::string& path_or_bundled)
{
    std::string dir = path_or_bundled == "bundled" ? bundled_data_dir() : path_or_bundled;
    Dataset ds;
    ds.source = path_or_bundled;
    ds.charts.emplace("S", load_chart(dir + "/tmf_S.json"));
    ds.charts.emplace("C", load_chart(dir + "/tmf_C.json"));
    ds.charts.emplace("Y", load_chart(dir + "/tmf_Y.json"));
    ds.charts.emplace("V0", load_chart(dir + "/tmf_V0.json"));
    ds.axioms = load_axioms(dir + "/axioms.json");
    return ds;
}

Chart bundled_dataset(const std::string& name)
{
    std::string spectrum;
    if (name == "tmf_S")
        spectrum = "S";
    else if (name == "tmf_C")
        spectrum = "C";
    else if (name == "tmf_Y")
        spectrum = "Y";
    else if (name == "tmf_V0")
        spectrum = "V0";
    else
        throw Error(ErrorCode::NotFound, "unknown bundled dataset " + name);
    return load_chart(bundled_data_dir() + "/" + name + ".json");
}

}  // namespace tmfchase
