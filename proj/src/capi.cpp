#include "tmfchase.h"

#include "tmfchase/chart_io.hpp"
#include "tmfchase/error.hpp"
#include "tmfchase/oracle.hpp"
#include "tmfchase/pipeline.hpp"
#include "tmfchase/query.hpp"
#include "tmfchase/solver.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

using namespace tmfchase;

struct tmfc_dataset {
    Dataset ds;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tmfc_status status_of(const Error& e)
{
    switch (e.code()) {
        case ErrorCode::ParseError:
        case ErrorCode::SchemaViolation:
        case ErrorCode::DuplicateGenerator: return TMFC_E_PARSE;
        case ErrorCode::TooLarge: return TMFC_E_BOUND;
        case ErrorCode::IncompleteData: return TMFC_E_INCOMPLETE;
        case ErrorCode::InconsistentInstance:
        case ErrorCode::InconsistentFlags: return TMFC_E_INCONSISTENT;
        case ErrorCode::IoError: return TMFC_E_IO;
        case ErrorCode::OutOfRange:
        case ErrorCode::NotFound:
        case ErrorCode::InvalidOperand:
        case ErrorCode::InvalidInput:
        case ErrorCode::MissingActionData:
        case ErrorCode::NotVTorsion:
        case ErrorCode::AxiomDisabled: return TMFC_E_INVALID;
        case ErrorCode::Inconclusive: return TMFC_E_CONTINGENT;
        default: return TMFC_E_INTERNAL;
    }
}

template <typename F>
tmfc_status guarded(F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TMFC_E_INTERNAL;
    }
}

std::string render_group_line(const Chart& chart, int stem)
{
    const auto& g = chart.group(stem);
    if (g.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& s : g) {
        if (!first)
            os << " + ";
        first = false;
        if (s.order.is_infinite())
            os << "Z{" << s.name << "}";
        else
            os << "Z/" << s.order.value() << "{" << s.name << "}";
    }
    return os.str();
}

}  // namespace

extern "C" {

tmfc_status tmfc_dataset_open(const char* path_or_bundled, tmfc_dataset** out)
{
    if (!path_or_bundled || !out) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        auto* h = new tmfc_dataset{load_dataset(path_or_bundled)};
        *out = h;
        return TMFC_OK;
    });
}

void tmfc_dataset_close(tmfc_dataset* ds)
{
    delete ds;
}

tmfc_status tmfc_validate(tmfc_dataset* ds, char** report)
{
    if (!ds || !report) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        auto violations = validate_dataset(ds->ds);
        *report = dup_string(render_violations(violations));
        return violations.empty() ? TMFC_OK : TMFC_E_VIOLATIONS;
    });
}

tmfc_status tmfc_group_render(tmfc_dataset* ds, const char* spectrum, int stem, int v1_torsion_only,
                              char** out)
{
    if (!ds || !spectrum || !out) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        const Chart& base = ds->ds.chart(spectrum);
        Chart restricted;
        const Chart* chart = &base;
        if (v1_torsion_only) {
            restricted = base.v1_torsion_restriction();
            chart = &restricted;
        }
        if (!chart->in_range(stem))
            throw Error(ErrorCode::OutOfRange, "stem outside chart range");
        if (!chart->is_complete(stem))
            throw Error(ErrorCode::IncompleteData, "stem not transcribed");
        *out = dup_string(render_group_line(*chart, stem));
        return TMFC_OK;
    });
}

tmfc_status tmfc_chase(tmfc_dataset* ds, const char* triple, int window_lo, int window_hi,
                       const char* recipe, const char* query_text, char** out)
{
    if (!ds || !triple || !out) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        ChaseSystem sys(ds->ds);
        if (recipe && *recipe) {
            std::string dir = ds->ds.source == "bundled" ? bundled_data_dir() : ds->ds.source;
            auto recipes = load_recipes(dir + "/recipes.json");
            auto it = recipes.find(recipe);
            if (it == recipes.end())
                throw Error(ErrorCode::NotFound, std::string("unknown recipe ") + recipe);
            sys = build_candidate_system(ds->ds, it->second);
        } else {
            sys.add_instance(triple, window_lo, window_hi);
        }

        Solver solver(sys);
        SolveResult res = solver.solve();
        std::ostringstream os;
        if (res.inconsistent) {
            os << "inconsistent instance; minimal conflicting inputs:\n";
            for (const auto& line : res.conflict_core)
                os << "  " << line << "\n";
            *out = dup_string(os.str());
            return TMFC_E_INCONSISTENT;
        }
        os << Solver::serialize_trace(res);
        if (query_text && *query_text) {
            Assertion a = parse_assertion(sys, query_text);
            QueryResult qr = query(sys, res, a);
            os << "query " << a.text << " -> " << query_verdict_name(qr.verdict)
               << (qr.caveat ? " (up to filtration renaming)" : "") << " [" << qr.detail << "]\n";
            *out = dup_string(os.str());
            if (qr.verdict == QueryVerdict::Contingent)
                return TMFC_E_CONTINGENT;
            if (qr.verdict == QueryVerdict::Impossible)
                return TMFC_E_IMPOSSIBLE;
            return TMFC_OK;
        }
        *out = dup_string(os.str());
        return TMFC_OK;
    });
}

tmfc_status tmfc_pipeline(tmfc_dataset* ds, int k_max, const char* format, char** out)
{
    if (!ds || !out) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        FamilyReport rep = run_pipeline(ds->ds, k_max);
        std::string fmt = format ? format : "text";
        if (fmt == "tsv")
            *out = dup_string(render_report_tsv(rep));
        else
            *out = dup_string(render_report_text(rep));
        for (const auto& v : rep.verdicts)
            if (v.outcome == VerdictOutcome::Inconclusive)
                return TMFC_E_CONTINGENT;
        return TMFC_OK;
    });
}

tmfc_status tmfc_oracle_selftest(int count, uint64_t seed, uint64_t bound, char** report)
{
    if (count < 1 || !report) {
        g_last_error = "count must be >= 1";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        SoundnessReport rep = run_soundness_suite(count, seed, bound);
        std::ostringstream os;
        os << "instances: " << rep.instances << "\n"
           << "solver-inconsistent: " << rep.inconsistent_instances << "\n"
           << "unsatisfiable: " << rep.unsatisfiable_instances << "\n"
           << "facts checked: " << rep.facts_checked << "\n"
           << "fillings seen: " << rep.fillings_seen << "\n"
           << "violations: " << rep.violations.size() << "\n";
        for (const auto& v : rep.violations)
            os << "  " << v << "\n";
        *report = dup_string(os.str());
        return rep.violations.empty() ? TMFC_OK : TMFC_E_VIOLATIONS;
    });
}

tmfc_status tmfc_family_members(int base, int k_max, int** dims, size_t* count)
{
    if (!dims || !count) {
        g_last_error = "null argument";
        return TMFC_E_INVALID;
    }
    return guarded([&]() {
        auto v = family_members(base, k_max);
        int* out = static_cast<int*>(std::malloc(sizeof(int) * v.size()));
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = v[i];
        *dims = out;
        *count = v.size();
        return TMFC_OK;
    });
}

int tmfc_congruence_union(const int* prior, size_t prior_count, const int* fresh, size_t fresh_count)
{
    try {
        std::vector<int> a(prior, prior + prior_count);
        std::vector<int> b(fresh, fresh + fresh_count);
        return congruence_class_union(a, b);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return -1;
    }
}

const char* tmfc_last_error(void)
{
    return g_last_error.c_str();
}

void tmfc_string_free(char* s)
{
    std::free(s);
}

void tmfc_ints_free(int* p)
{
    std::free(p);
}

}  // extern "C"
