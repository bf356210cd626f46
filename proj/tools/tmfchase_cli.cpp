// Command line front end for the tmf chart chase engine. Talks to the engine
// exclusively through the C API in tmfchase.h.

#include <tmfchase.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

struct Freed {
    char* p = nullptr;
    ~Freed() { tmfc_string_free(p); }
};

int fail(tmfc_status st, const char* what)
{
    std::cerr << what << ": " << tmfc_last_error() << "\n";
    switch (st) {
        case TMFC_E_PARSE: return 2;
        case TMFC_E_CONTINGENT: return 3;
        case TMFC_E_IMPOSSIBLE: return 4;
        case TMFC_E_BOUND: return 5;
        default: return 1;
    }
}

// Writes to a temporary file in the target directory, then renames, so a
// failed run never leaves a partial output file.
bool write_file_atomic(const std::string& path, const std::string& content)
{
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            return false;
        out << content;
        if (!out)
            return false;
    }
    return std::rename(tmp.c_str(), path.c_str()) == 0;
}

bool parse_window(const std::string& text, int& lo, int& hi)
{
    auto pos = text.find("..");
    if (pos == std::string::npos)
        return false;
    try {
        lo = std::stoi(text.substr(0, pos));
        hi = std::stoi(text.substr(pos + 2));
    } catch (...) {
        return false;
    }
    return true;
}

struct DatasetHandle {
    tmfc_dataset* ds = nullptr;
    ~DatasetHandle() { tmfc_dataset_close(ds); }
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"tmf chart chase: validate chart data, inspect groups, run exact-sequence chases and the family pipeline"};
    app.require_subcommand(1);

    std::string dataset = "bundled";
    app.add_option("--dataset", dataset, "dataset directory or 'bundled'")->capture_default_str();

    // validate
    auto* cmd_validate = app.add_subcommand("validate", "validate chart documents");
    std::vector<std::string> validate_paths;
    std::string validate_out;
    cmd_validate->add_option("paths", validate_paths, "dataset directories (default: --dataset)");
    cmd_validate->add_option("--out", validate_out, "also write the report to a file");

    // group
    auto* cmd_group = app.add_subcommand("group", "render one stem group");
    std::string group_spectrum;
    int group_stem = 0;
    bool group_full = false;
    cmd_group->add_option("spectrum", group_spectrum, "S, C, Y or V0")->required();
    cmd_group->add_option("stem", group_stem, "stem")->required();
    cmd_group->add_flag("--full", group_full, "full group instead of the v1-torsion part");
    bool group_v1 = true;
    cmd_group->add_flag("--v1-torsion,!--no-v1-torsion", group_v1, "restrict to the v1-torsion part (default)");

    // chase
    auto* cmd_chase = app.add_subcommand("chase", "solve a windowed long exact sequence");
    std::string chase_triple, chase_window, chase_recipe, chase_query, chase_out;
    cmd_chase->add_option("triple", chase_triple, "S-eta-C, C-two-Y, Y-v-A1, V0-eta-Y or S-two-V0")->required();
    cmd_chase->add_option("--window", chase_window, "stem window a..b");
    cmd_chase->add_option("--recipe", chase_recipe, "candidate recipe joining auxiliary diagrams and squares");
    cmd_chase->add_option("--query", chase_query, "assertion, e.g. \"p(y_{76,10}) != 0\"");
    cmd_chase->add_option("--out", chase_out, "write the trace to a file");

    // pipeline
    auto* cmd_pipeline = app.add_subcommand("pipeline", "run the full family pipeline");
    int kmax = 5;
    std::string pipeline_out, pipeline_format = "text";
    cmd_pipeline->add_option("--kmax", kmax, "family members per base dimension")->capture_default_str();
    cmd_pipeline->add_option("--out", pipeline_out, "write report files <out>.txt and <out>.tsv");
    cmd_pipeline->add_option("--format", pipeline_format, "stdout format: text or tsv")->capture_default_str();

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "randomized solver-vs-enumeration soundness suite");
    int oracle_count = 100;
    std::uint64_t oracle_seed = 0;
    std::uint64_t oracle_bound = 4096;
    cmd_oracle->add_option("--count", oracle_count, "number of random instances")->capture_default_str();
    cmd_oracle->add_option("--seed", oracle_seed, "seed (required; runs are reproducible)")->required();
    cmd_oracle->add_option("--bound", oracle_bound, "enumeration bound")->capture_default_str();

    // report
    auto* cmd_report = app.add_subcommand("report", "run the pipeline and print the text report");
    cmd_report->add_option("--kmax", kmax, "family members per base dimension");

    CLI11_PARSE(app, argc, argv);

    if (cmd_oracle->parsed()) {
        Freed rep;
        tmfc_status st = tmfc_oracle_selftest(oracle_count, oracle_seed, oracle_bound, &rep.p);
        if (rep.p)
            std::cout << rep.p;
        if (st == TMFC_OK)
            return 0;
        if (st == TMFC_E_VIOLATIONS)
            return 1;
        return fail(st, "oracle");
    }

    if (cmd_validate->parsed()) {
        if (validate_paths.empty())
            validate_paths.push_back(dataset);
        int rc = 0;
        std::string all;
        for (const auto& p : validate_paths) {
            DatasetHandle h;
            tmfc_status st = tmfc_dataset_open(p.c_str(), &h.ds);
            if (st != TMFC_OK)
                return fail(st, "validate");
            Freed rep;
            st = tmfc_validate(h.ds, &rep.p);
            if (rep.p) {
                std::cout << p << ": " << rep.p;
                all += rep.p;
            }
            if (st == TMFC_E_VIOLATIONS)
                rc = 1;
            else if (st != TMFC_OK)
                return fail(st, "validate");
        }
        if (!validate_out.empty() && !write_file_atomic(validate_out, all))
            return 1;
        return rc;
    }

    DatasetHandle h;
    tmfc_status st = tmfc_dataset_open(dataset.c_str(), &h.ds);
    if (st != TMFC_OK)
        return fail(st, "dataset");

    if (cmd_group->parsed()) {
        Freed out;
        st = tmfc_group_render(h.ds, group_spectrum.c_str(), group_stem, group_full ? 0 : (group_v1 ? 1 : 0),
                               &out.p);
        if (st != TMFC_OK)
            return fail(st, "group");
        std::cout << out.p << "\n";
        return 0;
    }

    if (cmd_chase->parsed()) {
        int lo = 0, hi = 0;
        if (chase_recipe.empty()) {
            if (!parse_window(chase_window, lo, hi)) {
                std::cerr << "chase: --window a..b is required without --recipe\n";
                return 2;
            }
        }
        Freed out;
        st = tmfc_chase(h.ds, chase_triple.c_str(), lo, hi,
                        chase_recipe.empty() ? nullptr : chase_recipe.c_str(),
                        chase_query.empty() ? nullptr : chase_query.c_str(), &out.p);
        if (out.p) {
            std::cout << out.p;
            if (!chase_out.empty() && !write_file_atomic(chase_out, out.p))
                return 1;
        }
        if (st == TMFC_OK)
            return 0;
        if (st == TMFC_E_CONTINGENT)
            return 3;
        if (st == TMFC_E_IMPOSSIBLE)
            return 4;
        return fail(st, "chase");
    }

    if (cmd_pipeline->parsed() || cmd_report->parsed()) {
        Freed text;
        st = tmfc_pipeline(h.ds, kmax, "text", &text.p);
        if (st != TMFC_OK && st != TMFC_E_CONTINGENT)
            return fail(st, "pipeline");
        tmfc_status text_status = st;

        if (cmd_report->parsed()) {
            std::cout << text.p;
            return text_status == TMFC_OK ? 0 : 3;
        }

        Freed tsv;
        st = tmfc_pipeline(h.ds, kmax, "tsv", &tsv.p);
        if (st != TMFC_OK && st != TMFC_E_CONTINGENT)
            return fail(st, "pipeline");

        if (pipeline_format == "tsv")
            std::cout << tsv.p;
        else
            std::cout << text.p;
        if (!pipeline_out.empty()) {
            if (!write_file_atomic(pipeline_out + ".txt", text.p) ||
                !write_file_atomic(pipeline_out + ".tsv", tsv.p)) {
                std::cerr << "pipeline: cannot write output files\n";
                return 1;
            }
        }
        return text_status == TMFC_OK ? 0 : 3;
    }

    return 0;
}
