#ifndef TMFCHASE_H
#define TMFCHASE_H

/* C interface to the tmf chart chase engine.
 *
 * All functions return a tmfc_status; rich results come back as malloc'd
 * NUL-terminated strings through out-parameters, which the caller frees with
 * tmfc_string_free. Handles are opaque and freed with their _close function.
 * tmfc_last_error() returns a thread-local description of the last failure.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tmfc_dataset tmfc_dataset;

typedef enum tmfc_status {
    TMFC_OK = 0,
    TMFC_E_VIOLATIONS = 1,   /* validation found violations */
    TMFC_E_PARSE = 2,        /* file or expression failed to parse */
    TMFC_E_CONTINGENT = 3,   /* query result: not determined */
    TMFC_E_IMPOSSIBLE = 4,   /* query result: fails in every exact filling */
    TMFC_E_BOUND = 5,        /* enumeration bound exceeded */
    TMFC_E_INVALID = 6,      /* bad arguments / unknown names */
    TMFC_E_INCOMPLETE = 7,   /* chart data missing for the request */
    TMFC_E_INCONSISTENT = 8, /* no exact filling; conflicting data */
    TMFC_E_IO = 9,           /* filesystem problem */
    TMFC_E_INTERNAL = 10
} tmfc_status;

/* Opens "bundled" or a directory containing the chart documents. */
tmfc_status tmfc_dataset_open(const char* path_or_bundled, tmfc_dataset** out);
void tmfc_dataset_close(tmfc_dataset* ds);

/* Validation report (machine-readable lines + summary). TMFC_OK when clean,
 * TMFC_E_VIOLATIONS when violations were found. */
tmfc_status tmfc_validate(tmfc_dataset* ds, char** report);

/* Renders one stem group, e.g. "Z/2{y_{76,10}}". v1_torsion_only != 0
 * restricts to the v1-torsion part. */
tmfc_status tmfc_group_render(tmfc_dataset* ds, const char* spectrum, int stem, int v1_torsion_only,
                              char** out);

/* Runs a long exact sequence chase. triple is one of S-eta-C, C-two-Y,
 * Y-v-A1, V0-eta-Y, S-two-V0; recipe (optional) names a bundled candidate
 * recipe whose auxiliary instances and squares are joined in; query
 * (optional) is an assertion in the query grammar. Without a query the fact
 * trace is returned; with one, the verdict line is appended and the status
 * encodes FORCED (TMFC_OK), CONTINGENT or IMPOSSIBLE. */
tmfc_status tmfc_chase(tmfc_dataset* ds, const char* triple, int window_lo, int window_hi,
                       const char* recipe, const char* query, char** out);

/* Full family pipeline. format is "text" or "tsv". */
tmfc_status tmfc_pipeline(tmfc_dataset* ds, int k_max, const char* format, char** out);

/* Randomized solver-vs-enumeration soundness suite; TMFC_OK iff no
 * violations. */
tmfc_status tmfc_oracle_selftest(int count, uint64_t seed, uint64_t bound, char** report);

/* dims receives base, base+192, ..., base+192*k_max. */
tmfc_status tmfc_family_members(int base, int k_max, int** dims, size_t* count);

/* Size of the union of two residue lists mod 192; -1 on invalid input. */
int tmfc_congruence_union(const int* prior, size_t prior_count, const int* fresh, size_t fresh_count);

const char* tmfc_last_error(void);
void tmfc_string_free(char* s);
void tmfc_ints_free(int* p);

#ifdef __cplusplus
}
#endif

#endif /* TMFCHASE_H */
