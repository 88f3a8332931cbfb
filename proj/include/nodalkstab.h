#ifndef NODALKSTAB_H
#define NODALKSTAB_H

/*
 * C API for the nodal K-stability library: exact invariants of monomial
 * valuations at the node of the nodal plane cubic.
 *
 * Conventions:
 *  - every function returns an nks_status code; NKS_OK is 0;
 *  - on failure, nks_last_error() returns a thread-local message;
 *  - strings returned through `char**` are heap-allocated and must be
 *    released with nks_string_free();
 *  - reports are opaque handles released with nks_report_free();
 *  - numbers are passed as text: `p/q` for rationals and
 *    `p/q+r/s*sqrt5` / `p/q-r/s*sqrt5` for quadratic values.
 */

#include <stddef.h>

#if defined _WIN32
#define NKS_API __declspec(dllexport)
#else
#define NKS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nks_status {
  NKS_OK = 0,
  NKS_EINVAL = 1,     /* bad argument or unparsable number */
  NKS_EDOMAIN = 2,    /* input outside the mathematical domain */
  NKS_ETRUNC = 3,     /* truncation cap reached without a certificate */
  NKS_EIO = 4,        /* file system failure */
  NKS_EINTERNAL = 5   /* invariant violation inside the library */
} nks_status;

typedef struct nks_report nks_report;

NKS_API const char* nks_version(void);
NKS_API const char* nks_last_error(void);
NKS_API void nks_string_free(char* s);

/* Invariant record for the monomial valuation of weights (a,b): JSON
 * {a,b,t,A,T,epsilon,S,witness:{name,degree,ord,self_int,nef_boundary},
 *  provenance} with normalized (v_t-scale) values. max_curve bounds the
 * witness curve index (pass 0 for the default). */
NKS_API nks_status nks_invariants(long a, long b, int max_curve, char** json_out);

/* Exact S and A at a slope given in number syntax. */
NKS_API nks_status nks_s_exact(const char* t, char** value_out);
NKS_API nks_status nks_a_invariant(const char* t, char** value_out);

/* Finite-generation / Fano verdict as JSON
 * {t,fg,fano,piece,degeneration,reason,provenance}. */
NKS_API nks_status nks_classify(const char* t, char** json_out);

/* d_0..d_n and the breakpoint slopes, JSON. n >= 2. */
NKS_API nks_status nks_dseq(int n, char** json_out);

/* Finite-level invariant table for weights (a,b), levels m_min..m_max:
 * CSV columns a,b,t,m,N_m,S_m,T_m. */
NKS_API nks_status nks_sm_table(long a, long b, int m_min, int m_max,
                                char** csv_out);

/* The singular curve D_n; format "json" or "csv" (coefficient rows
 * e0,e1,e2,coeff). */
NKS_API nks_status nks_curve(int n, const char* format, char** out);

/* Scans. mode is "exact" or "sample"; m is the sample-mode level; pass
 * cache_dir = NULL or "" to disable caching; threads >= 1. */
NKS_API nks_status nks_scan_create(const char* t_min, const char* t_max,
                                   const char* step, const char* mode, int m,
                                   int truncation_cap, const char* cache_dir,
                                   int threads, nks_report** report_out);

NKS_API nks_status nks_delta_create(const char* t_min, const char* t_max,
                                    const char* step, const char* cache_dir,
                                    int threads, nks_report** report_out);

/* format: "csv", "json", or "svg" (svg for scans only). */
NKS_API nks_status nks_report_render(const nks_report* report, const char* format,
                                     char** out);
/* Number of failed rows (0 when everything evaluated). */
NKS_API int nks_report_row_failures(const nks_report* report);
NKS_API void nks_report_free(nks_report* report);

/* Runs the acceptance suite; text_out receives one PASS/FAIL line per
 * criterion, failures_out the number of failures. */
NKS_API nks_status nks_verify_all(char** text_out, int* failures_out);

#ifdef __cplusplus
}
#endif

#endif /* NODALKSTAB_H */
