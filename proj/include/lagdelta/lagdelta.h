#ifndef LAGDELTA_LAGDELTA_H
#define LAGDELTA_LAGDELTA_H

#if defined(_WIN32)
#if defined(LAGDELTA_BUILDING)
#define LAGDELTA_API __declspec(dllexport)
#else
#define LAGDELTA_API __declspec(dllimport)
#endif
#else
#define LAGDELTA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ld_status {
  LD_OK = 0,
  LD_INVALID_ARGUMENT = 1,
  LD_DOMAIN_ERROR = 2,
  LD_NOT_LAGRANGIAN = 3,
  LD_PLUGIN_REJECTED = 4,
  LD_PARSE_ERROR = 5,
  LD_NONCONVERGENCE = 6,
  LD_INTERNAL = 7
} ld_status;

typedef struct ld_chart ld_chart;

LAGDELTA_API const char* ld_version(void);
LAGDELTA_API const char* ld_status_name(ld_status status);
/* message of the last failing call on this thread; "" after a success */
LAGDELTA_API const char* ld_last_error(void);
/* every char* handed out by the library is released with this */
LAGDELTA_API void ld_string_free(char* s);

/* chart document (schema lagdelta-chart/1) */
LAGDELTA_API ld_status ld_chart_from_json(const char* json, ld_chart** out);
/* options_json may be NULL or {"params": {...}, "flags": {...}, "plugin": "..."} */
LAGDELTA_API ld_status ld_chart_from_family(const char* family, const char* options_json, ld_chart** out);
LAGDELTA_API void ld_chart_free(ld_chart* chart);
LAGDELTA_API ld_status ld_chart_to_json(const ld_chart* chart, char** out);
/* curvature_sign: 0 for C^n, 1 for the sphere lift, -1 for the anti-de Sitter lift */
LAGDELTA_API ld_status ld_chart_info(const ld_chart* chart, int* dimension, int* model_dim, int* curvature_sign);
LAGDELTA_API ld_status ld_chart_domain(const ld_chart* chart, double* lower, double* upper, int capacity);
/* writes model_dim complex components as interleaved (re, im) pairs */
LAGDELTA_API ld_status ld_chart_evaluate(const ld_chart* chart, const double* u, int m, double* out, int capacity);

/* options_json keys: grid, tol, seed, restarts, oracle, threads, intrinsic and the *_tol overrides */
LAGDELTA_API ld_status ld_verify(const ld_chart* chart, const char* options_json, char** report_json, int* passed);

/* tuple (n_1, ..., n_k); options_json keys: seed, restarts, max_restarts, oracle, oracle_seed, threads */
LAGDELTA_API ld_status ld_delta_tensor(const char* tensor_json, const int* parts, int k, const char* options_json,
                                       char** result_json);
LAGDELTA_API ld_status ld_delta_chart(const ld_chart* chart, const double* u, int m, const int* parts, int k,
                                      const char* options_json, char** result_json);

/* exact coefficients: out = {H^2 numerator, H^2 denominator, c numerator, c denominator} */
LAGDELTA_API ld_status ld_rhs_coefficients(int n, const int* parts, int k, int improved, long long out[4]);

LAGDELTA_API ld_status ld_scan_parameter(const char* chart_json, const char* param, const char* values,
                                         const char* point, const char* options_json, char** csv);
/* family: "C5", "CP5" or "CH5" */
LAGDELTA_API ld_status ld_scan_trajectory(const char* family, double mu0, double nu0, double t_end, double step,
                                          int every, char** csv);

/* registered families with parameter defaults and ranges, as JSON */
LAGDELTA_API ld_status ld_families(char** json);

#ifdef __cplusplus
}
#endif

#endif
