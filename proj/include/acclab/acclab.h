#ifndef ACCLAB_ACCLAB_H
#define ACCLAB_ACCLAB_H

#include <stddef.h>

#if defined(_WIN32)
#define ACCLAB_API __declspec(dllexport)
#elif defined(__GNUC__)
#define ACCLAB_API __attribute__((visibility("default")))
#else
#define ACCLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum acclab_status {
    ACCLAB_OK = 0,
    ACCLAB_ERR_INVALID_ARGUMENT = 1,
    ACCLAB_ERR_CONFIG = 2,
    ACCLAB_ERR_GEOMETRY = 3,
    ACCLAB_ERR_CALCULUS = 4,
    ACCLAB_ERR_SOLVER = 5,
    ACCLAB_ERR_IO = 6,
    ACCLAB_ERR_INTERNAL = 7
} acclab_status;

typedef struct acclab_context acclab_context;
typedef struct acclab_result acclab_result;

ACCLAB_API const char* acclab_version(void);

/* Message of the last failed call on this thread; empty when none.
   Golden tables are embedded; ACCLAB_DATA_DIR names a directory whose files take precedence. */
ACCLAB_API const char* acclab_last_error(void);

ACCLAB_API acclab_status acclab_context_create(acclab_context** out);
ACCLAB_API void acclab_context_destroy(acclab_context* ctx);

/* Loads an INI experiment config; replaces any previously loaded one. */
ACCLAB_API acclab_status acclab_context_load_config(acclab_context* ctx, const char* path);
ACCLAB_API acclab_status acclab_context_set_jobs(acclab_context* ctx, int jobs);
/* Overrides solver.tolerance of the loaded config. */
ACCLAB_API acclab_status acclab_context_set_tolerance(acclab_context* ctx, double tolerance);

ACCLAB_API acclab_status acclab_faces(acclab_context* ctx, const char* space_kind, acclab_result** out);
ACCLAB_API acclab_status acclab_lift(acclab_context* ctx, const char* map, const char* monomial, acclab_result** out);
/* Operands are CalculusOrders JSON documents. */
ACCLAB_API acclab_status acclab_compose(acclab_context* ctx, const char* calculus, const char* a_json,
                                        const char* b_json, acclab_result** out);
ACCLAB_API acclab_status acclab_spectrum(acclab_context* ctx, acclab_result** out);
ACCLAB_API acclab_status acclab_flow(acclab_context* ctx, acclab_result** out);
/* regime may be NULL to use the config's probe regime. */
ACCLAB_API acclab_status acclab_heat(acclab_context* ctx, const char* regime, acclab_result** out);
ACCLAB_API acclab_status acclab_verify_tables(acclab_context* ctx, acclab_result** out);

/* Exit code the command asks for: 0 on a clean verdict, 1 on a table mismatch or failed verdict. */
ACCLAB_API int acclab_result_exit_code(const acclab_result* r);
ACCLAB_API const char* acclab_result_text(const acclab_result* r);
ACCLAB_API const char* acclab_result_json(const acclab_result* r);
ACCLAB_API size_t acclab_result_artifact_count(const acclab_result* r);
ACCLAB_API const char* acclab_result_artifact_name(const acclab_result* r, size_t i);
ACCLAB_API const char* acclab_result_artifact_data(const acclab_result* r, size_t i, size_t* size);
/* Writes every artifact into dir, which is created if missing. */
ACCLAB_API acclab_status acclab_result_write(const acclab_result* r, const char* dir);
/* Output directory named by the loaded config, or "." without one. */
ACCLAB_API const char* acclab_context_out_dir(const acclab_context* ctx);
ACCLAB_API void acclab_result_destroy(acclab_result* r);

#ifdef __cplusplus
}
#endif

#endif
