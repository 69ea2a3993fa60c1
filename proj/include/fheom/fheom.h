/* fheom.h - C interface: load a run config, execute it, read back the summary. */
#ifndef FHEOM_H
#define FHEOM_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FHEOM_BUILDING_LIBRARY)
#define FHEOM_API __attribute__((visibility("default")))
#else
#define FHEOM_API
#endif

typedef enum fheom_status {
  FHEOM_OK = 0,
  FHEOM_ERR_INVALID_ARGUMENT = 1,
  FHEOM_ERR_CONFIG = 2,
  FHEOM_ERR_SOLVER = 3,
  FHEOM_ERR_IO = 4,
  FHEOM_ERR_UNSUPPORTED_SECTOR = 5,
  FHEOM_ERR_QUADRATURE = 6,
  FHEOM_ERR_INTERNAL = 99
} fheom_status;

typedef struct fheom_config fheom_config;
typedef struct fheom_result fheom_result;

/* Message for the last failed call on this thread; empty string if none. */
FHEOM_API const char* fheom_last_error(void);
FHEOM_API const char* fheom_version(void);

FHEOM_API fheom_status fheom_config_load(const char* path, fheom_config** out);
FHEOM_API fheom_status fheom_config_parse(const char* json_text, fheom_config** out);
FHEOM_API fheom_status fheom_config_set_output(fheom_config* config, const char* directory);
/* Resolved config as JSON; valid until the config is freed or modified. */
FHEOM_API const char* fheom_config_json(const fheom_config* config);
FHEOM_API void fheom_config_free(fheom_config* config);

FHEOM_API fheom_status fheom_run(const fheom_config* config, fheom_result** out);
FHEOM_API fheom_status fheom_verify(const fheom_config* config, fheom_result** out);
FHEOM_API fheom_status fheom_decompose(const fheom_config* config, fheom_result** out);

/* 0 on success, 2 when a verification residual exceeded its threshold. */
FHEOM_API int fheom_result_exit_code(const fheom_result* result);
FHEOM_API const char* fheom_result_summary(const fheom_result* result);
FHEOM_API void fheom_result_free(fheom_result* result);

#ifdef __cplusplus
}
#endif

#endif
