/* C interface of the photoacoustic reconstruction library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * call returns a pat_status; on failure pat_last_error() describes the
 * problem (thread-local, valid until the next failing call on the thread).
 * Strings returned through char** are owned by the caller and released
 * with pat_string_free. JSON arguments use the schema documented in the
 * README. */
#ifndef PAT_PAT_H
#define PAT_PAT_H

#include <stddef.h>

#if defined(PAT_BUILDING_LIBRARY)
#define PAT_API __attribute__((visibility("default")))
#else
#define PAT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pat_status {
    PAT_OK = 0,
    PAT_ERR_INTERNAL = 1,
    PAT_ERR_ARGUMENT = 2,   /* bad call: null handle, unknown option */
    PAT_ERR_IO = 3,
    PAT_ERR_VALIDATION = 4, /* parameters or data rejected */
    PAT_ERR_NUMERICAL = 5
} pat_status;

typedef struct pat_array pat_array;   /* real field with spacing and origin */
typedef struct pat_record pat_record; /* sensor time series */
typedef struct pat_mask pat_mask;     /* sensor positions and weights */

typedef void (*pat_log_fn)(const char* message, void* user);

PAT_API const char* pat_version(void);
PAT_API const char* pat_last_error(void);
PAT_API void pat_string_free(char* s);

/* Arrays. dims, spacing and origin have ndim entries; data is C ordered. */
PAT_API pat_status pat_array_create(size_t ndim, const size_t* dims, const double* data, const double* spacing,
                                    const double* origin, pat_array** out);
PAT_API void pat_array_free(pat_array* a);
PAT_API size_t pat_array_ndim(const pat_array* a);
PAT_API pat_status pat_array_dims(const pat_array* a, size_t* dims);
PAT_API pat_status pat_array_spacing(const pat_array* a, double* spacing);
PAT_API pat_status pat_array_origin(const pat_array* a, double* origin);
PAT_API const double* pat_array_data(const pat_array* a);
PAT_API pat_status pat_array_read(const char* path, pat_array** out);
PAT_API pat_status pat_array_write(const pat_array* a, const char* path);
/* Maximum intensity projection along axis. */
PAT_API pat_status pat_array_mip(const pat_array* a, size_t axis, pat_array** out);
/* 16-bit image of a 2D array or of the depth MIP of a volume. format is
 * "pgm" or "png". */
PAT_API pat_status pat_array_write_image(const pat_array* a, const char* path, const char* format);
PAT_API int pat_png_supported(void);

/* Records. */
PAT_API pat_status pat_record_read(const char* path, pat_record** out);
PAT_API pat_status pat_record_write(const pat_record* r, const char* path);
PAT_API void pat_record_free(pat_record* r);
PAT_API size_t pat_record_sensors(const pat_record* r);
PAT_API size_t pat_record_samples_per_sensor(const pat_record* r);
PAT_API size_t pat_record_lateral_dims(const pat_record* r);
PAT_API double pat_record_dt(const pat_record* r);
PAT_API double pat_record_sound_speed(const pat_record* r);
PAT_API const double* pat_record_samples(const pat_record* r);
PAT_API const double* pat_record_positions(const pat_record* r);
PAT_API const double* pat_record_weights(const pat_record* r);
/* Rows of a full-grid record at the sensors of a grid-aligned mask. */
PAT_API pat_status pat_record_subsample(const pat_record* full, const pat_mask* mask, pat_record** out);
PAT_API pat_status pat_record_add_noise(const pat_record* r, double snr_db, unsigned long long seed, pat_record** out);

/* Masks. mask_json is one entry of a config's "masks" list with a single
 * interval; config_json supplies grid, pitch and center of interest. */
PAT_API pat_status pat_mask_create(const char* config_json, const char* mask_json, pat_mask** out);
PAT_API pat_status pat_mask_read_csv(const char* path, pat_mask** out);
PAT_API pat_status pat_mask_write_csv(const pat_mask* m, const char* path);
PAT_API void pat_mask_free(pat_mask* m);
PAT_API size_t pat_mask_size(const pat_mask* m);
PAT_API size_t pat_mask_lateral_dims(const pat_mask* m);
PAT_API const double* pat_mask_positions(const pat_mask* m);
PAT_API const double* pat_mask_weights(const pat_mask* m);
/* Layout, weight ratio and slice structure as JSON. */
PAT_API pat_status pat_mask_describe(const pat_mask* m, char** json);
/* Lateral image with each sensor's weight at its nearest node. */
PAT_API pat_status pat_mask_preview(const pat_mask* m, size_t grid, double pitch, pat_array** out);

/* Experiment stages. */
PAT_API pat_status pat_phantom(const char* config_json, pat_array** out);
/* mask may be NULL for the full grid. */
PAT_API pat_status pat_simulate(const char* config_json, const pat_mask* mask, pat_record** out);
/* method: "nufft", "interp" or "interp_ner". options_json may be NULL or
 * {"upsample": u, "window": {"c", "K", "alpha", "beta"}}. seconds (may be
 * NULL) receives the wall time of the reconstruction call. */
PAT_API pat_status pat_reconstruct(const pat_record* r, const char* method, const char* options_json, pat_array** out,
                                   double* seconds);
PAT_API pat_status pat_evaluate(const pat_array* image, const pat_array* model, const char* protocol_json,
                                char** report_json);
PAT_API pat_status pat_evaluate_csv(const char* report_json, char** csv);
PAT_API pat_status pat_run_pipeline(const char* config_json, const char* out_dir, pat_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif
