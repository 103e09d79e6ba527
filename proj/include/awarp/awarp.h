/* SPDX-License-Identifier: Apache-2.0 */
#ifndef AWARP_AWARP_H
#define AWARP_AWARP_H

/*
 * C interface to the area-warping library. Objects are opaque handles owned
 * by the caller and released with the matching *_free function (which
 * accepts NULL). Every fallible call returns an awarp_status; on failure
 * awarp_last_error() holds a message for the calling thread until its next
 * failing call.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AWARP_BUILDING)
#define AWARP_API __declspec(dllexport)
#else
#define AWARP_API __declspec(dllimport)
#endif
#else
#define AWARP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum awarp_status {
  AWARP_OK = 0,
  AWARP_E_INVALID_ARGUMENT = 1,
  AWARP_E_IO = 2,
  AWARP_E_FORMAT = 3,
  AWARP_E_DEGENERATE = 4,
  AWARP_E_NO_CROSSING = 5,
  AWARP_E_SINGULAR = 6,
  AWARP_E_OUT_OF_RANGE = 7,
  AWARP_E_INTERNAL = 8
} awarp_status;

typedef enum awarp_rule {
  AWARP_RULE_HEMIPIXEL = 0,
  AWARP_RULE_PIXEL_UNIFORM = 1,
  AWARP_RULE_WEIGHTED_AREA = 2
} awarp_rule;

typedef enum awarp_image_format {
  AWARP_FORMAT_AUTO = 0,
  AWARP_FORMAT_AWF1 = 1,
  AWARP_FORMAT_PGM8 = 2,
  AWARP_FORMAT_PGM16 = 3
} awarp_image_format;

typedef struct awarp_map awarp_map;
typedef struct awarp_image awarp_image;
typedef struct awarp_matrix awarp_matrix;
typedef struct awarp_photometry awarp_photometry;

typedef struct awarp_frame {
  double x0, y0, dx, dy;
  int64_t nx, ny;
} awarp_frame;

typedef struct awarp_entry {
  uint32_t l, m, i, j;
  double weight;
} awarp_entry;

typedef struct awarp_build_options {
  unsigned threads;       /* 0: one per core */
  double dup_factor;      /* duplicate-merge tolerance, relative */
  double prune_threshold; /* weights <= this are dropped */
} awarp_build_options;

typedef struct awarp_report {
  double delta;
  double colsum_min, colsum_max; /* NaN without fully covered columns */
  uint64_t fully_covered_columns;
  double rowsum_median_rel_error; /* NaN when not applicable */
  uint64_t rowsum_samples;
  uint64_t nnz;
  uint64_t skipped_degenerate;
  double lost_fraction;
} awarp_report;

AWARP_API const char* awarp_version(void);
AWARP_API const char* awarp_last_error(void);
AWARP_API const char* awarp_status_name(awarp_status status);

/* Frames */
AWARP_API awarp_status awarp_frame_unit(int64_t nx, int64_t ny, awarp_frame* out);
AWARP_API awarp_status awarp_frame_over_box(double x0, double y0, double x1, double y1,
                                             int64_t nx, int64_t ny, awarp_frame* out);

/* Maps: "wavy()", "sin()", "perspective(a=..,b=..,c=..,d=..)", "grid(x=f,y=f)", ... */
AWARP_API awarp_status awarp_map_parse(const char* spec, awarp_map** out);
AWARP_API void awarp_map_free(awarp_map* map);
AWARP_API awarp_status awarp_map_forward(const awarp_map* map, double x, double y, double* X,
                                         double* Y);
AWARP_API awarp_status awarp_map_inverse(const awarp_map* map, double X, double Y, double* x,
                                         double* y);
AWARP_API int awarp_map_has_inverse(const awarp_map* map);
/* Bounding box {xmin, ymin, xmax, ymax} of the mapped corners of `src`. */
AWARP_API awarp_status awarp_map_bounding_box(const awarp_map* map, const awarp_frame* src,
                                              double box[4]);

/* Images: row-major, channel-interleaved doubles. */
AWARP_API awarp_status awarp_image_new(const awarp_frame* frame, size_t channels,
                                       awarp_image** out);
AWARP_API awarp_status awarp_image_read(const char* path, awarp_image** out);
AWARP_API awarp_status awarp_image_write(const awarp_image* img, const char* path,
                                         awarp_image_format format);
AWARP_API void awarp_image_free(awarp_image* img);
AWARP_API awarp_status awarp_image_frame(const awarp_image* img, awarp_frame* out);
AWARP_API awarp_status awarp_image_set_frame(awarp_image* img, const awarp_frame* frame);
AWARP_API size_t awarp_image_channels(const awarp_image* img);
/* Valid until the image is freed; nx*ny*channels values. */
AWARP_API double* awarp_image_data(awarp_image* img);
AWARP_API awarp_status awarp_image_total(const awarp_image* img, double* out);

/* Test patterns on the unit square. */
AWARP_API awarp_status awarp_pattern_checker(int64_t nx, int64_t ny, int64_t cell,
                                             awarp_image** out);
AWARP_API awarp_status awarp_pattern_bars(int64_t nx, int64_t ny, awarp_image** out);
/* min_sep / margin <= 0 select 10 sigma / 6 sigma. */
AWARP_API awarp_status awarp_pattern_sources(int64_t nx, int64_t ny, size_t count, double sigma,
                                             double min_sep, double margin, uint64_t seed,
                                             awarp_image** out);

/* Warp matrices */
AWARP_API void awarp_build_options_init(awarp_build_options* opts);
AWARP_API awarp_status awarp_rule_parse(const char* text, awarp_rule* out);
/* opts may be NULL for defaults. */
AWARP_API awarp_status awarp_matrix_build(const awarp_map* map, const awarp_frame* src,
                                          const awarp_frame* dst, awarp_rule rule,
                                          const awarp_build_options* opts, awarp_matrix** out);
AWARP_API void awarp_matrix_free(awarp_matrix* b);
AWARP_API uint64_t awarp_matrix_nnz(const awarp_matrix* b);
AWARP_API awarp_status awarp_matrix_entry(const awarp_matrix* b, uint64_t index,
                                          awarp_entry* out);
AWARP_API awarp_status awarp_matrix_dst_frame(const awarp_matrix* b, awarp_frame* out);
AWARP_API awarp_status awarp_matrix_write(const awarp_matrix* b, const char* path);
AWARP_API awarp_status awarp_matrix_read(const char* path, awarp_matrix** out);
/* Re-homes a matrix read from disk onto explicit frames of the same size. */
AWARP_API awarp_status awarp_matrix_set_frames(awarp_matrix* b, const awarp_frame* src,
                                               const awarp_frame* dst);
AWARP_API awarp_status awarp_matrix_apply(const awarp_matrix* b, const awarp_image* src,
                                          unsigned threads, awarp_image** out);
/* map may be NULL: column and row sums are then skipped. */
AWARP_API awarp_status awarp_matrix_report(const awarp_matrix* b, const awarp_map* map,
                                           const awarp_image* src, const awarp_image* dst,
                                           awarp_report* out);

/* Unfiltered bilinear inverse-lookup resampling. */
AWARP_API awarp_status awarp_resample_bilinear(const awarp_map* map, const awarp_image* src,
                                               const awarp_frame* dst, unsigned threads,
                                               awarp_image** out);

/* Geometry self-test */
typedef struct awarp_selftest_options {
  size_t random_pairs;
  uint64_t mc_samples;
  uint64_t seed;
  unsigned threads;
} awarp_selftest_options;

typedef struct awarp_case_result {
  const char* group;
  const char* label;
  double area, clip_area, mc_area, mc_stderr;
  int symmetric, clip_ok, mc_ok;
} awarp_case_result;

typedef struct awarp_selftest_summary {
  size_t topological_total, topological_passed;
  size_t degenerate_total, degenerate_passed;
  size_t random_total, random_passed;
} awarp_selftest_summary;

typedef void (*awarp_case_callback)(const awarp_case_result* result, void* user);

AWARP_API void awarp_selftest_options_init(awarp_selftest_options* opts);
/* on_case may be NULL; it is invoked in corpus order. */
AWARP_API awarp_status awarp_selftest_run(const awarp_selftest_options* opts,
                                          awarp_case_callback on_case, void* user,
                                          awarp_selftest_summary* out);

/* Synthetic-source photometry experiment */
typedef struct awarp_photometry_config {
  int64_t src_size, dst_size;
  size_t sources;
  double sigma;
  double min_sep, margin; /* <= 0: 10 sigma, 6 sigma */
  uint64_t seed;
  double radius_sigmas;
  unsigned threads;
} awarp_photometry_config;

typedef struct awarp_source_info {
  double x, y, X, Y, grad_j;
} awarp_source_info;

AWARP_API void awarp_photometry_config_init(awarp_photometry_config* cfg);
AWARP_API awarp_status awarp_photometry_run(const awarp_photometry_config* cfg,
                                            const awarp_map* map, awarp_photometry** out);
AWARP_API void awarp_photometry_free(awarp_photometry* run);
AWARP_API size_t awarp_photometry_source_count(const awarp_photometry* run);
AWARP_API size_t awarp_photometry_method_count(void);
AWARP_API const char* awarp_photometry_method_name(size_t method);
AWARP_API awarp_status awarp_photometry_source(const awarp_photometry* run, size_t k,
                                               awarp_source_info* out);
/* NaN marks a source flagged for a Jacobian singularity. */
AWARP_API awarp_status awarp_photometry_value(const awarp_photometry* run, size_t method,
                                              size_t k, double* out);
AWARP_API awarp_status awarp_photometry_epsilon(const awarp_photometry* run, size_t method,
                                                double* out);
/* Spearman correlation of |s_tilde - 1| with |grad J| for one method. */
AWARP_API awarp_status awarp_photometry_spearman(const awarp_photometry* run, size_t method,
                                                 double* out);
AWARP_API awarp_status awarp_photometry_write_csv(const awarp_photometry* run,
                                                  const char* path);

#ifdef __cplusplus
}
#endif

#endif /* AWARP_AWARP_H */
