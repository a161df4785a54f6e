#ifndef EVTK_H
#define EVTK_H

/* Event-camera dataset toolkit: C surface over the processing core.
 *
 * Conventions:
 *   - Every fallible call returns evtk_status; EVTK_OK means success.
 *   - On failure, evtk_last_error() describes the problem for the calling
 *     thread until its next toolkit call.
 *   - Objects come from _create/_load factories and must be released with
 *     the matching _destroy; destroy accepts NULL.
 *   - Strings written to a char** are heap copies; release them with
 *     evtk_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVTK_API __declspec(dllexport)
#else
#define EVTK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evtk_status {
    EVTK_OK = 0,
    EVTK_ERR_IO = 1,
    EVTK_ERR_MISSING_DATASET = 2,
    EVTK_ERR_BAD_SHAPE = 3,
    EVTK_ERR_BAD_HEADER = 4,
    EVTK_ERR_WRONG_COLUMNS = 5,
    EVTK_ERR_UNKNOWN_CLASS = 6,
    EVTK_ERR_UNSORTED = 7,
    EVTK_ERR_OUT_OF_BOUNDS = 8,
    EVTK_ERR_INVALID_VALUE = 9,
    EVTK_ERR_MISSING_ARRAY = 10,
    EVTK_ERR_EMPTY_WINDOW = 11,
    EVTK_ERR_NEVER_SATISFIED = 12,
    EVTK_ERR_DEGENERATE_BOX = 13,
    EVTK_ERR_BAD_CONFIG = 14,
    EVTK_ERR_INVALID_ARGUMENT = 15,
    EVTK_ERR_INTERNAL = 16
} evtk_status;

/* Tool configuration document (JSON sections: encoder, prep, scene, eval,
 * samples). */
typedef struct evtk_config evtk_config;

/* A recording directory loaded into memory. */
typedef struct evtk_sequence evtk_sequence;

/* Result object carrying a JSON payload and a human-readable rendering. */
typedef struct evtk_report evtk_report;

/* Library version string, static storage. */
EVTK_API const char* evtk_version(void);

/* Stable name for a status code, static storage. */
EVTK_API const char* evtk_status_name(evtk_status status);

/* Message for the calling thread's most recent failure, static storage.
 * Empty string when the last call succeeded. */
EVTK_API const char* evtk_last_error(void);

/* Releases a string returned through a char** out-parameter. */
EVTK_API void evtk_string_free(char* text);

/* ---- configuration ---- */

/* Config with built-in defaults. */
EVTK_API evtk_status evtk_config_create(evtk_config** out);

/* Config parsed from a JSON file. */
EVTK_API evtk_status evtk_config_load(const char* path, evtk_config** out);

/* Config parsed from in-memory JSON text. */
EVTK_API evtk_status evtk_config_parse(const char* json_text, evtk_config** out);

/* Applies one "key=value" or "section.key=value" override. */
EVTK_API evtk_status evtk_config_set(evtk_config* cfg, const char* assignment);

/* Canonical JSON serialization of the effective config. */
EVTK_API evtk_status evtk_config_to_json(const evtk_config* cfg, char** out_text);

/* 16-hex-digit content hash of the effective config. */
EVTK_API evtk_status evtk_config_hash(const evtk_config* cfg, char** out_text);

EVTK_API void evtk_config_destroy(evtk_config* cfg);

/* ---- sequences ---- */

/* Loads events/frames/labels from a recording directory. cfg may be NULL
 * for defaults (it supplies the bbox-origin convention). */
EVTK_API evtk_status evtk_sequence_load(const char* dir, const evtk_config* cfg,
                                        evtk_sequence** out);

/* Element counts of a loaded sequence. Any out-pointer may be NULL. */
EVTK_API evtk_status evtk_sequence_stats(const evtk_sequence* seq, uint64_t* event_count,
                                         uint64_t* frame_count, uint64_t* annotation_count);

/* Schema validation; the report lists violations and ok-ness. */
EVTK_API evtk_status evtk_sequence_validate(const evtk_sequence* seq, evtk_report** out);

EVTK_API void evtk_sequence_destroy(evtk_sequence* seq);

/* ---- pipeline commands ---- */

/* Summarizes a recording directory (counts, duration, validation). */
EVTK_API evtk_status evtk_inspect(const char* seq_dir, const evtk_config* cfg,
                                  evtk_report** out);

/* Renders the configured synthetic scene into a recording directory.
 * flat_events selects the flat binary event container. */
EVTK_API evtk_status evtk_generate(const char* out_dir, const evtk_config* cfg, uint64_t seed,
                                   int flat_events, evtk_report** out);

/* Extracts sample bundles from each sequence directory into out_dir and
 * writes the run manifest. verify re-reads and re-derives every written
 * bundle. jobs > 1 processes sequences in parallel. */
EVTK_API evtk_status evtk_encode(const char* const* seq_dirs, size_t dir_count,
                                 const char* out_dir, const evtk_config* cfg, uint64_t seed,
                                 int verify, int jobs, evtk_report** out);

/* Scores detections (JSON lines) against ground truth (.npy labels or the
 * same JSON-lines shape). */
EVTK_API evtk_status evtk_evaluate(const char* gt_path, const char* det_path,
                                   const evtk_config* cfg, evtk_report** out);

/* Renders a sample bundle to an RGB PNG. */
EVTK_API evtk_status evtk_render(const char* bundle_path, const char* png_path,
                                 evtk_report** out);

/* Re-checks all bundles recorded in an encode manifest against their source
 * sequences. */
EVTK_API evtk_status evtk_verify(const char* encode_dir, const evtk_config* cfg,
                                 evtk_report** out);

/* ---- reports ---- */

/* JSON payload of a report. */
EVTK_API evtk_status evtk_report_json(const evtk_report* report, char** out_text);

/* Human-readable rendering of a report. */
EVTK_API evtk_status evtk_report_text(const evtk_report* report, char** out_text);

/* 1 when the reported operation found no failures, else 0. */
EVTK_API int evtk_report_ok(const evtk_report* report);

EVTK_API void evtk_report_destroy(evtk_report* report);

#ifdef __cplusplus
}
#endif

#endif /* EVTK_H */
