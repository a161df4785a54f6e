#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "containers.hpp"
#include "metrics.hpp"
#include "sampling.hpp"
#include "types.hpp"

namespace evtk {

inline constexpr const char* kToolVersion = "0.1.0";

/// High-level operations behind both the C surface and the CLI. All paths
/// are filesystem paths; all JSON is produced here so front ends only
/// print.

/// Recording load with the configured box-origin convention applied.
SequenceRecording load_sequence(const std::string& dir, BBoxOrigin origin);

// --- inspect --------------------------------------------------------------

struct InspectReport {
    std::string dir;
    int width = 0;
    int height = 0;
    std::size_t event_count = 0;
    TimeUs t_first = 0;
    TimeUs t_last = 0;
    bool has_frames = false;
    std::size_t frame_count = 0;
    double frame_rate_hz = 0.0;
    bool has_labels = false;
    std::size_t crack_count = 0;
    std::size_t spall_count = 0;
    std::size_t frame_label_count = 0;
    ValidationReport validation;
};

InspectReport inspect_sequence(const std::string& dir, BBoxOrigin origin = BBoxOrigin::TopLeft);
std::string inspect_to_json(const InspectReport& report);
std::string inspect_to_text(const InspectReport& report);

// --- encode ---------------------------------------------------------------

struct EncodeSequenceOutcome {
    std::string source_dir;
    std::string out_dir;
    int requested = 0;
    int written = 0;
    int failures = 0;
    int attempts = 0;
    double elapsed_s = 0.0;
    double events_per_second = 0.0; // encoded events over extraction time
    std::vector<std::string> bundle_files;
    std::vector<std::string> verify_failures;
};

/// Extracts bundles from one sequence directory into out_dir
/// (sample_000.npz, ...). verify re-reads every written bundle and
/// re-derives its postconditions.
EncodeSequenceOutcome encode_sequence_dir(const std::string& seq_dir, const std::string& out_dir,
                                          const ToolConfig& cfg, std::uint64_t seed, bool verify);

/// Writes the run manifest covering every processed sequence exactly once.
void write_encode_manifest(const std::string& path,
                           const std::vector<EncodeSequenceOutcome>& outcomes,
                           const ToolConfig& cfg, std::uint64_t seed, double total_s);

// --- generate -------------------------------------------------------------

struct GenerateOutcome {
    std::string dir;
    std::size_t event_count = 0;
    std::size_t frame_count = 0;
    std::size_t annotation_count = 0;
    double elapsed_s = 0.0;
};

/// Renders the configured scene into dir (events.h5/frames.h5/label.npy and
/// a manifest).
GenerateOutcome generate_sequence_dir(const std::string& dir, const ToolConfig& cfg,
                                      std::uint64_t seed, bool flat_events = false);

// --- evaluate -------------------------------------------------------------

std::vector<Detection> read_detections_jsonl(const std::string& path);
void write_detections_jsonl(const std::string& path, const std::vector<Detection>& dets);

/// Ground truth from a label .npy (timestamps become image ids) or from the
/// detections JSONL shape (scores ignored).
std::vector<GroundTruth> load_ground_truth(const std::string& path, BBoxOrigin origin,
                                           int plane_height);

EvalReport evaluate_paths(const std::string& gt_path, const std::string& det_path,
                          const ToolConfig& cfg);
std::string eval_report_json(const EvalReport& report);
std::string eval_report_table(const EvalReport& report);

// --- render ---------------------------------------------------------------

/// Bundle visualization: positive channel red, negative green, attached
/// frame as gray backdrop, annotation boxes outlined per class.
void render_bundle_png(const std::string& bundle_path, const std::string& png_path);

// --- verify ---------------------------------------------------------------

struct VerifyOutcome {
    int bundles_checked = 0;
    std::vector<std::string> failures; // prefixed with the offending file
};

/// Re-derives bundle postconditions for every bundle listed in the encode
/// manifest under out_dir, against the recorded source sequences.
VerifyOutcome verify_encode_dir(const std::string& out_dir, BBoxOrigin origin);

} // namespace evtk
