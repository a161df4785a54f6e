#pragma once

#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace evtk {

/// Recording container layer. Event and frame streams live in HDF5 files;
/// a flat binary fallback (.evt) carries the same event table for
/// environments without HDF5 tooling. Annotations are NPY tables.

// --- events ---------------------------------------------------------------

/// events dataset: N x 4 int64 rows [t_us, x, y, polarity]. Geometry is
/// stored as width/height attributes; absent attributes fall back to the
/// default sensor plane.
void write_events(const std::string& path, const EventStream& stream);

/// Strict reader: rejects wrong column count, unsorted timestamps,
/// out-of-plane coordinates and polarities outside {0,1}.
EventStream read_events(const std::string& path);

// --- frames ---------------------------------------------------------------

/// frames dataset: M x H x W uint8; frame_ts dataset: M int64.
void write_frames(const std::string& path, const std::vector<Frame>& frames);

std::vector<Frame> read_frames(const std::string& path);

// --- annotations ----------------------------------------------------------

/// label table: K x 6 float64 rows [t_us, class_id, bx, by, w, h].
void write_labels(const std::string& path, const std::vector<Annotation>& annotations);

std::vector<Annotation> read_labels(const std::string& path);

// --- on-disk recording ----------------------------------------------------

struct RecordingPaths {
    std::string events;          // .h5 or .evt
    std::string frames;          // may be empty
    std::string labels;          // may be empty
    std::string frame_labels;    // may be empty
};

/// Derives the standard member paths under a recording directory:
/// events.h5 (or events.evt when only that exists), frames.h5, label.npy,
/// frame_label.npy.
RecordingPaths locate_recording(const std::string& dir);

SequenceRecording read_recording(const std::string& dir);

/// Writes the standard layout. use_flat_events selects the .evt fallback
/// instead of events.h5.
void write_recording(const std::string& dir, const SequenceRecording& seq,
                     bool use_flat_events = false);

// --- training sample bundles ----------------------------------------------

/// One encoded sample: the two-channel histogram, the optional associated
/// frame (grayscale in [0,1]), annotations active in the window, and the
/// parameters that produced it.
struct SampleBundle {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> hist;            // 2 * height * width, channel-major
    std::optional<std::vector<double>> frame; // height * width
    std::vector<Annotation> labels;

    TimeUs t_min = 0;
    TimeUs t_max = 0;
    int mode = 0;
    double T_th_ms = 0.0;
    double A_th = 0.0;
    std::int64_t q = 0;
    int grid_m = 0;
    int grid_n = 0;
    double half_window_ms = 0.0;
    double clip_sigma = 0.0;
    std::int64_t seq_id = 0;
    std::int64_t anchor_id = -1;
    TimeUs frame_t = -1;           // -1 when no frame attached
    bool per_channel_norm = false;

    double& at(int channel, std::size_t y, std::size_t x) {
        return hist[static_cast<std::size_t>(channel) * height * width + y * width + x];
    }
    double at(int channel, std::size_t y, std::size_t x) const {
        return hist[static_cast<std::size_t>(channel) * height * width + y * width + x];
    }
};

void write_bundle(const std::string& path, const SampleBundle& bundle);

SampleBundle read_bundle(const std::string& path);

} // namespace evtk
