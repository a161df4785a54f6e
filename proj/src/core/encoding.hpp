#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "association.hpp"
#include "types.hpp"

namespace evtk {

/// Event-volume selection and two-channel histogram formation.

struct TimeWindow {
    TimeUs t_min = 0;
    TimeUs t_max = 0;

    TimeUs duration() const { return t_max - t_min; }
};

/// Contiguous slice of a stream. Window bounds equal the first/last event
/// timestamps of the slice; a volume is never empty.
struct EventVolume {
    IndexRange range;
    TimeWindow window;
    std::optional<std::size_t> anchor_id;

    std::size_t size() const { return range.size(); }
};

enum class EncoderMode { FixedTime = 1, FixedCount = 2, GridThreshold = 3, Adaptive = 0 };

const char* encoder_mode_name(EncoderMode mode);
EncoderMode encoder_mode_from_name(const std::string& name);

struct EncoderConfig {
    EncoderMode mode = EncoderMode::Adaptive;
    double T_th_ms = 15.0;   // minimum volume duration
    double A_th = 175.0;     // minimum cell excess over the mean
    std::int64_t q = 100;    // growth packet, events per side per step
    int grid_m = 4;          // grid rows
    int grid_n = 4;          // grid columns
    std::int64_t count_n = 5000;       // fixed_count volume size
    double cell_threshold = 175.0;     // grid_threshold cell trigger
    double half_window_ms = 10.0;      // frame association half-window
    bool per_channel_norm = false;     // normalize each polarity channel by its own max
};

/// Raises BadConfig when thresholds or grid dimensions cannot partition the
/// plane (m in [1,H], n in [1,W]).
void check_encoder_config(const EncoderConfig& cfg, const SensorGeometry& geometry);

/// Per-cell totals over an m x n partition of the plane. Cells are
/// floor(W/n) x floor(H/m) blocks; the last row/column absorb remainders.
struct GridSummary {
    int m = 0;
    int n = 0;
    std::vector<std::uint64_t> cell_counts; // m*n, row-major
    double mean = 0.0;
    double max_excess = 0.0; // max(cell_counts) - mean

    std::uint64_t total() const;
};

GridSummary grid_summary(const EventStream& stream, IndexRange range, int m, int n);

struct Histogram2C {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts_pos; // height*width, row-major
    std::vector<std::uint32_t> counts_neg;
    TimeWindow window;

    std::uint64_t sum_pos() const;
    std::uint64_t sum_neg() const;
};

struct NormalizedHistogram {
    int width = 0;
    int height = 0;
    std::vector<double> values; // 2*height*width, positive channel first
    TimeWindow window;
    EncoderConfig config;
    double clip_sigma = 3.0;

    double at(int channel, int y, int x) const {
        return values[static_cast<std::size_t>(channel) * height * width +
                      static_cast<std::size_t>(y) * width + x];
    }
};

constexpr int kChannelPositive = 0;
constexpr int kChannelNegative = 1;

/// Per-pixel per-polarity counts over the volume. Exact integers.
Histogram2C build_histogram(const EventStream& stream, const EventVolume& volume);

/// Clip each bin at 3 * sigma (population std over all bins of both
/// channels jointly), then divide by the maximum. sigma = 0 skips the clip;
/// an all-zero histogram stays all-zero. per_channel divides each polarity
/// plane by its own maximum instead of the joint one.
NormalizedHistogram clip_and_normalize(const Histogram2C& h, bool per_channel = false);

// --- selection strategies -------------------------------------------------

/// Events with t in the closed interval [center - T/2, center + T/2].
/// Raises EmptyWindow when no event falls inside.
EventVolume select_fixed_time(const EventStream& stream, TimeUs center_t, double T_ms);

/// Exactly min(N, |stream|) events centered on the anchor: floor(N/2)
/// before, the rest after, shifted inward at stream edges.
EventVolume select_fixed_count(const EventStream& stream, std::size_t anchor_id, std::int64_t n);

/// Shortest prefix starting at start_id such that some grid cell holds
/// strictly more than cell_threshold events. Raises NeverSatisfied when the
/// stream ends first.
EventVolume select_grid_threshold(const EventStream& stream, std::size_t start_id,
                                  const EncoderConfig& cfg);

/// Grows [anchor - q*count, anchor + q*count] (indices clamped) for
/// count = 1, 2, ... until the span lasts longer than T_th AND some cell
/// exceeds the mean cell count by more than A_th, both strictly. Raises
/// NeverSatisfied once both ends are clamped and the conditions still fail.
EventVolume select_adaptive(const EventStream& stream, std::size_t anchor_id,
                            const EncoderConfig& cfg);

/// Mode dispatch alone: the volume the configured strategy picks around the
/// anchor. fixed_time centers on the anchor event's timestamp.
EventVolume select_volume(const EventStream& stream, std::size_t anchor_id,
                          const EncoderConfig& cfg);

/// Mode dispatch + histogram + clip/normalize.
NormalizedHistogram encode(const EventStream& stream, std::size_t anchor_id,
                           const EncoderConfig& cfg);

} // namespace evtk
