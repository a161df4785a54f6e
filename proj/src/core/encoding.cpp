#include "encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace evtk {
namespace {

EventVolume make_volume(const EventStream& stream, std::size_t first, std::size_t last_inclusive,
                        std::optional<std::size_t> anchor) {
    EventVolume v;
    v.range = {first, last_inclusive + 1};
    v.window = {stream.events[first].t, stream.events[last_inclusive].t};
    v.anchor_id = anchor;
    return v;
}

} // namespace

const char* encoder_mode_name(EncoderMode mode) {
    switch (mode) {
        case EncoderMode::FixedTime: return "fixed_time";
        case EncoderMode::FixedCount: return "fixed_count";
        case EncoderMode::GridThreshold: return "grid_threshold";
        case EncoderMode::Adaptive: return "adaptive";
    }
    return "unknown";
}

EncoderMode encoder_mode_from_name(const std::string& name) {
    if (name == "fixed_time") return EncoderMode::FixedTime;
    if (name == "fixed_count") return EncoderMode::FixedCount;
    if (name == "grid_threshold") return EncoderMode::GridThreshold;
    if (name == "adaptive") return EncoderMode::Adaptive;
    raise(ErrorCode::BadConfig, "unknown encoder mode '" + name + "'");
}

void check_encoder_config(const EncoderConfig& cfg, const SensorGeometry& geometry) {
    if (cfg.T_th_ms <= 0.0) raise(ErrorCode::BadConfig, "T_th must be positive");
    if (cfg.A_th <= 0.0) raise(ErrorCode::BadConfig, "A_th must be positive");
    if (cfg.q <= 0) raise(ErrorCode::BadConfig, "q must be positive");
    if (cfg.count_n <= 0) raise(ErrorCode::BadConfig, "fixed-count size must be positive");
    if (cfg.cell_threshold <= 0.0) raise(ErrorCode::BadConfig, "cell threshold must be positive");
    if (cfg.half_window_ms < 0.0) raise(ErrorCode::BadConfig, "half window must be non-negative");
    if (cfg.grid_m < 1 || cfg.grid_m > geometry.height)
        raise(ErrorCode::BadConfig, "grid rows must lie in [1, height]");
    if (cfg.grid_n < 1 || cfg.grid_n > geometry.width)
        raise(ErrorCode::BadConfig, "grid columns must lie in [1, width]");
}

std::uint64_t GridSummary::total() const {
    return std::accumulate(cell_counts.begin(), cell_counts.end(), std::uint64_t{0});
}

GridSummary grid_summary(const EventStream& stream, IndexRange range, int m, int n) {
    const SensorGeometry& geom = stream.geometry;
    if (m < 1 || m > geom.height || n < 1 || n > geom.width)
        raise(ErrorCode::BadConfig, "grid dimensions cannot partition the sensor plane");

    GridSummary g;
    g.m = m;
    g.n = n;
    g.cell_counts.assign(static_cast<std::size_t>(m) * n, 0);
    const int cell_w = geom.width / n;
    const int cell_h = geom.height / m;
    for (std::size_t i = range.first; i < range.last; ++i) {
        const Event& e = stream.events[i];
        const int col = std::min(e.x / cell_w, n - 1);
        const int row = std::min(e.y / cell_h, m - 1);
        ++g.cell_counts[static_cast<std::size_t>(row) * n + col];
    }
    const std::uint64_t total = g.total();
    g.mean = static_cast<double>(total) / (static_cast<double>(m) * n);
    const std::uint64_t peak =
        g.cell_counts.empty() ? 0 : *std::max_element(g.cell_counts.begin(), g.cell_counts.end());
    g.max_excess = static_cast<double>(peak) - g.mean;
    return g;
}

std::uint64_t Histogram2C::sum_pos() const {
    return std::accumulate(counts_pos.begin(), counts_pos.end(), std::uint64_t{0});
}

std::uint64_t Histogram2C::sum_neg() const {
    return std::accumulate(counts_neg.begin(), counts_neg.end(), std::uint64_t{0});
}

Histogram2C build_histogram(const EventStream& stream, const EventVolume& volume) {
    const SensorGeometry& geom = stream.geometry;
    Histogram2C h;
    h.width = geom.width;
    h.height = geom.height;
    h.window = volume.window;
    const std::size_t plane = geom.pixel_count();
    h.counts_pos.assign(plane, 0);
    h.counts_neg.assign(plane, 0);
    for (std::size_t i = volume.range.first; i < volume.range.last; ++i) {
        const Event& e = stream.events[i];
        const std::size_t bin = static_cast<std::size_t>(e.y) * geom.width + e.x;
        if (e.p == Polarity::Positive)
            ++h.counts_pos[bin];
        else
            ++h.counts_neg[bin];
    }
    return h;
}

NormalizedHistogram clip_and_normalize(const Histogram2C& h, bool per_channel) {
    NormalizedHistogram out;
    out.width = h.width;
    out.height = h.height;
    out.window = h.window;

    const std::size_t plane = static_cast<std::size_t>(h.width) * h.height;
    out.values.resize(2 * plane);
    for (std::size_t i = 0; i < plane; ++i) out.values[i] = h.counts_pos[i];
    for (std::size_t i = 0; i < plane; ++i) out.values[plane + i] = h.counts_neg[i];

    const std::size_t n = out.values.size();
    double sum = 0.0;
    for (double v : out.values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double v : out.values) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / static_cast<double>(n));

    // sigma = 0 means a flat histogram; clipping would erase it, so skip.
    if (sigma > 0.0) {
        const double ceiling = out.clip_sigma * sigma;
        for (double& v : out.values)
            v = std::min(v, ceiling);
    }

    if (per_channel) {
        for (int c = 0; c < 2; ++c) {
            double peak = 0.0;
            for (std::size_t i = 0; i < plane; ++i)
                peak = std::max(peak, out.values[c * plane + i]);
            if (peak > 0.0)
                for (std::size_t i = 0; i < plane; ++i) out.values[c * plane + i] /= peak;
        }
    } else {
        const double peak = *std::max_element(out.values.begin(), out.values.end());
        if (peak > 0.0)
            for (double& v : out.values) v /= peak;
    }
    return out;
}

EventVolume select_fixed_time(const EventStream& stream, TimeUs center_t, double T_ms) {
    if (T_ms <= 0.0) raise(ErrorCode::BadConfig, "window length must be positive");
    const double half_us = T_ms * 1000.0 / 2.0;
    const TimeUs lo = static_cast<TimeUs>(std::ceil(static_cast<double>(center_t) - half_us));
    const TimeUs hi = static_cast<TimeUs>(std::floor(static_cast<double>(center_t) + half_us));
    const IndexRange range = events_in_window(stream, lo, hi);
    if (range.empty())
        raise(ErrorCode::EmptyWindow, "no events in [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] us");
    return make_volume(stream, range.first, range.last - 1, std::nullopt);
}

EventVolume select_fixed_count(const EventStream& stream, std::size_t anchor_id, std::int64_t n) {
    if (n <= 0) raise(ErrorCode::BadConfig, "fixed-count size must be positive");
    if (stream.empty()) raise(ErrorCode::EmptyWindow, "cannot select from an empty stream");
    if (anchor_id >= stream.size())
        raise(ErrorCode::InvalidValue, "anchor index out of range");
    const std::size_t size = stream.size();
    const std::size_t want = std::min(static_cast<std::size_t>(n), size);
    std::size_t first = anchor_id >= want / 2 ? anchor_id - want / 2 : 0;
    if (first + want > size) first = size - want;
    return make_volume(stream, first, first + want - 1, anchor_id);
}

EventVolume select_grid_threshold(const EventStream& stream, std::size_t start_id,
                                  const EncoderConfig& cfg) {
    if (start_id >= stream.size())
        raise(ErrorCode::InvalidValue, "start index out of range");
    const SensorGeometry& geom = stream.geometry;
    if (cfg.grid_m < 1 || cfg.grid_m > geom.height || cfg.grid_n < 1 || cfg.grid_n > geom.width)
        raise(ErrorCode::BadConfig, "grid dimensions cannot partition the sensor plane");

    std::vector<std::uint64_t> cells(static_cast<std::size_t>(cfg.grid_m) * cfg.grid_n, 0);
    const int cell_w = geom.width / cfg.grid_n;
    const int cell_h = geom.height / cfg.grid_m;
    for (std::size_t i = start_id; i < stream.size(); ++i) {
        const Event& e = stream.events[i];
        const int col = std::min(e.x / cell_w, cfg.grid_n - 1);
        const int row = std::min(e.y / cell_h, cfg.grid_m - 1);
        const std::uint64_t c = ++cells[static_cast<std::size_t>(row) * cfg.grid_n + col];
        if (static_cast<double>(c) > cfg.cell_threshold)
            return make_volume(stream, start_id, i, start_id);
    }
    raise(ErrorCode::NeverSatisfied,
          "stream exhausted before any grid cell exceeded " + std::to_string(cfg.cell_threshold));
}

EventVolume select_adaptive(const EventStream& stream, std::size_t anchor_id,
                            const EncoderConfig& cfg) {
    if (anchor_id >= stream.size())
        raise(ErrorCode::InvalidValue, "anchor index out of range");
    check_encoder_config(cfg, stream.geometry);

    const std::size_t last = stream.size() - 1;
    const double min_duration_us = cfg.T_th_ms * 1000.0;
    for (std::int64_t count = 1;; ++count) {
        const std::int64_t grow = cfg.q * count;
        const std::size_t sid =
            static_cast<std::int64_t>(anchor_id) > grow ? anchor_id - static_cast<std::size_t>(grow)
                                                        : 0;
        const std::size_t eid = std::min(anchor_id + static_cast<std::size_t>(grow), last);

        const double duration_us =
            static_cast<double>(stream.events[eid].t - stream.events[sid].t);
        const GridSummary g = grid_summary(stream, {sid, eid + 1}, cfg.grid_m, cfg.grid_n);
        if (duration_us > min_duration_us && g.max_excess > cfg.A_th)
            return make_volume(stream, sid, eid, anchor_id);

        if (sid == 0 && eid == last)
            raise(ErrorCode::NeverSatisfied,
                  "volume growth reached the full stream without meeting both thresholds");
    }
}

EventVolume select_volume(const EventStream& stream, std::size_t anchor_id,
                          const EncoderConfig& cfg) {
    check_encoder_config(cfg, stream.geometry);
    if (stream.empty()) raise(ErrorCode::EmptyWindow, "cannot select from an empty stream");
    if (anchor_id >= stream.size())
        raise(ErrorCode::InvalidValue, "anchor index out of range");

    switch (cfg.mode) {
        case EncoderMode::FixedTime:
            return select_fixed_time(stream, stream.events[anchor_id].t, cfg.T_th_ms);
        case EncoderMode::FixedCount:
            return select_fixed_count(stream, anchor_id, cfg.count_n);
        case EncoderMode::GridThreshold:
            return select_grid_threshold(stream, anchor_id, cfg);
        case EncoderMode::Adaptive:
            return select_adaptive(stream, anchor_id, cfg);
    }
    raise(ErrorCode::BadConfig, "unhandled encoder mode");
}

NormalizedHistogram encode(const EventStream& stream, std::size_t anchor_id,
                           const EncoderConfig& cfg) {
    const EventVolume volume = select_volume(stream, anchor_id, cfg);
    NormalizedHistogram out = clip_and_normalize(build_histogram(stream, volume),
                                                 cfg.per_channel_norm);
    out.config = cfg;
    return out;
}

} // namespace evtk
