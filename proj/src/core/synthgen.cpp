#include "synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace evtk {
namespace {

// Deterministic small hash for shape detail parameters.
std::uint64_t mix(std::uint64_t v) {
    v ^= v >> 33;
    v *= 0xff51afd7ed558ccdULL;
    v ^= v >> 33;
    v *= 0xc4ceb9fe1a85ec53ULL;
    v ^= v >> 33;
    return v;
}

double unit_hash(int seed, int slot) {
    const std::uint64_t h = mix(static_cast<std::uint64_t>(seed) * 1315423911ULL +
                                static_cast<std::uint64_t>(slot) + 1);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double dist_to_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double u = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const double cx = ax + u * dx;
    const double cy = ay + u * dy;
    return std::hypot(px - cx, py - cy);
}

// Shape membership in pattern-local coordinates (origin at the bounding-box
// corner).
bool inside_shape(const ScenePattern& p, double lx, double ly) {
    switch (p.kind) {
        case PatternKind::Bar:
            return true;
        case PatternKind::Checker: {
            const double cw = p.extent_w / 4.0;
            const double ch = p.extent_h / 4.0;
            const int cx = static_cast<int>(lx / cw);
            const int cy = static_cast<int>(ly / ch);
            return (cx + cy) % 2 == 0;
        }
        case PatternKind::CrackPolyline: {
            constexpr int kSegments = 8;
            const double thickness = std::max(1.5, p.extent_h / 12.0);
            double prev_x = 0.0;
            double prev_y = p.extent_h * (0.3 + 0.4 * unit_hash(p.detail_seed, 0));
            for (int i = 1; i <= kSegments; ++i) {
                const double nx = p.extent_w * static_cast<double>(i) / kSegments;
                const double ny =
                    p.extent_h * (0.15 + 0.7 * unit_hash(p.detail_seed, i));
                if (dist_to_segment(lx, ly, prev_x, prev_y, nx, ny) <= thickness) return true;
                prev_x = nx;
                prev_y = ny;
            }
            return false;
        }
        case PatternKind::SpallingBlob: {
            const double cx = p.extent_w / 2.0;
            const double cy = p.extent_h / 2.0;
            const double rx = p.extent_w / 2.0;
            const double ry = p.extent_h / 2.0;
            const double ux = (lx - cx) / rx;
            const double uy = (ly - cy) / ry;
            const double rho = std::hypot(ux, uy);
            const double theta = std::atan2(uy, ux);
            const int lobes = 3 + p.detail_seed % 3;
            const double phase = 6.283185307179586 * unit_hash(p.detail_seed, 99);
            return rho < 0.78 + 0.18 * std::sin(lobes * theta + phase);
        }
    }
    return false;
}

void check_pattern(const ScenePattern& p) {
    if (p.fg <= 0.0 || p.fg > 255.0 || p.bg <= 0.0 || p.bg > 255.0)
        raise(ErrorCode::BadConfig, "pattern intensities must lie in (0, 255]");
    if (p.extent_w <= 0.0 || p.extent_h <= 0.0)
        raise(ErrorCode::BadConfig, "pattern extent must be positive");
}

} // namespace

const char* pattern_kind_name(PatternKind kind) {
    switch (kind) {
        case PatternKind::CrackPolyline: return "crack_polyline";
        case PatternKind::SpallingBlob: return "spalling_blob";
        case PatternKind::Bar: return "bar";
        case PatternKind::Checker: return "checker";
    }
    return "unknown";
}

PatternKind pattern_kind_from_name(const std::string& name) {
    if (name == "crack_polyline") return PatternKind::CrackPolyline;
    if (name == "spalling_blob") return PatternKind::SpallingBlob;
    if (name == "bar") return PatternKind::Bar;
    if (name == "checker") return PatternKind::Checker;
    raise(ErrorCode::BadConfig, "unknown pattern kind '" + name + "'");
}

int pattern_class(const ScenePattern& pattern) {
    if (pattern.class_id >= 0) return pattern.class_id;
    switch (pattern.kind) {
        case PatternKind::CrackPolyline:
        case PatternKind::Bar:
            return kClassCrack;
        case PatternKind::SpallingBlob:
        case PatternKind::Checker:
            return kClassSpall;
    }
    return kClassCrack;
}

void check_motion(const MotionSpec& motion) {
    if (motion.frame_rate_hz < 5.0 || motion.frame_rate_hz > 35.0)
        raise(ErrorCode::BadConfig, "frame rate must lie in [5, 35] Hz");
    if (motion.contrast <= 0.0)
        raise(ErrorCode::BadConfig, "contrast threshold must be positive");
    if (motion.duration_s <= 0.0)
        raise(ErrorCode::BadConfig, "duration must be positive");
    if (motion.annotation_rate_hz < 15.0)
        raise(ErrorCode::BadConfig, "annotation rate must be at least 15 Hz");
    if (motion.noise_rate_hz < 0.0)
        raise(ErrorCode::BadConfig, "noise rate must be non-negative");
}

ImageF render_canvas(const ScenePattern& pattern, double pos_x, double pos_y,
                     const SensorGeometry& geometry) {
    check_pattern(pattern);
    ImageF canvas;
    canvas.width = geometry.width;
    canvas.height = geometry.height;
    canvas.pixels.assign(geometry.pixel_count(), pattern.bg);

    // Only pixels whose centers fall in the moved bounding box can change.
    const int x0 = std::max(0, static_cast<int>(std::floor(pos_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(pos_y - 0.5)));
    const int x1 = std::min(static_cast<int>(geometry.width),
                            static_cast<int>(std::ceil(pos_x + pattern.extent_w)));
    const int y1 = std::min(static_cast<int>(geometry.height),
                            static_cast<int>(std::ceil(pos_y + pattern.extent_h)));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double lx = (x + 0.5) - pos_x;
            const double ly = (y + 0.5) - pos_y;
            if (lx < 0.0 || ly < 0.0 || lx >= pattern.extent_w || ly >= pattern.extent_h) continue;
            if (inside_shape(pattern, lx, ly)) canvas.at(x, y) = pattern.fg;
        }
    }
    return canvas;
}

BBox pattern_bbox(const ScenePattern& pattern, const MotionSpec& motion, double t_s) {
    return {pattern.start_x + motion.vx * t_s, pattern.start_y + motion.vy * t_s,
            pattern.extent_w, pattern.extent_h};
}

std::vector<Event> simulate_dvs(const ImageF& prev, const ImageF& next, TimeUs t_prev,
                                TimeUs t_next, double contrast, std::vector<double>& residual) {
    if (prev.width != next.width || prev.height != next.height)
        raise(ErrorCode::BadShape, "sensor step images differ in size");
    if (t_next <= t_prev)
        raise(ErrorCode::InvalidValue, "sensor step must advance in time");
    if (contrast <= 0.0)
        raise(ErrorCode::BadConfig, "contrast threshold must be positive");
    const std::size_t plane = prev.pixels.size();
    if (residual.size() != plane)
        raise(ErrorCode::BadShape, "residual buffer does not match the pixel plane");

    const TimeUs dt = t_next - t_prev;
    std::vector<Event> events;
    for (int y = 0; y < prev.height; ++y) {
        for (int x = 0; x < prev.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * prev.width + x;
            const double delta = std::log(std::max(next.pixels[i], 1.0)) -
                                 std::log(std::max(prev.pixels[i], 1.0)) + residual[i];
            const double magnitude = std::abs(delta);
            const auto n = static_cast<std::int64_t>(std::floor(magnitude / contrast));
            const double sign = delta >= 0.0 ? 1.0 : -1.0;
            residual[i] = delta - sign * static_cast<double>(n) * contrast;
            if (n == 0) continue;

            const Polarity p = delta >= 0.0 ? Polarity::Positive : Polarity::Negative;
            for (std::int64_t k = 1; k <= n; ++k) {
                const auto offset = static_cast<TimeUs>(std::llround(
                    static_cast<double>(dt) * static_cast<double>(k) / static_cast<double>(n)));
                Event e;
                e.t = t_prev + std::max<TimeUs>(offset, 1);
                e.x = static_cast<std::uint16_t>(x);
                e.y = static_cast<std::uint16_t>(y);
                e.p = p;
                events.push_back(e);
            }
        }
    }
    // Row-major emission order makes a stable time sort break ties by (y, x).
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return events;
}

SequenceRecording render_sequence(const ScenePattern& pattern, const MotionSpec& motion,
                                  const SensorGeometry& geometry, std::uint64_t seed) {
    check_pattern(pattern);
    check_motion(motion);

    SequenceRecording seq;
    seq.geometry = geometry;
    seq.events.geometry = geometry;

    const TimeUs duration_us = ms_to_us(motion.duration_s * 1000.0);
    std::vector<TimeUs> steps;
    for (TimeUs t = 0; t <= duration_us; t += 1000) steps.push_back(t);
    if (steps.back() != duration_us) steps.push_back(duration_us);

    auto canvas_at = [&](TimeUs t) {
        const double t_s = static_cast<double>(t) / 1e6;
        return render_canvas(pattern, pattern.start_x + motion.vx * t_s,
                             pattern.start_y + motion.vy * t_s, geometry);
    };

    Rng rng(seed);
    std::vector<double> residual(geometry.pixel_count(), 0.0);
    ImageF prev = canvas_at(steps.front());
    for (std::size_t s = 1; s < steps.size(); ++s) {
        ImageF next = canvas_at(steps[s]);
        std::vector<Event> step_events =
            simulate_dvs(prev, next, steps[s - 1], steps[s], motion.contrast, residual);

        if (motion.noise_rate_hz > 0.0) {
            const double dt_s = static_cast<double>(steps[s] - steps[s - 1]) / 1e6;
            const double expected =
                motion.noise_rate_hz * dt_s * static_cast<double>(geometry.pixel_count());
            const std::int64_t count = rng.poisson(expected);
            for (std::int64_t i = 0; i < count; ++i) {
                Event e;
                e.t = steps[s - 1] + 1 +
                      rng.uniform_int(0, steps[s] - steps[s - 1] - 1);
                e.x = static_cast<std::uint16_t>(rng.uniform_int(0, geometry.width - 1));
                e.y = static_cast<std::uint16_t>(rng.uniform_int(0, geometry.height - 1));
                e.p = rng.uniform_int(0, 1) == 1 ? Polarity::Positive : Polarity::Negative;
                step_events.push_back(e);
            }
            std::stable_sort(step_events.begin(), step_events.end(),
                             [](const Event& a, const Event& b) { return a.t < b.t; });
        }

        seq.events.events.insert(seq.events.events.end(), step_events.begin(), step_events.end());
        prev = std::move(next);
    }

    const TimeUs frame_period = ms_to_us(1000.0 / motion.frame_rate_hz);
    for (TimeUs t = 0; t <= duration_us; t += frame_period) {
        const ImageF canvas = canvas_at(t);
        Frame f;
        f.t = t;
        f.width = geometry.width;
        f.height = geometry.height;
        f.pixels.resize(canvas.pixels.size());
        for (std::size_t i = 0; i < canvas.pixels.size(); ++i)
            f.pixels[i] = static_cast<std::uint8_t>(
                std::clamp<long>(std::lround(canvas.pixels[i]), 0, 255));
        seq.frames.push_back(std::move(f));
    }

    if (!seq.events.empty()) {
        const TimeUs span_lo = seq.events.events.front().t;
        const TimeUs span_hi = seq.events.events.back().t;
        const TimeUs ann_period = ms_to_us(1000.0 / motion.annotation_rate_hz);
        const int cls = pattern_class(pattern);
        for (TimeUs t = 0; t <= duration_us; t += ann_period) {
            if (t < span_lo || t > span_hi) continue;
            const BBox box = pattern_bbox(pattern, motion, static_cast<double>(t) / 1e6);
            const bool on_plane = box.x + box.w > 0.0 && box.y + box.h > 0.0 &&
                                  box.x < geometry.width && box.y < geometry.height;
            if (!on_plane) continue;
            seq.annotations.push_back({t, cls, box});
        }
    }
    return seq;
}

} // namespace evtk
