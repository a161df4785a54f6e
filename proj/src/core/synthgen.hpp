#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frame_prep.hpp"
#include "types.hpp"

namespace evtk {

/// Synthetic test-data factory: moving defect-like patterns rendered to an
/// intensity canvas and converted to events by an ideal logarithmic
/// threshold sensor model with per-pixel residual carry.

enum class PatternKind { CrackPolyline, SpallingBlob, Bar, Checker };

const char* pattern_kind_name(PatternKind kind);
PatternKind pattern_kind_from_name(const std::string& name);

struct ScenePattern {
    PatternKind kind = PatternKind::Bar;
    double fg = 40.0;        // foreground intensity, (0, 255]
    double bg = 200.0;       // background intensity, (0, 255]
    double extent_w = 80.0;  // pattern bounding box, px
    double extent_h = 50.0;
    double start_x = 30.0;   // bounding-box corner at t = 0
    double start_y = 30.0;
    int detail_seed = 7;     // shapes polyline kinks / blob lobes
    int class_id = -1;       // -1 derives from kind
};

int pattern_class(const ScenePattern& pattern);

struct MotionSpec {
    double vx = 60.0;              // px/s
    double vy = 0.0;
    double duration_s = 1.0;
    double frame_rate_hz = 20.0;   // must lie in [5, 35]
    double contrast = 0.2;         // log-intensity threshold C
    double annotation_rate_hz = 20.0;
    double noise_rate_hz = 0.0;    // per-pixel Poisson rate of spurious events
};

void check_motion(const MotionSpec& motion);

/// Pattern intensity field with the bounding-box corner at (pos_x, pos_y):
/// fg inside the shape, bg outside. Pixel (x, y) is sampled at its center.
ImageF render_canvas(const ScenePattern& pattern, double pos_x, double pos_y,
                     const SensorGeometry& geometry);

/// Pattern bounding box at time t under the motion (not clipped).
BBox pattern_bbox(const ScenePattern& pattern, const MotionSpec& motion, double t_s);

/// Ideal DVS step between two intensity images. Per pixel,
/// delta = log(max(I_next,1)) - log(max(I_prev,1)) + residual; emits
/// floor(|delta|/C) events of sign(delta) with timestamps spread over
/// (t_prev, t_next]; the sub-threshold remainder stays in `residual`.
/// Events come back sorted by (t, y, x).
std::vector<Event> simulate_dvs(const ImageF& prev, const ImageF& next, TimeUs t_prev,
                                TimeUs t_next, double contrast, std::vector<double>& residual);

/// Full sequence: frames at frame_rate, events from 1 ms sensor sub-steps,
/// ground-truth boxes at annotation_rate restricted to the event time span.
/// Deterministic for a fixed seed.
SequenceRecording render_sequence(const ScenePattern& pattern, const MotionSpec& motion,
                                  const SensorGeometry& geometry, std::uint64_t seed);

} // namespace evtk
