#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace evtk {

/// Timestamps are 64-bit integer microseconds everywhere; millisecond
/// quantities from configs are converted at API boundaries.
using TimeUs = std::int64_t;

constexpr TimeUs ms_to_us(double ms) { return static_cast<TimeUs>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5)); }

struct SensorGeometry {
    std::uint16_t width = 346;
    std::uint16_t height = 260;

    std::size_t pixel_count() const { return std::size_t(width) * height; }
    bool contains(std::uint16_t x, std::uint16_t y) const { return x < width && y < height; }
    bool operator==(const SensorGeometry&) const = default;
};

enum class Polarity : std::uint8_t {
    Negative = 0, // perceived intensity decrement
    Positive = 1, // perceived intensity increment
};

/// One sensor spike: time (us), pixel column/row, polarity.
struct Event {
    TimeUs t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Polarity p = Polarity::Positive;

    bool operator==(const Event&) const = default;
};

/// Events sorted by timestamp (ties allowed) inside a fixed sensor plane.
struct EventStream {
    std::vector<Event> events;
    SensorGeometry geometry;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
    TimeUs duration_us() const { return empty() ? 0 : events.back().t - events.front().t; }
    bool operator==(const EventStream&) const = default;
};

/// 8-bit grayscale frame, row-major height x width.
struct Frame {
    TimeUs t = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint8_t> pixels; // height*width

    std::uint8_t at(std::uint16_t x, std::uint16_t y) const { return pixels[std::size_t(y) * width + x]; }
    std::uint8_t& at(std::uint16_t x, std::uint16_t y) { return pixels[std::size_t(y) * width + x]; }
    bool operator==(const Frame&) const = default;
};

constexpr int kClassCrack = 0;
constexpr int kClassSpall = 1;

/// Axis-aligned box, corner + width + height in pixel units. The corner is
/// interpreted as top-left in y-down image coordinates unless the run config
/// selects the bottom-left convention (rendering only; IoU is unaffected).
struct BBox {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    double area() const { return w * h; }
    bool operator==(const BBox&) const = default;
};

struct Annotation {
    TimeUs t = 0;    // timestamp of the anchor event
    int class_id = 0; // 0 = crack, 1 = spalling
    BBox bbox;

    bool operator==(const Annotation&) const = default;
};

/// Annotation plus a confidence score, as produced by a detector.
struct Detection {
    std::int64_t image_id = 0;
    int class_id = 0;
    BBox bbox;
    double score = 0.0;

    bool operator==(const Detection&) const = default;
};

/// One recording: event stream + frames + annotations. Desynchronized
/// recordings carry a second annotation list keyed to frame timestamps.
struct SequenceRecording {
    EventStream events;
    std::vector<Frame> frames;
    std::vector<Annotation> annotations;
    std::optional<std::vector<Annotation>> frame_annotations;
    SensorGeometry geometry;
};

enum class ViolationKind {
    UnsortedEventTimestamps,
    EventOutOfBounds,
    NegativeEventTimestamp,
    UnsortedFrameTimestamps,
    FrameGeometryMismatch,
    BadClassId,
    ZeroAreaBox,
    BoxOutsidePlane,
    AnnotationOutsideEventRange,
};

const char* violation_kind_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::size_t index; // index into the offending list
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks every schema invariant and reports all violations; never throws.
/// Sorting checks are single linear passes naming the first inversion.
ValidationReport validate_sequence(const SequenceRecording& seq);

} // namespace evtk
