#include "core/types.hpp"
#include "core/error.hpp"

#include <sstream>

namespace evtk {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingDataset: return "MissingDataset";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::WrongColumnCount: return "WrongColumnCount";
    case ErrorCode::UnknownClassId: return "UnknownClassId";
    case ErrorCode::UnsortedTimestamps: return "UnsortedTimestamps";
    case ErrorCode::CoordinateOutOfBounds: return "CoordinateOutOfBounds";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MissingRequiredArray: return "MissingRequiredArray";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NeverSatisfied: return "NeverSatisfied";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::UnsortedEventTimestamps: return "unsorted event timestamps";
    case ViolationKind::EventOutOfBounds: return "event out of bounds";
    case ViolationKind::NegativeEventTimestamp: return "negative event timestamp";
    case ViolationKind::UnsortedFrameTimestamps: return "unsorted frame timestamps";
    case ViolationKind::FrameGeometryMismatch: return "frame geometry mismatch";
    case ViolationKind::BadClassId: return "bad class id";
    case ViolationKind::ZeroAreaBox: return "zero-area box";
    case ViolationKind::BoxOutsidePlane: return "box outside sensor plane";
    case ViolationKind::AnnotationOutsideEventRange: return "annotation outside event range";
    }
    return "unknown violation";
}

namespace {

void add(ValidationReport& report, ViolationKind kind, std::size_t index, const std::string& detail) {
    report.violations.push_back({kind, index, std::string(violation_kind_name(kind)) + ": " + detail});
}

std::string at_index(std::size_t i) {
    std::ostringstream os;
    os << "index " << i;
    return os.str();
}

} // namespace

ValidationReport validate_sequence(const SequenceRecording& seq) {
    ValidationReport report;
    const auto& geom = seq.geometry;

    const auto& events = seq.events.events;
    bool inversion_reported = false;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.t < 0)
            add(report, ViolationKind::NegativeEventTimestamp, i, at_index(i));
        if (!inversion_reported && i > 0 && e.t < events[i - 1].t) {
            add(report, ViolationKind::UnsortedEventTimestamps, i,
                "first inversion at " + at_index(i));
            inversion_reported = true;
        }
        if (!geom.contains(e.x, e.y)) {
            std::ostringstream os;
            os << "event " << i << " at (" << e.x << "," << e.y << ") outside " << geom.width << "x"
               << geom.height;
            add(report, ViolationKind::EventOutOfBounds, i, os.str());
        }
    }

    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const Frame& f = seq.frames[i];
        if (i > 0 && f.t < seq.frames[i - 1].t)
            add(report, ViolationKind::UnsortedFrameTimestamps, i, "first inversion at " + at_index(i));
        if (f.width != geom.width || f.height != geom.height ||
            f.pixels.size() != geom.pixel_count())
            add(report, ViolationKind::FrameGeometryMismatch, i, at_index(i));
    }

    auto check_annotation = [&](const Annotation& a, std::size_t i, bool shared_layout) {
        if (a.class_id != kClassCrack && a.class_id != kClassSpall) {
            std::ostringstream os;
            os << "class_id " << a.class_id << " at " << at_index(i);
            add(report, ViolationKind::BadClassId, i, os.str());
        }
        if (!(a.bbox.w > 0.0 && a.bbox.h > 0.0)) {
            add(report, ViolationKind::ZeroAreaBox, i, at_index(i));
        } else if (a.bbox.x + a.bbox.w <= 0.0 || a.bbox.y + a.bbox.h <= 0.0 ||
                   a.bbox.x >= geom.width || a.bbox.y >= geom.height) {
            add(report, ViolationKind::BoxOutsidePlane, i, at_index(i));
        }
        if (shared_layout && !events.empty() &&
            (a.t < events.front().t || a.t > events.back().t))
            add(report, ViolationKind::AnnotationOutsideEventRange, i, at_index(i));
    };

    // The event annotation list must stay within the event span only when it
    // is shared between frames and events (no separate frame list).
    const bool shared_layout = !seq.frame_annotations.has_value();
    for (std::size_t i = 0; i < seq.annotations.size(); ++i)
        check_annotation(seq.annotations[i], i, shared_layout);
    if (seq.frame_annotations)
        for (std::size_t i = 0; i < seq.frame_annotations->size(); ++i)
            check_annotation((*seq.frame_annotations)[i], i, false);

    return report;
}

} // namespace evtk
