#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "types.hpp"

namespace evtk {

/// Index range [first, last) into a time-sorted array.
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const { return last - first; }
    bool empty() const { return first == last; }
};

/// Events with t in the closed interval [t_lo, t_hi]. Binary search; the
/// stream must be time-sorted.
IndexRange events_in_window(const EventStream& stream, TimeUs t_lo, TimeUs t_hi);

/// Annotations whose timestamp lies in the closed interval [t_lo, t_hi].
/// Input order is preserved; no sortedness requirement.
std::vector<Annotation> annotations_for_window(const std::vector<Annotation>& annotations,
                                               TimeUs t_lo, TimeUs t_hi);

/// Index of the frame whose timestamp is closest to t; ties resolve to the
/// earlier frame. Frames must be time-sorted. Empty input yields nullopt.
std::optional<std::size_t> nearest_frame(const std::vector<Frame>& frames, TimeUs t);

/// Nearest frame accepted only within +/- half_window_us of t.
std::optional<std::size_t> associate_frame(const std::vector<Frame>& frames, TimeUs t,
                                           TimeUs half_window_us);

constexpr TimeUs kDefaultFrameHalfWindowUs = 10'000;

} // namespace evtk
