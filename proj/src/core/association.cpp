#include "association.hpp"

#include <algorithm>
#include <cstdlib>

namespace evtk {

IndexRange events_in_window(const EventStream& stream, TimeUs t_lo, TimeUs t_hi) {
    if (t_lo > t_hi) return {};
    const auto begin = stream.events.begin();
    const auto end = stream.events.end();
    const auto lo = std::lower_bound(begin, end, t_lo,
                                     [](const Event& e, TimeUs t) { return e.t < t; });
    const auto hi = std::upper_bound(lo, end, t_hi,
                                     [](TimeUs t, const Event& e) { return t < e.t; });
    return {static_cast<std::size_t>(lo - begin), static_cast<std::size_t>(hi - begin)};
}

std::vector<Annotation> annotations_for_window(const std::vector<Annotation>& annotations,
                                               TimeUs t_lo, TimeUs t_hi) {
    std::vector<Annotation> out;
    for (const Annotation& a : annotations)
        if (a.t >= t_lo && a.t <= t_hi) out.push_back(a);
    return out;
}

std::optional<std::size_t> nearest_frame(const std::vector<Frame>& frames, TimeUs t) {
    if (frames.empty()) return std::nullopt;
    const auto it = std::lower_bound(frames.begin(), frames.end(), t,
                                     [](const Frame& f, TimeUs v) { return f.t < v; });
    if (it == frames.begin()) return 0;
    if (it == frames.end()) return frames.size() - 1;
    const std::size_t after = static_cast<std::size_t>(it - frames.begin());
    const std::size_t before = after - 1;
    const TimeUs d_before = t - frames[before].t;
    const TimeUs d_after = frames[after].t - t;
    return d_before <= d_after ? before : after; // tie goes to the earlier frame
}

std::optional<std::size_t> associate_frame(const std::vector<Frame>& frames, TimeUs t,
                                           TimeUs half_window_us) {
    const auto idx = nearest_frame(frames, t);
    if (!idx) return std::nullopt;
    const TimeUs dist = std::llabs(frames[*idx].t - t);
    if (dist > half_window_us) return std::nullopt;
    return idx;
}

} // namespace evtk
