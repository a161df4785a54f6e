#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "containers.hpp"
#include "encoding.hpp"
#include "frame_prep.hpp"
#include "types.hpp"

namespace evtk {

/// Benchmark-sample extraction: random anchors, one encoded histogram per
/// anchor, the annotations active in its window, and the nearest frame when
/// one lies within the association half-window.

struct ExtractionResult {
    std::vector<SampleBundle> bundles;
    int requested = 0; // target bundle count drawn from [count_lo, count_hi]
    int attempts = 0;
    int failures = 0;  // encode attempts rejected by the selector
};

/// Draws a target count in [count_lo, count_hi], then samples anchor events
/// uniformly (away from the stream edges by min(64*q, half the stream))
/// until the target is met or the retry budget runs out. Raises
/// NeverSatisfied when not a single anchor yields a volume. Deterministic
/// for fixed (sequence, configs, seed). Frames attached to a bundle are
/// contrast-corrected and scaled to [0, 1].
ExtractionResult extract_samples(const SequenceRecording& seq, const EncoderConfig& encoder,
                                 const PrepConfig& prep, std::uint64_t seed,
                                 int count_lo = 10, int count_hi = 15,
                                 std::int64_t seq_id = 0);

/// Re-derives every checkable postcondition of a bundle against its source
/// sequence: histogram channel sums and bin counts, window coverage,
/// annotation membership, frame association, and for the adaptive mode the
/// duration and cell-excess thresholds. Returns human-readable failure
/// descriptions (empty = clean).
std::vector<std::string> verify_bundle(const SampleBundle& bundle, const SequenceRecording& seq);

} // namespace evtk
