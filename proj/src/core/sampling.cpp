#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "association.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace evtk {
namespace {

SampleBundle make_bundle(const SequenceRecording& seq, const EventVolume& volume,
                         const NormalizedHistogram& hist, const EncoderConfig& encoder,
                         const PrepConfig& prep, std::size_t anchor, std::int64_t seq_id) {
    SampleBundle b;
    b.height = static_cast<std::size_t>(seq.geometry.height);
    b.width = static_cast<std::size_t>(seq.geometry.width);
    b.hist = hist.values;
    b.t_min = volume.window.t_min;
    b.t_max = volume.window.t_max;
    b.mode = static_cast<int>(encoder.mode);
    b.T_th_ms = encoder.T_th_ms;
    b.A_th = encoder.A_th;
    b.q = encoder.q;
    b.grid_m = encoder.grid_m;
    b.grid_n = encoder.grid_n;
    b.half_window_ms = encoder.half_window_ms;
    b.clip_sigma = hist.clip_sigma;
    b.seq_id = seq_id;
    b.anchor_id = static_cast<std::int64_t>(anchor);
    b.per_channel_norm = encoder.per_channel_norm;

    b.labels = annotations_for_window(seq.annotations, b.t_min, b.t_max);

    const TimeUs anchor_t = seq.events.events[anchor].t;
    const TimeUs half_us = ms_to_us(encoder.half_window_ms);
    if (const auto frame_idx = associate_frame(seq.frames, anchor_t, half_us)) {
        const Frame corrected = clahe(seq.frames[*frame_idx], prep);
        b.frame = normalize_unit(corrected).pixels;
        b.frame_t = seq.frames[*frame_idx].t;
    }
    return b;
}

EncoderConfig bundle_config(const SampleBundle& b) {
    EncoderConfig cfg;
    cfg.mode = static_cast<EncoderMode>(b.mode);
    cfg.T_th_ms = b.T_th_ms;
    cfg.A_th = b.A_th;
    cfg.q = b.q;
    cfg.grid_m = b.grid_m;
    cfg.grid_n = b.grid_n;
    cfg.half_window_ms = b.half_window_ms;
    cfg.per_channel_norm = b.per_channel_norm;
    return cfg;
}

} // namespace

ExtractionResult extract_samples(const SequenceRecording& seq, const EncoderConfig& encoder,
                                 const PrepConfig& prep, std::uint64_t seed, int count_lo,
                                 int count_hi, std::int64_t seq_id) {
    check_encoder_config(encoder, seq.geometry);
    check_prep_config(prep);
    if (count_lo < 1 || count_hi < count_lo)
        raise(ErrorCode::BadConfig, "sample count range must satisfy 1 <= lo <= hi");
    if (seq.events.empty())
        raise(ErrorCode::EmptyWindow, "sequence has no events to anchor on");
    {
        const ValidationReport report = validate_sequence(seq);
        if (!report.ok())
            raise(ErrorCode::InvalidValue,
                  "sequence fails validation: " + report.violations.front().message);
    }

    const std::size_t n = seq.events.size();
    const std::size_t edge = static_cast<std::size_t>(encoder.q) * 64;
    const std::size_t margin = std::min(edge, (n - 1) / 2);
    const std::size_t anchor_lo = margin;
    const std::size_t anchor_hi = n - 1 - margin;

    Rng rng(seed);
    ExtractionResult result;
    result.requested = static_cast<int>(rng.uniform_int(count_lo, count_hi));

    const int budget = result.requested * 20;
    while (static_cast<int>(result.bundles.size()) < result.requested &&
           result.attempts < budget) {
        ++result.attempts;
        const auto anchor = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(anchor_lo),
                            static_cast<std::int64_t>(anchor_hi)));
        try {
            const EventVolume volume = select_volume(seq.events, anchor, encoder);
            const NormalizedHistogram hist =
                clip_and_normalize(build_histogram(seq.events, volume), encoder.per_channel_norm);
            result.bundles.push_back(
                make_bundle(seq, volume, hist, encoder, prep, anchor, seq_id));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NeverSatisfied || e.code() == ErrorCode::EmptyWindow)
                ++result.failures;
            else
                throw;
        }
    }

    if (result.bundles.empty())
        raise(ErrorCode::NeverSatisfied,
              "no anchor produced a valid volume in " + std::to_string(result.attempts) +
                  " attempts");
    return result;
}

std::vector<std::string> verify_bundle(const SampleBundle& bundle, const SequenceRecording& seq) {
    std::vector<std::string> failures;
    auto fail = [&failures](const std::string& msg) { failures.push_back(msg); };

    if (bundle.t_min > bundle.t_max) fail("window is inverted");
    if (bundle.hist.size() != 2 * bundle.height * bundle.width)
        fail("histogram size does not match its plane");
    if (static_cast<int>(bundle.width) != seq.geometry.width ||
        static_cast<int>(bundle.height) != seq.geometry.height)
        fail("bundle plane does not match the sequence geometry");

    double peak = 0.0;
    bool in_range = true;
    for (double v : bundle.hist) {
        peak = std::max(peak, v);
        if (v < 0.0 || v > 1.0) in_range = false;
    }
    if (!in_range) fail("histogram values leave [0, 1]");
    if (peak != 0.0 && peak != 1.0) fail("nonzero histogram whose maximum is not 1");

    for (const Annotation& a : bundle.labels)
        if (a.t < bundle.t_min || a.t > bundle.t_max) {
            fail("annotation timestamp outside the window");
            break;
        }
    const auto expected_labels =
        annotations_for_window(seq.annotations, bundle.t_min, bundle.t_max);
    if (expected_labels.size() != bundle.labels.size())
        fail("annotation set does not match a fresh window query");

    if (bundle.anchor_id < 0 ||
        static_cast<std::size_t>(bundle.anchor_id) >= seq.events.size()) {
        fail("anchor index missing or out of range");
        return failures;
    }

    const EncoderConfig cfg = bundle_config(bundle);
    const auto anchor = static_cast<std::size_t>(bundle.anchor_id);
    EventVolume volume;
    try {
        volume = select_volume(seq.events, anchor, cfg);
    } catch (const Error& e) {
        fail(std::string("selection no longer succeeds: ") + e.what());
        return failures;
    }

    if (volume.window.t_min != bundle.t_min || volume.window.t_max != bundle.t_max)
        fail("re-selected window differs from the stored one");

    const Histogram2C h = build_histogram(seq.events, volume);
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = volume.range.first; i < volume.range.last; ++i)
        (seq.events.events[i].p == Polarity::Positive ? pos : neg) += 1;
    if (h.sum_pos() != pos || h.sum_neg() != neg)
        fail("histogram channel sums do not equal the per-polarity event counts");

    const NormalizedHistogram fresh = clip_and_normalize(h, bundle.per_channel_norm);
    if (fresh.values.size() != bundle.hist.size() ||
        !std::equal(fresh.values.begin(), fresh.values.end(), bundle.hist.begin()))
        fail("re-encoded histogram differs from the stored array");

    if (cfg.mode == EncoderMode::Adaptive) {
        const double duration_us =
            static_cast<double>(volume.window.t_max - volume.window.t_min);
        if (!(duration_us > cfg.T_th_ms * 1000.0))
            fail("adaptive window does not exceed the duration threshold");
        const GridSummary g = grid_summary(seq.events, volume.range, cfg.grid_m, cfg.grid_n);
        if (!(g.max_excess > cfg.A_th))
            fail("adaptive window does not exceed the cell-excess threshold");
    }

    const TimeUs anchor_t = seq.events.events[anchor].t;
    const auto frame_idx = associate_frame(seq.frames, anchor_t, ms_to_us(bundle.half_window_ms));
    const TimeUs expected_frame_t = frame_idx ? seq.frames[*frame_idx].t : -1;
    if (expected_frame_t != bundle.frame_t)
        fail("frame association does not reproduce the stored frame timestamp");
    if (bundle.frame.has_value() != (frame_idx.has_value()))
        fail("frame presence does not match the association rule");

    return failures;
}

} // namespace evtk
