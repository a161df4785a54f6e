#include <doctest.h>

#include <cstdint>
#include <vector>

#include "core/encoding.hpp"
#include "core/error.hpp"
#include "core/frame_prep.hpp"
#include "core/sampling.hpp"
#include "core/types.hpp"
#include "helpers.hpp"

using namespace evtk;

namespace {

// Dense burst confined to grid cell (0, 0) so the adaptive selector succeeds
// from any interior anchor, with frames every 20 ms and a few annotations.
SequenceRecording sampling_fixture() {
    SequenceRecording seq;
    seq.geometry = {64, 48};
    seq.events.geometry = seq.geometry;

    const std::size_t n = 20000;
    seq.events.events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Event e;
        e.t = TimeUs(i) * 50;
        e.x = std::uint16_t(i % 16);
        e.y = std::uint16_t(i % 12);
        e.p = i % 2 ? Polarity::Positive : Polarity::Negative;
        seq.events.events.push_back(e);
    }

    for (TimeUs t = 0; t <= 1'000'000; t += 20'000) {
        Frame f;
        f.t = t;
        f.width = seq.geometry.width;
        f.height = seq.geometry.height;
        f.pixels.resize(seq.geometry.pixel_count());
        for (std::size_t i = 0; i < f.pixels.size(); ++i)
            f.pixels[i] = std::uint8_t((i + t / 20'000) % 256);
        seq.frames.push_back(std::move(f));
    }

    // 15 ms apart: narrower than any adaptive window here, so every bundle
    // carries at least one label.
    for (TimeUs t = 100'000; t <= 900'000; t += 15'000) {
        const int cls = (t / 15'000) % 2 ? kClassSpall : kClassCrack;
        seq.annotations.push_back({t, cls, {5.0 + double(t % 7), 5.0, 10.0, 8.0}});
    }
    return seq;
}

} // namespace

TEST_SUITE("sampling") {

TEST_CASE("extraction yields verified bundles within the requested range") {
    const auto seq = sampling_fixture();
    EncoderConfig encoder; // adaptive defaults
    PrepConfig prep;

    auto result = extract_samples(seq, encoder, prep, 77);
    CHECK(result.requested >= 10);
    CHECK(result.requested <= 15);
    CHECK(int(result.bundles.size()) == result.requested);
    CHECK(result.attempts >= result.requested);

    for (const auto& b : result.bundles) {
        const auto failures = verify_bundle(b, seq);
        CAPTURE(b.anchor_id);
        for (const auto& f : failures) MESSAGE(f);
        CHECK(failures.empty());

        CHECK(b.width == 64);
        CHECK(b.height == 48);
        CHECK(b.hist.size() == 2 * 64 * 48);
        CHECK(b.mode == int(EncoderMode::Adaptive));
        CHECK(b.seq_id == 0);
        // Frames sit 20 ms apart, so every anchor associates one.
        REQUIRE(b.frame.has_value());
        CHECK(b.frame->size() == seq.geometry.pixel_count());
        CHECK(b.frame_t % 20'000 == 0);
        for (double v : *b.frame) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("extraction is a pure function of sequence, configs, and seed") {
    const auto seq = sampling_fixture();
    EncoderConfig encoder;
    PrepConfig prep;

    auto a = extract_samples(seq, encoder, prep, 123, 10, 15, 5);
    auto b = extract_samples(seq, encoder, prep, 123, 10, 15, 5);
    CHECK(a.requested == b.requested);
    CHECK(a.attempts == b.attempts);
    REQUIRE(a.bundles.size() == b.bundles.size());
    for (std::size_t i = 0; i < a.bundles.size(); ++i) {
        CHECK(a.bundles[i].anchor_id == b.bundles[i].anchor_id);
        CHECK(a.bundles[i].t_min == b.bundles[i].t_min);
        CHECK(a.bundles[i].t_max == b.bundles[i].t_max);
        CHECK(a.bundles[i].hist == b.bundles[i].hist);
        CHECK(a.bundles[i].frame == b.bundles[i].frame);
        CHECK(a.bundles[i].seq_id == 5);
    }

    auto c = extract_samples(seq, encoder, prep, 124, 10, 15, 5);
    std::vector<std::int64_t> anchors_a, anchors_c;
    for (const auto& x : a.bundles) anchors_a.push_back(x.anchor_id);
    for (const auto& x : c.bundles) anchors_c.push_back(x.anchor_id);
    CHECK(anchors_a != anchors_c);
}

TEST_CASE("an unreachable excess threshold raises after the retry budget") {
    const auto seq = sampling_fixture();
    EncoderConfig encoder;
    encoder.A_th = 1e12; // no cell can ever exceed this
    PrepConfig prep;

    try {
        extract_samples(seq, encoder, prep, 9);
        FAIL("expected the extraction to raise");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NeverSatisfied);
    }
}

TEST_CASE("extraction rejects malformed requests") {
    const auto seq = sampling_fixture();
    EncoderConfig encoder;
    PrepConfig prep;

    CHECK_RAISES(ErrorCode::BadConfig, extract_samples(seq, encoder, prep, 1, 0, 5));
    CHECK_RAISES(ErrorCode::BadConfig, extract_samples(seq, encoder, prep, 1, 8, 3));

    SequenceRecording empty;
    empty.geometry = seq.geometry;
    empty.events.geometry = seq.geometry;
    CHECK_RAISES(ErrorCode::EmptyWindow, extract_samples(empty, encoder, prep, 1));

    auto broken = seq;
    std::swap(broken.events.events[10].t, broken.events.events[11].t);
    broken.events.events[10].t += 100; // force an inversion
    CHECK_RAISES(ErrorCode::InvalidValue, extract_samples(broken, encoder, prep, 1));
}

TEST_CASE("a frameless sequence yields frameless bundles that still verify") {
    auto seq = sampling_fixture();
    seq.frames.clear();
    EncoderConfig encoder;
    PrepConfig prep;

    auto result = extract_samples(seq, encoder, prep, 31);
    REQUIRE(!result.bundles.empty());
    for (const auto& b : result.bundles) {
        CHECK(!b.frame.has_value());
        CHECK(b.frame_t == -1);
        CHECK(verify_bundle(b, seq).empty());
    }
}

TEST_CASE("verification catches tampering") {
    const auto seq = sampling_fixture();
    EncoderConfig encoder;
    PrepConfig prep;
    auto result = extract_samples(seq, encoder, prep, 55);
    REQUIRE(!result.bundles.empty());
    const SampleBundle good = result.bundles.front();
    REQUIRE(verify_bundle(good, seq).empty());

    SUBCASE("edited histogram bin") {
        auto b = good;
        b.hist[b.hist.size() / 2] += 0.25;
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("shifted window") {
        auto b = good;
        b.t_max += 1;
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("swapped anchor") {
        auto b = good;
        b.anchor_id += 500;
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("anchor out of range") {
        auto b = good;
        b.anchor_id = std::int64_t(seq.events.size());
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("dropped annotations") {
        auto b = good;
        REQUIRE(!b.labels.empty()); // adaptive windows here are ~100 ms wide
        b.labels.clear();
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("forged frame timestamp") {
        auto b = good;
        b.frame_t += 20'000;
        CHECK(!verify_bundle(b, seq).empty());
    }
    SUBCASE("detached frame") {
        auto b = good;
        b.frame.reset();
        b.frame_t = -1;
        CHECK(!verify_bundle(b, seq).empty());
    }
}

} // TEST_SUITE("sampling")
