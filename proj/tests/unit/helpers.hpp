#pragma once

// Shared fixtures for the test binaries.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

// Asserts that expr raises the given toolkit error code.
#define CHECK_RAISES(code_, expr)                                                              \
    do {                                                                                       \
        bool raised_ = false;                                                                  \
        try {                                                                                  \
            (void)(expr);                                                                      \
        } catch (const evtk::Error& e_) {                                                      \
            raised_ = true;                                                                    \
            CHECK(e_.code() == (code_));                                                       \
        }                                                                                      \
        CHECK_MESSAGE(raised_, "expected a raised error from: " #expr);                        \
    } while (0)

namespace testutil {

// Self-cleaning directory under the system temp root.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("evtk_test_" + tag + "_" + std::to_string(counter()++) + "_" +
                std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
};

// Sorted random events over the full plane, timestamps in [t0, t0 + span].
inline evtk::EventStream random_stream(evtk::Rng& rng, std::size_t n,
                                       evtk::SensorGeometry geom = {}, evtk::TimeUs t0 = 0,
                                       evtk::TimeUs span = 1'000'000) {
    std::vector<evtk::TimeUs> ts(n);
    for (auto& t : ts) t = t0 + rng.uniform_int(0, span);
    std::sort(ts.begin(), ts.end());

    evtk::EventStream s;
    s.geometry = geom;
    s.events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        evtk::Event e;
        e.t = ts[i];
        e.x = static_cast<std::uint16_t>(rng.uniform_int(0, geom.width - 1));
        e.y = static_cast<std::uint16_t>(rng.uniform_int(0, geom.height - 1));
        e.p = rng.uniform_int(0, 1) ? evtk::Polarity::Positive : evtk::Polarity::Negative;
        s.events.push_back(e);
    }
    return s;
}

} // namespace testutil
