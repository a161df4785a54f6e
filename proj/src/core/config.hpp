#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "encoding.hpp"
#include "frame_prep.hpp"
#include "metrics.hpp"
#include "synthgen.hpp"

namespace evtk {

/// One JSON config document drives the whole tool. Sections: encoder, prep,
/// scene, eval, samples; top-level keys bbox_origin and lighting. Every
/// field has a default, so an empty document is valid.

enum class BBoxOrigin { TopLeft, BottomLeft };

struct SampleCountRange {
    int lo = 10;
    int hi = 15;
};

struct ToolConfig {
    EncoderConfig encoder;
    PrepConfig prep;
    ScenePattern pattern;
    MotionSpec motion;
    EvalOptions eval;
    SampleCountRange samples;
    BBoxOrigin bbox_origin = BBoxOrigin::TopLeft;
    std::string lighting = "well_lit"; // well_lit | low_light
    bool T_th_explicit = false;        // T_th_ms given directly, lighting default not applied
};

ToolConfig default_config();

/// Parses the JSON document; unknown keys are rejected so typos surface.
ToolConfig parse_config(const std::string& json_text);

ToolConfig load_config_file(const std::string& path);

/// Applies one "section.key=value" (or "key=value" top-level) override on
/// top of an already-parsed config.
void apply_override(ToolConfig& cfg, const std::string& assignment);

/// Canonical full-document serialization (every field present, sorted keys).
std::string config_to_json(const ToolConfig& cfg);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const ToolConfig& cfg);

/// Box convention conversion at dataset boundaries: bottom-left-origin rows
/// become the internal top-left convention (y' = H - y - h) and vice versa
/// (the mapping is its own inverse).
BBox convert_origin(const BBox& box, BBoxOrigin origin, int plane_height);

} // namespace evtk
