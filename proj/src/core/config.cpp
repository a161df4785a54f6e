#include "config.hpp"

#include <json.hpp>

#include <cstdio>
#include <set>

#include "error.hpp"
#include "fsio.hpp"

namespace evtk {
namespace {

using nlohmann::json;

double lighting_T_th(const std::string& lighting) {
    if (lighting == "well_lit") return 15.0;
    if (lighting == "low_light") return 30.0;
    raise(ErrorCode::BadConfig, "lighting must be well_lit or low_light, got '" + lighting + "'");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            raise(ErrorCode::BadConfig, "unknown config key '" + where + key + "'");
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        raise(ErrorCode::BadConfig, std::string("config key '") + key + "' has the wrong type");
    }
}

ToolConfig parse_json(const json& j) {
    if (!j.is_object()) raise(ErrorCode::BadConfig, "config document must be a JSON object");
    reject_unknown_keys(j, {"encoder", "prep", "scene", "eval", "samples", "bbox_origin",
                            "lighting"},
                        "");

    ToolConfig cfg;

    if (j.contains("lighting")) cfg.lighting = j.at("lighting").get<std::string>();
    lighting_T_th(cfg.lighting); // validates the value

    if (j.contains("bbox_origin")) {
        const auto origin = j.at("bbox_origin").get<std::string>();
        if (origin == "top_left")
            cfg.bbox_origin = BBoxOrigin::TopLeft;
        else if (origin == "bottom_left")
            cfg.bbox_origin = BBoxOrigin::BottomLeft;
        else
            raise(ErrorCode::BadConfig, "bbox_origin must be top_left or bottom_left");
    }

    if (j.contains("encoder")) {
        const json& e = j.at("encoder");
        reject_unknown_keys(e,
                            {"mode", "T_th_ms", "A_th", "q", "grid_m", "grid_n", "count_n",
                             "cell_threshold", "half_window_ms", "per_channel_norm"},
                            "encoder.");
        if (e.contains("mode"))
            cfg.encoder.mode = encoder_mode_from_name(e.at("mode").get<std::string>());
        cfg.T_th_explicit = e.contains("T_th_ms");
        read_field(e, "T_th_ms", cfg.encoder.T_th_ms);
        read_field(e, "A_th", cfg.encoder.A_th);
        read_field(e, "q", cfg.encoder.q);
        read_field(e, "grid_m", cfg.encoder.grid_m);
        read_field(e, "grid_n", cfg.encoder.grid_n);
        read_field(e, "count_n", cfg.encoder.count_n);
        read_field(e, "cell_threshold", cfg.encoder.cell_threshold);
        read_field(e, "half_window_ms", cfg.encoder.half_window_ms);
        read_field(e, "per_channel_norm", cfg.encoder.per_channel_norm);
    }
    if (!cfg.T_th_explicit) cfg.encoder.T_th_ms = lighting_T_th(cfg.lighting);

    if (j.contains("prep")) {
        const json& p = j.at("prep");
        reject_unknown_keys(p,
                            {"clahe_tiles_x", "clahe_tiles_y", "clahe_clip_limit", "target_size",
                             "frame_pad_value", "hist_pad_value"},
                            "prep.");
        read_field(p, "clahe_tiles_x", cfg.prep.clahe_tiles_x);
        read_field(p, "clahe_tiles_y", cfg.prep.clahe_tiles_y);
        read_field(p, "clahe_clip_limit", cfg.prep.clahe_clip_limit);
        read_field(p, "target_size", cfg.prep.target_size);
        read_field(p, "frame_pad_value", cfg.prep.frame_pad_value);
        read_field(p, "hist_pad_value", cfg.prep.hist_pad_value);
    }

    if (j.contains("scene")) {
        const json& s = j.at("scene");
        reject_unknown_keys(s,
                            {"kind", "fg", "bg", "extent_w", "extent_h", "start_x", "start_y",
                             "detail_seed", "class_id", "vx", "vy", "duration_s", "frame_rate_hz",
                             "contrast", "annotation_rate_hz", "noise_rate_hz"},
                            "scene.");
        if (s.contains("kind"))
            cfg.pattern.kind = pattern_kind_from_name(s.at("kind").get<std::string>());
        read_field(s, "fg", cfg.pattern.fg);
        read_field(s, "bg", cfg.pattern.bg);
        read_field(s, "extent_w", cfg.pattern.extent_w);
        read_field(s, "extent_h", cfg.pattern.extent_h);
        read_field(s, "start_x", cfg.pattern.start_x);
        read_field(s, "start_y", cfg.pattern.start_y);
        read_field(s, "detail_seed", cfg.pattern.detail_seed);
        read_field(s, "class_id", cfg.pattern.class_id);
        read_field(s, "vx", cfg.motion.vx);
        read_field(s, "vy", cfg.motion.vy);
        read_field(s, "duration_s", cfg.motion.duration_s);
        read_field(s, "frame_rate_hz", cfg.motion.frame_rate_hz);
        read_field(s, "contrast", cfg.motion.contrast);
        read_field(s, "annotation_rate_hz", cfg.motion.annotation_rate_hz);
        read_field(s, "noise_rate_hz", cfg.motion.noise_rate_hz);
    }

    if (j.contains("eval")) {
        const json& e = j.at("eval");
        reject_unknown_keys(e, {"conf_threshold", "nms_iou"}, "eval.");
        read_field(e, "conf_threshold", cfg.eval.conf_threshold);
        read_field(e, "nms_iou", cfg.eval.nms_iou);
    }

    if (j.contains("samples")) {
        const json& s = j.at("samples");
        reject_unknown_keys(s, {"count_lo", "count_hi"}, "samples.");
        read_field(s, "count_lo", cfg.samples.lo);
        read_field(s, "count_hi", cfg.samples.hi);
    }

    return cfg;
}

json to_json_full(const ToolConfig& cfg) {
    json j;
    j["lighting"] = cfg.lighting;
    j["bbox_origin"] = cfg.bbox_origin == BBoxOrigin::TopLeft ? "top_left" : "bottom_left";
    j["encoder"] = {{"mode", encoder_mode_name(cfg.encoder.mode)},
                    {"T_th_ms", cfg.encoder.T_th_ms},
                    {"A_th", cfg.encoder.A_th},
                    {"q", cfg.encoder.q},
                    {"grid_m", cfg.encoder.grid_m},
                    {"grid_n", cfg.encoder.grid_n},
                    {"count_n", cfg.encoder.count_n},
                    {"cell_threshold", cfg.encoder.cell_threshold},
                    {"half_window_ms", cfg.encoder.half_window_ms},
                    {"per_channel_norm", cfg.encoder.per_channel_norm}};
    j["prep"] = {{"clahe_tiles_x", cfg.prep.clahe_tiles_x},
                 {"clahe_tiles_y", cfg.prep.clahe_tiles_y},
                 {"clahe_clip_limit", cfg.prep.clahe_clip_limit},
                 {"target_size", cfg.prep.target_size},
                 {"frame_pad_value", cfg.prep.frame_pad_value},
                 {"hist_pad_value", cfg.prep.hist_pad_value}};
    j["scene"] = {{"kind", pattern_kind_name(cfg.pattern.kind)},
                  {"fg", cfg.pattern.fg},
                  {"bg", cfg.pattern.bg},
                  {"extent_w", cfg.pattern.extent_w},
                  {"extent_h", cfg.pattern.extent_h},
                  {"start_x", cfg.pattern.start_x},
                  {"start_y", cfg.pattern.start_y},
                  {"detail_seed", cfg.pattern.detail_seed},
                  {"class_id", cfg.pattern.class_id},
                  {"vx", cfg.motion.vx},
                  {"vy", cfg.motion.vy},
                  {"duration_s", cfg.motion.duration_s},
                  {"frame_rate_hz", cfg.motion.frame_rate_hz},
                  {"contrast", cfg.motion.contrast},
                  {"annotation_rate_hz", cfg.motion.annotation_rate_hz},
                  {"noise_rate_hz", cfg.motion.noise_rate_hz}};
    j["eval"] = {{"conf_threshold", cfg.eval.conf_threshold}, {"nms_iou", cfg.eval.nms_iou}};
    j["samples"] = {{"count_lo", cfg.samples.lo}, {"count_hi", cfg.samples.hi}};
    return j;
}

} // namespace

ToolConfig default_config() { return {}; }

ToolConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::BadConfig, "config document is not valid JSON");
    return parse_json(j);
}

ToolConfig load_config_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return parse_config(std::string(bytes.begin(), bytes.end()));
}

void apply_override(ToolConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        raise(ErrorCode::BadConfig, "override must look like section.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text; // bare words are strings

    json j = to_json_full(cfg);
    if (!cfg.T_th_explicit) j["encoder"].erase("T_th_ms"); // stay lighting-derived

    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        j[path] = value;
    } else {
        const std::string section = path.substr(0, dot);
        const std::string key = path.substr(dot + 1);
        if (key.empty() || key.find('.') != std::string::npos)
            raise(ErrorCode::BadConfig, "override path must be key or section.key");
        j[section][key] = value;
    }
    cfg = parse_json(j);
}

std::string config_to_json(const ToolConfig& cfg) { return to_json_full(cfg).dump(2); }

std::string config_hash(const ToolConfig& cfg) {
    const std::string text = to_json_full(cfg).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BBox convert_origin(const BBox& box, BBoxOrigin origin, int plane_height) {
    if (origin == BBoxOrigin::TopLeft) return box;
    return {box.x, static_cast<double>(plane_height) - box.y - box.h, box.w, box.h};
}

} // namespace evtk
