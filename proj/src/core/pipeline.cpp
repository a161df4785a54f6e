#include "pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "association.hpp"
#include "error.hpp"
#include "fsio.hpp"
#include "png_io.hpp"
#include "synthgen.hpp"

namespace evtk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t dir_tag(const std::string& dir) {
    const std::string name = fs::path(dir).filename().string();
    std::uint32_t h = 2166136261u;
    for (unsigned char c : name) {
        h ^= c;
        h *= 16777619u;
    }
    return static_cast<std::int64_t>(h);
}

void convert_annotations(std::vector<Annotation>& annotations, BBoxOrigin origin, int height) {
    if (origin == BBoxOrigin::TopLeft) return;
    for (Annotation& a : annotations) a.bbox = convert_origin(a.bbox, origin, height);
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

json class_metrics_json(const ClassMetrics& m) {
    return {{"ap50", m.ap50},          {"ap50_95", m.ap5095}, {"f1", m.f1},
            {"precision", m.precision}, {"recall", m.recall},  {"gt", m.gt_count},
            {"detections", m.det_count}};
}

} // namespace

SequenceRecording load_sequence(const std::string& dir, BBoxOrigin origin) {
    SequenceRecording seq = read_recording(dir);
    convert_annotations(seq.annotations, origin, seq.geometry.height);
    if (seq.frame_annotations)
        convert_annotations(*seq.frame_annotations, origin, seq.geometry.height);
    return seq;
}

InspectReport inspect_sequence(const std::string& dir, BBoxOrigin origin) {
    const RecordingPaths paths = locate_recording(dir);
    if (paths.events.empty())
        raise(ErrorCode::IoFailure, "no events.h5 or events.evt under '" + dir + "'");

    const SequenceRecording seq = load_sequence(dir, origin);
    InspectReport r;
    r.dir = dir;
    r.width = seq.geometry.width;
    r.height = seq.geometry.height;
    r.event_count = seq.events.size();
    if (!seq.events.empty()) {
        r.t_first = seq.events.events.front().t;
        r.t_last = seq.events.events.back().t;
    }
    r.has_frames = !paths.frames.empty();
    r.frame_count = seq.frames.size();
    if (seq.frames.size() >= 2) {
        const double span_s =
            static_cast<double>(seq.frames.back().t - seq.frames.front().t) / 1e6;
        if (span_s > 0.0) r.frame_rate_hz = static_cast<double>(seq.frames.size() - 1) / span_s;
    }
    r.has_labels = !paths.labels.empty();
    for (const Annotation& a : seq.annotations) {
        if (a.class_id == kClassCrack) ++r.crack_count;
        if (a.class_id == kClassSpall) ++r.spall_count;
    }
    r.frame_label_count = seq.frame_annotations ? seq.frame_annotations->size() : 0;
    r.validation = validate_sequence(seq);
    return r;
}

std::string inspect_to_json(const InspectReport& r) {
    json j;
    j["dir"] = r.dir;
    j["geometry"] = {{"width", r.width}, {"height", r.height}};
    j["events"] = {{"count", r.event_count},
                   {"t_first_us", r.t_first},
                   {"t_last_us", r.t_last},
                   {"duration_s",
                    r.event_count > 0 ? static_cast<double>(r.t_last - r.t_first) / 1e6 : 0.0}};
    j["frames"] = {{"present", r.has_frames},
                   {"count", r.frame_count},
                   {"rate_hz", r.frame_rate_hz}};
    j["annotations"] = {{"present", r.has_labels},
                        {"crack", r.crack_count},
                        {"spall", r.spall_count},
                        {"frame_labels", r.frame_label_count}};
    json violations = json::array();
    for (const Violation& v : r.validation.violations)
        violations.push_back({{"kind", violation_kind_name(v.kind)},
                              {"index", v.index},
                              {"message", v.message}});
    j["validation"] = {{"ok", r.validation.ok()}, {"violations", violations}};
    return j.dump(2);
}

std::string inspect_to_text(const InspectReport& r) {
    std::ostringstream os;
    os << r.dir << "\n";
    os << "  plane      " << r.width << " x " << r.height << "\n";
    os << "  events     " << r.event_count;
    if (r.event_count > 0)
        os << "  [" << r.t_first << ", " << r.t_last << "] us  ("
           << two_decimals(static_cast<double>(r.t_last - r.t_first) / 1e6) << " s)";
    os << "\n";
    os << "  frames     " << r.frame_count;
    if (r.frame_rate_hz > 0.0) os << "  (" << two_decimals(r.frame_rate_hz) << " Hz)";
    if (!r.has_frames) os << "  (no frames file)";
    os << "\n";
    os << "  labels     crack " << r.crack_count << ", spall " << r.spall_count;
    if (r.frame_label_count > 0) os << ", frame labels " << r.frame_label_count;
    if (!r.has_labels) os << "  (no label file)";
    os << "\n";
    if (r.validation.ok()) {
        os << "  validation ok\n";
    } else {
        os << "  validation " << r.validation.violations.size() << " violation(s)\n";
        for (const Violation& v : r.validation.violations)
            os << "    - " << violation_kind_name(v.kind) << ": " << v.message << "\n";
    }
    return os.str();
}

EncodeSequenceOutcome encode_sequence_dir(const std::string& seq_dir, const std::string& out_dir,
                                          const ToolConfig& cfg, std::uint64_t seed, bool verify) {
    const SequenceRecording seq = load_sequence(seq_dir, cfg.bbox_origin);

    EncodeSequenceOutcome outcome;
    outcome.source_dir = seq_dir;
    outcome.out_dir = out_dir;

    const auto start = Clock::now();
    const ExtractionResult result =
        extract_samples(seq, cfg.encoder, cfg.prep, seed, cfg.samples.lo, cfg.samples.hi,
                        dir_tag(seq_dir));
    outcome.elapsed_s = seconds_since(start);
    outcome.requested = result.requested;
    outcome.written = static_cast<int>(result.bundles.size());
    outcome.failures = result.failures;
    outcome.attempts = result.attempts;

    std::size_t encoded_events = 0;
    for (const SampleBundle& b : result.bundles)
        encoded_events += events_in_window(seq.events, b.t_min, b.t_max).size();
    if (outcome.elapsed_s > 0.0)
        outcome.events_per_second = static_cast<double>(encoded_events) / outcome.elapsed_s;

    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < result.bundles.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%03zu.npz", i);
        const std::string path = (fs::path(out_dir) / name).string();
        write_bundle(path, result.bundles[i]);
        outcome.bundle_files.push_back(path);
    }

    if (verify) {
        for (const std::string& file : outcome.bundle_files) {
            const SampleBundle bundle = read_bundle(file);
            for (const std::string& msg : verify_bundle(bundle, seq))
                outcome.verify_failures.push_back(file + ": " + msg);
        }
    }
    return outcome;
}

void write_encode_manifest(const std::string& path,
                           const std::vector<EncodeSequenceOutcome>& outcomes,
                           const ToolConfig& cfg, std::uint64_t seed, double total_s) {
    json j;
    j["command"] = "encode";
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["config"] = json::parse(config_to_json(cfg));
    j["seed"] = seed;
    j["timings"] = {{"total_s", total_s}};
    json seqs = json::array();
    for (const EncodeSequenceOutcome& o : outcomes) {
        json bundles = json::array();
        for (const std::string& f : o.bundle_files)
            bundles.push_back(fs::path(f).filename().string());
        seqs.push_back({{"source_dir", o.source_dir},
                        {"out_dir", o.out_dir},
                        {"requested", o.requested},
                        {"written", o.written},
                        {"failures", o.failures},
                        {"attempts", o.attempts},
                        {"elapsed_s", o.elapsed_s},
                        {"events_per_second", o.events_per_second},
                        {"bundles", bundles}});
    }
    j["sequences"] = seqs;
    const std::string text = j.dump(2) + "\n";
    atomic_write_file(path, text.data(), text.size());
}

GenerateOutcome generate_sequence_dir(const std::string& dir, const ToolConfig& cfg,
                                      std::uint64_t seed, bool flat_events) {
    const auto start = Clock::now();
    SensorGeometry geometry;
    SequenceRecording seq = render_sequence(cfg.pattern, cfg.motion, geometry, seed);

    // Written labels follow the configured convention so the directory is
    // self-consistent under the same config.
    if (cfg.bbox_origin == BBoxOrigin::BottomLeft)
        convert_annotations(seq.annotations, cfg.bbox_origin, geometry.height);

    write_recording(dir, seq, flat_events);

    GenerateOutcome outcome;
    outcome.dir = dir;
    outcome.event_count = seq.events.size();
    outcome.frame_count = seq.frames.size();
    outcome.annotation_count = seq.annotations.size();
    outcome.elapsed_s = seconds_since(start);

    json j;
    j["command"] = "gen";
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = seed;
    j["events"] = outcome.event_count;
    j["frames"] = outcome.frame_count;
    j["annotations"] = outcome.annotation_count;
    j["timings"] = {{"total_s", outcome.elapsed_s}};
    const std::string text = j.dump(2) + "\n";
    atomic_write_file((fs::path(dir) / "manifest.json").string(), text.data(), text.size());
    return outcome;
}

std::vector<Detection> read_detections_jsonl(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    std::vector<Detection> out;
    std::istringstream stream(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(ErrorCode::BadHeader,
                  path + ":" + std::to_string(line_no) + ": not valid JSON");
        try {
            Detection d;
            d.image_id = j.at("image_id").get<std::int64_t>();
            d.class_id = j.at("class_id").get<int>();
            const auto& box = j.at("bbox");
            if (!box.is_array() || box.size() != 4)
                raise(ErrorCode::WrongColumnCount,
                      path + ":" + std::to_string(line_no) + ": bbox must have 4 entries");
            d.bbox = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                      box[3].get<double>()};
            d.score = j.at("score").get<double>();
            if (!(d.score >= 0.0 && d.score <= 1.0))
                raise(ErrorCode::InvalidValue,
                      path + ":" + std::to_string(line_no) + ": score must lie in [0, 1]");
            out.push_back(d);
        } catch (const json::exception& e) {
            raise(ErrorCode::BadHeader,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_detections_jsonl(const std::string& path, const std::vector<Detection>& dets) {
    std::ostringstream os;
    for (const Detection& d : dets) {
        json j;
        j["image_id"] = d.image_id;
        j["class_id"] = d.class_id;
        j["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
        j["score"] = d.score;
        os << j.dump() << "\n";
    }
    const std::string text = os.str();
    atomic_write_file(path, text.data(), text.size());
}

std::vector<GroundTruth> load_ground_truth(const std::string& path, BBoxOrigin origin,
                                           int plane_height) {
    std::vector<GroundTruth> out;
    if (fs::path(path).extension() == ".npy") {
        std::vector<Annotation> annotations = read_labels(path);
        convert_annotations(annotations, origin, plane_height);
        return annotations_as_ground_truth(annotations);
    }
    for (const Detection& d : read_detections_jsonl(path)) {
        GroundTruth g;
        g.image_id = d.image_id;
        g.class_id = d.class_id;
        g.bbox = convert_origin(d.bbox, origin, plane_height);
        out.push_back(g);
    }
    return out;
}

EvalReport evaluate_paths(const std::string& gt_path, const std::string& det_path,
                          const ToolConfig& cfg) {
    SensorGeometry geometry;
    const auto gts = load_ground_truth(gt_path, cfg.bbox_origin, geometry.height);
    const auto dets = read_detections_jsonl(det_path);
    return evaluate(dets, gts, cfg.eval);
}

std::string eval_report_json(const EvalReport& report) {
    json j;
    j["options"] = {{"conf_threshold", report.options.conf_threshold},
                    {"nms_iou", report.options.nms_iou}};
    json classes;
    classes["all"] = class_metrics_json(report.all);
    const auto get = [&report](int cls) {
        const auto it = report.per_class.find(cls);
        return it == report.per_class.end() ? ClassMetrics{} : it->second;
    };
    classes["crack"] = class_metrics_json(get(kClassCrack));
    classes["spall"] = class_metrics_json(get(kClassSpall));
    j["classes"] = classes;
    return j.dump(2);
}

std::string eval_report_table(const EvalReport& report) {
    const auto get = [&report](int cls) {
        const auto it = report.per_class.find(cls);
        return it == report.per_class.end() ? ClassMetrics{} : it->second;
    };
    std::ostringstream os;
    os << "class   mAP@0.5  mAP@0.5:0.95  F1@0.5   precision  recall\n";
    const auto row = [&os](const char* name, const ClassMetrics& m) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-7s %7.4f  %12.4f  %7.4f  %9.4f  %7.4f\n", name, m.ap50,
                      m.ap5095, m.f1, m.precision, m.recall);
        os << buf;
    };
    row("All", report.all);
    row("Crack", get(kClassCrack));
    row("Spall", get(kClassSpall));
    return os.str();
}

void render_bundle_png(const std::string& bundle_path, const std::string& png_path) {
    const SampleBundle bundle = read_bundle(bundle_path);
    const int w = static_cast<int>(bundle.width);
    const int h = static_cast<int>(bundle.height);
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3, 0);

    auto clamp_u8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            double r = 0.0, g = 0.0, b = 0.0;
            if (bundle.frame) {
                const double gray = (*bundle.frame)[i] * 255.0 * 0.4;
                r = g = b = gray;
            }
            r += bundle.at(0, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) * 255.0;
            g += bundle.at(1, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) * 255.0;
            rgb[i * 3 + 0] = clamp_u8(r);
            rgb[i * 3 + 1] = clamp_u8(g);
            rgb[i * 3 + 2] = clamp_u8(b);
        }
    }

    // Outline each annotation; crack yellow, spall cyan.
    for (const Annotation& a : bundle.labels) {
        const int x0 = std::clamp(static_cast<int>(std::lround(a.bbox.x)), 0, w - 1);
        const int y0 = std::clamp(static_cast<int>(std::lround(a.bbox.y)), 0, h - 1);
        const int x1 = std::clamp(static_cast<int>(std::lround(a.bbox.x + a.bbox.w)) - 1, 0, w - 1);
        const int y1 = std::clamp(static_cast<int>(std::lround(a.bbox.y + a.bbox.h)) - 1, 0, h - 1);
        const std::uint8_t cr = 255;
        const std::uint8_t cg = 255;
        const std::uint8_t cb = a.class_id == kClassSpall ? 255 : 0;
        const std::uint8_t rr = a.class_id == kClassSpall ? 0 : cr;
        auto paint = [&](int x, int y) {
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            rgb[i + 0] = rr;
            rgb[i + 1] = cg;
            rgb[i + 2] = cb;
        };
        for (int x = x0; x <= x1; ++x) {
            paint(x, y0);
            paint(x, y1);
        }
        for (int y = y0; y <= y1; ++y) {
            paint(x0, y);
            paint(x1, y);
        }
    }
    write_png_rgb(png_path, w, h, rgb);
}

VerifyOutcome verify_encode_dir(const std::string& out_dir, BBoxOrigin origin) {
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    if (!file_exists(manifest_path))
        raise(ErrorCode::IoFailure, "no manifest.json under '" + out_dir + "'");
    const auto bytes = read_file_bytes(manifest_path);
    json j = json::parse(std::string(bytes.begin(), bytes.end()), nullptr, false);
    if (j.is_discarded() || !j.contains("sequences"))
        raise(ErrorCode::BadHeader, "'" + manifest_path + "' is not an encode manifest");

    VerifyOutcome outcome;
    for (const json& seq_entry : j.at("sequences")) {
        const std::string source_dir = seq_entry.at("source_dir").get<std::string>();
        const std::string bundle_dir = seq_entry.at("out_dir").get<std::string>();
        const SequenceRecording seq = load_sequence(source_dir, origin);
        for (const json& bundle_name : seq_entry.at("bundles")) {
            const std::string file =
                (fs::path(bundle_dir) / bundle_name.get<std::string>()).string();
            const SampleBundle bundle = read_bundle(file);
            ++outcome.bundles_checked;
            for (const std::string& msg : verify_bundle(bundle, seq))
                outcome.failures.push_back(file + ": " + msg);
        }
    }
    return outcome;
}

} // namespace evtk
