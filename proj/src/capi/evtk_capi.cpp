#include "evtk.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/pipeline.hpp"
#include "core/types.hpp"

using nlohmann::json;

namespace {

thread_local std::string t_last_error;

const char* status_names[] = {
    "ok",
    "io_failure",
    "missing_dataset",
    "bad_shape",
    "bad_header",
    "wrong_column_count",
    "unknown_class_id",
    "unsorted_timestamps",
    "coordinate_out_of_bounds",
    "invalid_value",
    "missing_required_array",
    "empty_window",
    "never_satisfied",
    "degenerate_box",
    "bad_config",
    "invalid_argument",
    "internal_error",
};

evtk_status map_code(evtk::ErrorCode code) {
    switch (code) {
    case evtk::ErrorCode::IoFailure: return EVTK_ERR_IO;
    case evtk::ErrorCode::MissingDataset: return EVTK_ERR_MISSING_DATASET;
    case evtk::ErrorCode::BadShape: return EVTK_ERR_BAD_SHAPE;
    case evtk::ErrorCode::BadHeader: return EVTK_ERR_BAD_HEADER;
    case evtk::ErrorCode::WrongColumnCount: return EVTK_ERR_WRONG_COLUMNS;
    case evtk::ErrorCode::UnknownClassId: return EVTK_ERR_UNKNOWN_CLASS;
    case evtk::ErrorCode::UnsortedTimestamps: return EVTK_ERR_UNSORTED;
    case evtk::ErrorCode::CoordinateOutOfBounds: return EVTK_ERR_OUT_OF_BOUNDS;
    case evtk::ErrorCode::InvalidValue: return EVTK_ERR_INVALID_VALUE;
    case evtk::ErrorCode::MissingRequiredArray: return EVTK_ERR_MISSING_ARRAY;
    case evtk::ErrorCode::EmptyWindow: return EVTK_ERR_EMPTY_WINDOW;
    case evtk::ErrorCode::NeverSatisfied: return EVTK_ERR_NEVER_SATISFIED;
    case evtk::ErrorCode::DegenerateBox: return EVTK_ERR_DEGENERATE_BOX;
    case evtk::ErrorCode::BadConfig: return EVTK_ERR_BAD_CONFIG;
    }
    return EVTK_ERR_INTERNAL;
}

/// Runs fn, translating exceptions into status codes and the thread-local
/// message. Clears the message on success.
template <typename Fn> evtk_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return EVTK_OK;
    } catch (const evtk::Error& e) {
        t_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return EVTK_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown failure";
        return EVTK_ERR_INTERNAL;
    }
}

evtk_status arg_error(const char* message) {
    t_last_error = message;
    return EVTK_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

struct evtk_config {
    evtk::ToolConfig cfg;
};

struct evtk_sequence {
    evtk::SequenceRecording seq;
};

struct evtk_report {
    json payload;
    std::string text;
    bool ok = true;
};

extern "C" {

const char* evtk_version(void) { return evtk::kToolVersion; }

const char* evtk_status_name(evtk_status status) {
    int i = static_cast<int>(status);
    if (i < 0 || i >= static_cast<int>(sizeof(status_names) / sizeof(status_names[0])))
        return "unknown";
    return status_names[i];
}

const char* evtk_last_error(void) { return t_last_error.c_str(); }

void evtk_string_free(char* text) { delete[] text; }

// --- configuration --------------------------------------------------------

evtk_status evtk_config_create(evtk_config** out) {
    if (!out) return arg_error("out is null");
    return guarded([&] { *out = new evtk_config{evtk::default_config()}; });
}

evtk_status evtk_config_load(const char* path, evtk_config** out) {
    if (!path || !out) return arg_error("path/out is null");
    return guarded([&] { *out = new evtk_config{evtk::load_config_file(path)}; });
}

evtk_status evtk_config_parse(const char* json_text, evtk_config** out) {
    if (!json_text || !out) return arg_error("json_text/out is null");
    return guarded([&] { *out = new evtk_config{evtk::parse_config(json_text)}; });
}

evtk_status evtk_config_set(evtk_config* cfg, const char* assignment) {
    if (!cfg || !assignment) return arg_error("cfg/assignment is null");
    return guarded([&] { evtk::apply_override(cfg->cfg, assignment); });
}

evtk_status evtk_config_to_json(const evtk_config* cfg, char** out_text) {
    if (!cfg || !out_text) return arg_error("cfg/out_text is null");
    return guarded([&] { *out_text = copy_string(evtk::config_to_json(cfg->cfg)); });
}

evtk_status evtk_config_hash(const evtk_config* cfg, char** out_text) {
    if (!cfg || !out_text) return arg_error("cfg/out_text is null");
    return guarded([&] { *out_text = copy_string(evtk::config_hash(cfg->cfg)); });
}

void evtk_config_destroy(evtk_config* cfg) { delete cfg; }

// --- sequences ------------------------------------------------------------

evtk_status evtk_sequence_load(const char* dir, const evtk_config* cfg, evtk_sequence** out) {
    if (!dir || !out) return arg_error("dir/out is null");
    return guarded([&] {
        evtk::BBoxOrigin origin =
            cfg ? cfg->cfg.bbox_origin : evtk::BBoxOrigin::TopLeft;
        *out = new evtk_sequence{evtk::load_sequence(dir, origin)};
    });
}

evtk_status evtk_sequence_stats(const evtk_sequence* seq, uint64_t* event_count,
                                uint64_t* frame_count, uint64_t* annotation_count) {
    if (!seq) return arg_error("seq is null");
    if (event_count) *event_count = seq->seq.events.size();
    if (frame_count) *frame_count = seq->seq.frames.size();
    if (annotation_count) *annotation_count = seq->seq.annotations.size();
    t_last_error.clear();
    return EVTK_OK;
}

evtk_status evtk_sequence_validate(const evtk_sequence* seq, evtk_report** out) {
    if (!seq || !out) return arg_error("seq/out is null");
    return guarded([&] {
        evtk::ValidationReport v = evtk::validate_sequence(seq->seq);
        json items = json::array();
        std::string text;
        for (const evtk::Violation& violation : v.violations) {
            items.push_back({{"kind", evtk::violation_kind_name(violation.kind)},
                             {"index", violation.index},
                             {"message", violation.message}});
            text += std::string(evtk::violation_kind_name(violation.kind)) + " [" +
                    std::to_string(violation.index) + "]: " + violation.message + "\n";
        }
        if (v.ok()) text = "schema ok\n";
        auto* report = new evtk_report;
        report->payload = json{{"ok", v.ok()}, {"violations", items}};
        report->text = text;
        report->ok = v.ok();
        *out = report;
    });
}

void evtk_sequence_destroy(evtk_sequence* seq) { delete seq; }

// --- pipeline commands ----------------------------------------------------

evtk_status evtk_inspect(const char* seq_dir, const evtk_config* cfg, evtk_report** out) {
    if (!seq_dir || !out) return arg_error("seq_dir/out is null");
    return guarded([&] {
        evtk::BBoxOrigin origin =
            cfg ? cfg->cfg.bbox_origin : evtk::BBoxOrigin::TopLeft;
        evtk::InspectReport r = evtk::inspect_sequence(seq_dir, origin);
        auto* report = new evtk_report;
        report->payload = json::parse(evtk::inspect_to_json(r));
        report->text = evtk::inspect_to_text(r);
        report->ok = r.validation.ok();
        *out = report;
    });
}

evtk_status evtk_generate(const char* out_dir, const evtk_config* cfg, uint64_t seed,
                          int flat_events, evtk_report** out) {
    if (!out_dir || !out) return arg_error("out_dir/out is null");
    return guarded([&] {
        evtk::ToolConfig effective = cfg ? cfg->cfg : evtk::default_config();
        evtk::GenerateOutcome g =
            evtk::generate_sequence_dir(out_dir, effective, seed, flat_events != 0);
        auto* report = new evtk_report;
        report->payload = json{{"command", "gen"},
                               {"dir", g.dir},
                               {"seed", seed},
                               {"events", g.event_count},
                               {"frames", g.frame_count},
                               {"annotations", g.annotation_count},
                               {"elapsed_s", g.elapsed_s}};
        char line[256];
        std::snprintf(line, sizeof(line),
                      "wrote %zu events, %zu frames, %zu annotations to %s (%.2fs)\n",
                      g.event_count, g.frame_count, g.annotation_count, g.dir.c_str(),
                      g.elapsed_s);
        report->text = line;
        *out = report;
    });
}

namespace {

/// Unique output subdirectory names for a multi-sequence encode, in input
/// order: the directory basename, with "_N" appended on collision.
std::vector<std::string> encode_subdirs(const char* const* seq_dirs, size_t n) {
    std::vector<std::string> names;
    std::set<std::string> used;
    for (size_t i = 0; i < n; ++i) {
        std::filesystem::path p(seq_dirs[i]);
        std::string base = p.filename().string();
        if (base.empty() || base == ".") base = p.parent_path().filename().string();
        if (base.empty()) base = "seq";
        std::string name = base;
        for (int k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
        used.insert(name);
        names.push_back(name);
    }
    return names;
}

} // namespace

evtk_status evtk_encode(const char* const* seq_dirs, size_t dir_count, const char* out_dir,
                        const evtk_config* cfg, uint64_t seed, int verify, int jobs,
                        evtk_report** out) {
    if (!seq_dirs || dir_count == 0 || !out_dir || !out)
        return arg_error("seq_dirs/out_dir/out is null or empty");
    for (size_t i = 0; i < dir_count; ++i)
        if (!seq_dirs[i]) return arg_error("seq_dirs contains a null entry");
    return guarded([&] {
        evtk::ToolConfig effective = cfg ? cfg->cfg : evtk::default_config();
        std::vector<std::string> dirs(seq_dirs, seq_dirs + dir_count);
        std::vector<std::string> subs = encode_subdirs(seq_dirs, dir_count);
        std::vector<evtk::EncodeSequenceOutcome> outcomes(dir_count);
        std::vector<std::exception_ptr> errors(dir_count);

        auto started = std::chrono::steady_clock::now();
        auto run_one = [&](size_t i) {
            try {
                std::string dest = dir_count == 1
                                       ? std::string(out_dir)
                                       : (std::filesystem::path(out_dir) / subs[i]).string();
                outcomes[i] = evtk::encode_sequence_dir(dirs[i], dest, effective,
                                                        seed + i, verify != 0);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        };

        int workers = jobs < 1 ? 1 : jobs;
        if (static_cast<size_t>(workers) > dir_count) workers = static_cast<int>(dir_count);
        if (workers == 1) {
            for (size_t i = 0; i < dir_count; ++i) run_one(i);
        } else {
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (size_t i = next.fetch_add(1); i < dir_count; i = next.fetch_add(1))
                        run_one(i);
                });
            for (std::thread& t : pool) t.join();
        }
        for (size_t i = 0; i < dir_count; ++i)
            if (errors[i]) std::rethrow_exception(errors[i]);
        double total_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        std::string manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();
        evtk::write_encode_manifest(manifest_path, outcomes, effective, seed, total_s);

        auto* report = new evtk_report;
        json seq_items = json::array();
        std::string text;
        bool ok = true;
        for (const evtk::EncodeSequenceOutcome& o : outcomes) {
            seq_items.push_back({{"source_dir", o.source_dir},
                                 {"out_dir", o.out_dir},
                                 {"requested", o.requested},
                                 {"written", o.written},
                                 {"failures", o.failures},
                                 {"attempts", o.attempts},
                                 {"elapsed_s", o.elapsed_s},
                                 {"events_per_second", o.events_per_second},
                                 {"bundles", o.bundle_files},
                                 {"verify_failures", o.verify_failures}});
            char line[512];
            std::snprintf(line, sizeof(line), "%s: %d/%d bundles (%d attempts, %.2fs)\n",
                          o.source_dir.c_str(), o.written, o.requested, o.attempts,
                          o.elapsed_s);
            text += line;
            if (!o.verify_failures.empty()) {
                ok = false;
                for (const std::string& f : o.verify_failures) text += "  verify: " + f + "\n";
            }
            if (o.written < o.requested)
                text += "  short by " + std::to_string(o.requested - o.written) +
                        " bundle(s)\n";
        }
        report->payload = json{{"command", "encode"},
                               {"out_dir", out_dir},
                               {"seed", seed},
                               {"verify", verify != 0},
                               {"config_hash", evtk::config_hash(effective)},
                               {"total_s", total_s},
                               {"sequences", seq_items}};
        report->text = text;
        report->ok = ok;
        *out = report;
    });
}

evtk_status evtk_evaluate(const char* gt_path, const char* det_path, const evtk_config* cfg,
                          evtk_report** out) {
    if (!gt_path || !det_path || !out) return arg_error("gt_path/det_path/out is null");
    return guarded([&] {
        evtk::ToolConfig effective = cfg ? cfg->cfg : evtk::default_config();
        evtk::EvalReport r = evtk::evaluate_paths(gt_path, det_path, effective);
        auto* report = new evtk_report;
        report->payload = json::parse(evtk::eval_report_json(r));
        report->text = evtk::eval_report_table(r);
        *out = report;
    });
}

evtk_status evtk_render(const char* bundle_path, const char* png_path, evtk_report** out) {
    if (!bundle_path || !png_path) return arg_error("bundle_path/png_path is null");
    return guarded([&] {
        evtk::render_bundle_png(bundle_path, png_path);
        if (out) {
            auto* report = new evtk_report;
            report->payload = json{{"command", "render"},
                                   {"bundle", bundle_path},
                                   {"png", png_path}};
            report->text = std::string("wrote ") + png_path + "\n";
            *out = report;
        }
    });
}

evtk_status evtk_verify(const char* encode_dir, const evtk_config* cfg, evtk_report** out) {
    if (!encode_dir || !out) return arg_error("encode_dir/out is null");
    return guarded([&] {
        evtk::BBoxOrigin origin =
            cfg ? cfg->cfg.bbox_origin : evtk::BBoxOrigin::TopLeft;
        evtk::VerifyOutcome v = evtk::verify_encode_dir(encode_dir, origin);
        auto* report = new evtk_report;
        report->payload = json{{"command", "verify"},
                               {"dir", encode_dir},
                               {"bundles_checked", v.bundles_checked},
                               {"failures", v.failures}};
        std::string text;
        if (v.failures.empty()) {
            text = std::to_string(v.bundles_checked) + " bundle(s) verified\n";
        } else {
            for (const std::string& f : v.failures) text += f + "\n";
        }
        report->text = text;
        report->ok = v.failures.empty();
        *out = report;
    });
}

// --- reports --------------------------------------------------------------

evtk_status evtk_report_json(const evtk_report* report, char** out_text) {
    if (!report || !out_text) return arg_error("report/out_text is null");
    return guarded([&] { *out_text = copy_string(report->payload.dump(2)); });
}

evtk_status evtk_report_text(const evtk_report* report, char** out_text) {
    if (!report || !out_text) return arg_error("report/out_text is null");
    return guarded([&] { *out_text = copy_string(report->text); });
}

int evtk_report_ok(const evtk_report* report) { return report && report->ok ? 1 : 0; }

void evtk_report_destroy(evtk_report* report) { delete report; }

} // extern "C"
