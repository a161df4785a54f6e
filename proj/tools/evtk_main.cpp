// Command-line front end. Talks to the toolkit exclusively through the C
// surface in evtk.h; results go to stdout, diagnostics to stderr.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evtk.h"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 usage or config error,
// 3 encoder never satisfiable, 4 validation failure.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNeverSatisfied = 3;
constexpr int kExitValidation = 4;

struct ConfigDeleter {
    void operator()(evtk_config* c) const { evtk_config_destroy(c); }
};
struct ReportDeleter {
    void operator()(evtk_report* r) const { evtk_report_destroy(r); }
};
using ConfigPtr = std::unique_ptr<evtk_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<evtk_report, ReportDeleter>;

int exit_for(evtk_status status) {
    switch (status) {
    case EVTK_OK: return kExitOk;
    case EVTK_ERR_BAD_CONFIG:
    case EVTK_ERR_INVALID_ARGUMENT: return kExitUsage;
    case EVTK_ERR_NEVER_SATISFIED: return kExitNeverSatisfied;
    default: return kExitRuntime;
    }
}

int fail(evtk_status status) {
    std::fprintf(stderr, "error: %s (%s)\n", evtk_last_error(), evtk_status_name(status));
    return exit_for(status);
}

/// Builds the effective config: file (if given), then --set overrides in
/// order. Returns null and sets *exit_code on failure.
ConfigPtr build_config(const std::string& config_path, const std::vector<std::string>& sets,
                       int* exit_code) {
    evtk_config* raw = nullptr;
    evtk_status st = config_path.empty() ? evtk_config_create(&raw)
                                         : evtk_config_load(config_path.c_str(), &raw);
    if (st != EVTK_OK) {
        *exit_code = fail(st);
        return nullptr;
    }
    ConfigPtr cfg(raw);
    for (const std::string& assignment : sets) {
        st = evtk_config_set(cfg.get(), assignment.c_str());
        if (st != EVTK_OK) {
            *exit_code = fail(st);
            return nullptr;
        }
    }
    *exit_code = kExitOk;
    return cfg;
}

/// Prints a report: JSON payload with as_json, otherwise its text rendering.
int print_report(const evtk_report* report, bool as_json) {
    char* text = nullptr;
    evtk_status st =
        as_json ? evtk_report_json(report, &text) : evtk_report_text(report, &text);
    if (st != EVTK_OK) return fail(st);
    std::fputs(text, stdout);
    if (as_json) std::fputc('\n', stdout);
    evtk_string_free(text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-camera defect dataset toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(evtk_version()));
    app.failure_message(CLI::FailureMessage::simple);

    std::string config_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool as_json = false;

    auto add_config_opts = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--set", sets, "Override, section.key=value (repeatable)")
            ->take_all();
    };

    // inspect
    std::string inspect_dir;
    CLI::App* inspect = app.add_subcommand("inspect", "Summarize a recording directory");
    inspect->add_option("seq_dir", inspect_dir, "Recording directory")->required();
    add_config_opts(inspect);
    inspect->add_flag("--json", as_json, "Emit JSON instead of text");

    // gen
    std::string gen_dir;
    bool flat_events = false;
    CLI::App* gen = app.add_subcommand("gen", "Render the configured synthetic scene");
    gen->add_option("out_dir", gen_dir, "Output recording directory")->required();
    add_config_opts(gen);
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_flag("--flat-events", flat_events, "Write the flat event container");
    gen->add_flag("--json", as_json, "Emit JSON instead of text");

    // encode
    std::vector<std::string> encode_dirs;
    std::string encode_out;
    bool verify = false;
    int jobs = 1;
    CLI::App* encode = app.add_subcommand("encode", "Extract sample bundles");
    encode->add_option("seq_dirs", encode_dirs, "Recording directories")->required();
    encode->add_option("--out", encode_out, "Output directory")->required();
    add_config_opts(encode);
    encode->add_option("--seed", seed, "Sampling seed");
    encode->add_flag("--verify", verify, "Re-read and re-derive every written bundle");
    encode->add_option("--jobs", jobs, "Worker threads across sequences")
        ->check(CLI::PositiveNumber);
    encode->add_flag("--json", as_json, "Emit JSON instead of text");

    // eval
    std::string gt_path, det_path;
    double conf_thr = -1.0, nms_iou = -1.0;
    CLI::App* eval = app.add_subcommand("eval", "Score detections against ground truth");
    eval->add_option("gt", gt_path, "Ground truth (.npy labels or JSON lines)")->required();
    eval->add_option("det", det_path, "Detections (JSON lines)")->required();
    add_config_opts(eval);
    eval->add_option("--conf-thr", conf_thr, "Confidence floor for the F1 row");
    eval->add_option("--nms-iou", nms_iou, "Overlap threshold for pre-metric suppression");
    eval->add_flag("--json", as_json, "Emit JSON instead of the table");

    // render
    std::string bundle_path, png_path;
    CLI::App* render = app.add_subcommand("render", "Draw a sample bundle as a PNG");
    render->add_option("bundle", bundle_path, "Bundle .npz")->required();
    render->add_option("png", png_path, "Output .png")->required();

    // verify
    std::string verify_dir;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Re-check an encode output directory");
    verify_cmd->add_option("encode_dir", verify_dir, "Directory with an encode manifest")
        ->required();
    add_config_opts(verify_cmd);
    verify_cmd->add_flag("--json", as_json, "Emit JSON instead of text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    int exit_code = kExitOk;
    ConfigPtr cfg = build_config(config_path, sets, &exit_code);
    if (!cfg) return exit_code;

    evtk_report* raw_report = nullptr;
    evtk_status st = EVTK_OK;

    if (inspect->parsed()) {
        st = evtk_inspect(inspect_dir.c_str(), cfg.get(), &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        int rc = print_report(report.get(), as_json);
        if (rc != kExitOk) return rc;
        return evtk_report_ok(report.get()) ? kExitOk : kExitValidation;
    }

    if (gen->parsed()) {
        st = evtk_generate(gen_dir.c_str(), cfg.get(), seed, flat_events ? 1 : 0, &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        return print_report(report.get(), as_json);
    }

    if (encode->parsed()) {
        std::vector<const char*> dirs;
        for (const std::string& d : encode_dirs) dirs.push_back(d.c_str());
        st = evtk_encode(dirs.data(), dirs.size(), encode_out.c_str(), cfg.get(), seed,
                         verify ? 1 : 0, jobs, &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        int rc = print_report(report.get(), as_json);
        if (rc != kExitOk) return rc;
        return evtk_report_ok(report.get()) ? kExitOk : kExitValidation;
    }

    if (eval->parsed()) {
        if (conf_thr >= 0.0) {
            std::string assignment = "eval.conf_threshold=" + std::to_string(conf_thr);
            st = evtk_config_set(cfg.get(), assignment.c_str());
            if (st != EVTK_OK) return fail(st);
        }
        if (nms_iou >= 0.0) {
            std::string assignment = "eval.nms_iou=" + std::to_string(nms_iou);
            st = evtk_config_set(cfg.get(), assignment.c_str());
            if (st != EVTK_OK) return fail(st);
        }
        st = evtk_evaluate(gt_path.c_str(), det_path.c_str(), cfg.get(), &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        return print_report(report.get(), as_json);
    }

    if (render->parsed()) {
        st = evtk_render(bundle_path.c_str(), png_path.c_str(), &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        return print_report(report.get(), false);
    }

    if (verify_cmd->parsed()) {
        st = evtk_verify(verify_dir.c_str(), cfg.get(), &raw_report);
        if (st != EVTK_OK) return fail(st);
        ReportPtr report(raw_report);
        int rc = print_report(report.get(), as_json);
        if (rc != kExitOk) return rc;
        return evtk_report_ok(report.get()) ? kExitOk : kExitValidation;
    }

    return kExitUsage;
}
