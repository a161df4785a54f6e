// Exercises the shared library strictly through its C surface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <evtk.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CTemp {
    fs::path path;

    explicit CTemp(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("evtk_capi_" + tag + "_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~CTemp() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    CTemp(const CTemp&) = delete;
    CTemp& operator=(const CTemp&) = delete;

    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string report_json(const evtk_report* report) {
    char* text = nullptr;
    REQUIRE(evtk_report_json(report, &text) == EVTK_OK);
    std::string out(text);
    evtk_string_free(text);
    return out;
}

std::string report_text(const evtk_report* report) {
    char* text = nullptr;
    REQUIRE(evtk_report_text(report, &text) == EVTK_OK);
    std::string out(text);
    evtk_string_free(text);
    return out;
}

// Small fast scene shared by the flow tests.
evtk_config* quick_config() {
    evtk_config* cfg = nullptr;
    REQUIRE(evtk_config_create(&cfg) == EVTK_OK);
    REQUIRE(evtk_config_set(cfg, "scene.duration_s=0.3") == EVTK_OK);
    REQUIRE(evtk_config_set(cfg, "encoder.A_th=30") == EVTK_OK);
    REQUIRE(evtk_config_set(cfg, "samples.count_lo=3") == EVTK_OK);
    REQUIRE(evtk_config_set(cfg, "samples.count_hi=4") == EVTK_OK);
    return cfg;
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(evtk_version()) == "0.1.0");
    CHECK(std::string(evtk_status_name(EVTK_OK)) == "ok");
    CHECK(std::string(evtk_status_name(EVTK_ERR_IO)) == "io_failure");
    CHECK(std::string(evtk_status_name(EVTK_ERR_BAD_CONFIG)) == "bad_config");
    CHECK(std::string(evtk_status_name(EVTK_ERR_NEVER_SATISFIED)) == "never_satisfied");
    CHECK(std::string(evtk_status_name(static_cast<evtk_status>(999))) == "unknown");
}

TEST_CASE("null arguments come back as invalid-argument with a message") {
    CHECK(evtk_config_create(nullptr) == EVTK_ERR_INVALID_ARGUMENT);
    CHECK(std::string(evtk_last_error()).size() > 0);
    CHECK(evtk_config_parse(nullptr, nullptr) == EVTK_ERR_INVALID_ARGUMENT);
    CHECK(evtk_sequence_load(nullptr, nullptr, nullptr) == EVTK_ERR_INVALID_ARGUMENT);
    CHECK(evtk_inspect(nullptr, nullptr, nullptr) == EVTK_ERR_INVALID_ARGUMENT);
    CHECK(evtk_evaluate(nullptr, nullptr, nullptr, nullptr) == EVTK_ERR_INVALID_ARGUMENT);
    CHECK(evtk_report_json(nullptr, nullptr) == EVTK_ERR_INVALID_ARGUMENT);

    evtk_report* out = nullptr;
    CHECK(evtk_encode(nullptr, 0, nullptr, nullptr, 0, 0, 1, &out) ==
          EVTK_ERR_INVALID_ARGUMENT);
    const char* dirs[] = {nullptr};
    CHECK(evtk_encode(dirs, 1, "x", nullptr, 0, 0, 1, &out) == EVTK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("destroy functions tolerate null") {
    evtk_config_destroy(nullptr);
    evtk_sequence_destroy(nullptr);
    evtk_report_destroy(nullptr);
    evtk_string_free(nullptr);
}

TEST_CASE("config creation, overrides, serialization, and failure paths") {
    evtk_config* cfg = nullptr;
    REQUIRE(evtk_config_create(&cfg) == EVTK_OK);

    CHECK(evtk_config_set(cfg, "encoder.q=64") == EVTK_OK);
    CHECK(std::string(evtk_last_error()).empty()); // success clears the slot

    char* json_text = nullptr;
    REQUIRE(evtk_config_to_json(cfg, &json_text) == EVTK_OK);
    CHECK(std::string(json_text).find("\"q\": 64") != std::string::npos);
    evtk_string_free(json_text);

    char* hash = nullptr;
    REQUIRE(evtk_config_hash(cfg, &hash) == EVTK_OK);
    CHECK(std::string(hash).size() == 16);
    evtk_string_free(hash);

    CHECK(evtk_config_set(cfg, "encoder.no_such_key=1") == EVTK_ERR_BAD_CONFIG);
    CHECK(std::string(evtk_last_error()).find("no_such_key") != std::string::npos);
    CHECK(evtk_config_set(cfg, "gibberish") == EVTK_ERR_BAD_CONFIG);
    evtk_config_destroy(cfg);

    evtk_config* parsed = nullptr;
    CHECK(evtk_config_parse("{\"lighting\": \"low_light\"}", &parsed) == EVTK_OK);
    evtk_config_destroy(parsed);
    CHECK(evtk_config_parse("{nope", &parsed) == EVTK_ERR_BAD_CONFIG);
    CHECK(evtk_config_load("/definitely/not/here.json", &parsed) == EVTK_ERR_IO);
}

TEST_CASE("generate, load, inspect, encode, verify, render, evaluate") {
    CTemp root("flow");
    evtk_config* cfg = quick_config();

    const std::string dir_a = root.file("seq_a");
    const std::string dir_b = root.file("seq_b");

    evtk_report* report = nullptr;
    REQUIRE(evtk_generate(dir_a.c_str(), cfg, 1, 0, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    CHECK(report_json(report).find("\"events\"") != std::string::npos);
    CHECK(report_text(report).find("wrote") != std::string::npos);
    evtk_report_destroy(report);

    REQUIRE(evtk_generate(dir_b.c_str(), cfg, 2, 1, &report) == EVTK_OK);
    evtk_report_destroy(report);
    CHECK(fs::exists(fs::path(dir_b) / "events.evt")); // flat container requested

    evtk_sequence* seq = nullptr;
    REQUIRE(evtk_sequence_load(dir_a.c_str(), cfg, &seq) == EVTK_OK);
    uint64_t events = 0, frames = 0, annotations = 0;
    REQUIRE(evtk_sequence_stats(seq, &events, &frames, &annotations) == EVTK_OK);
    CHECK(events > 0);
    CHECK(frames == 7);
    CHECK(annotations > 0);
    REQUIRE(evtk_sequence_validate(seq, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    CHECK(report_text(report) == "schema ok\n");
    evtk_report_destroy(report);
    evtk_sequence_destroy(seq);

    REQUIRE(evtk_inspect(dir_a.c_str(), cfg, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    CHECK(report_json(report).find("\"ok\": true") != std::string::npos);
    evtk_report_destroy(report);

    // Single-directory encode lands bundles directly in the output.
    const std::string enc_one = root.file("enc_one");
    const char* one[] = {dir_a.c_str()};
    REQUIRE(evtk_encode(one, 1, enc_one.c_str(), cfg, 9, 1, 1, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    evtk_report_destroy(report);
    CHECK(fs::exists(fs::path(enc_one) / "manifest.json"));
    CHECK(fs::exists(fs::path(enc_one) / "sample_000.npz"));

    // Multi-directory encode fans out into basename subdirectories.
    const std::string enc_two = root.file("enc_two");
    const char* two[] = {dir_a.c_str(), dir_b.c_str()};
    REQUIRE(evtk_encode(two, 2, enc_two.c_str(), cfg, 9, 1, 2, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    CHECK(report_text(report).find(dir_a) != std::string::npos);
    evtk_report_destroy(report);
    CHECK(fs::exists(fs::path(enc_two) / "manifest.json"));
    CHECK(fs::exists(fs::path(enc_two) / "seq_a" / "sample_000.npz"));
    CHECK(fs::exists(fs::path(enc_two) / "seq_b" / "sample_000.npz"));

    REQUIRE(evtk_verify(enc_two.c_str(), cfg, &report) == EVTK_OK);
    CHECK(evtk_report_ok(report) == 1);
    CHECK(report_text(report).find("verified") != std::string::npos);
    evtk_report_destroy(report);

    const std::string png = root.file("view.png");
    REQUIRE(evtk_render((fs::path(enc_one) / "sample_000.npz").string().c_str(), png.c_str(),
                        &report) == EVTK_OK);
    CHECK(report_text(report).find("view.png") != std::string::npos);
    evtk_report_destroy(report);
    CHECK(fs::exists(png));
    CHECK(fs::file_size(png) > 0);

    // Hand-rolled evaluation files: one exact hit per class.
    const std::string gt = root.file("gt.jsonl");
    const std::string det = root.file("det.jsonl");
    {
        std::ofstream g(gt);
        g << R"({"image_id": 100, "class_id": 0, "bbox": [10, 10, 40, 30], "score": 1.0})"
          << "\n";
        g << R"({"image_id": 200, "class_id": 1, "bbox": [60, 60, 30, 30], "score": 1.0})"
          << "\n";
        std::ofstream d(det);
        d << R"({"image_id": 100, "class_id": 0, "bbox": [10, 10, 40, 30], "score": 0.9})"
          << "\n";
        d << R"({"image_id": 200, "class_id": 1, "bbox": [60, 60, 30, 30], "score": 0.8})"
          << "\n";
    }
    REQUIRE(evtk_evaluate(gt.c_str(), det.c_str(), cfg, &report) == EVTK_OK);
    const std::string table = report_text(report);
    CHECK(table.find("class   mAP@0.5  mAP@0.5:0.95  F1@0.5   precision  recall") !=
          std::string::npos);
    CHECK(table.find("All") != std::string::npos);
    CHECK(report_json(report).find("\"ap50\": 1.0") != std::string::npos);
    evtk_report_destroy(report);

    evtk_config_destroy(cfg);
}

TEST_CASE("pipeline errors surface as status codes") {
    CTemp root("err");
    evtk_report* report = nullptr;

    CHECK(evtk_sequence_load(root.file("missing").c_str(), nullptr, nullptr) ==
          EVTK_ERR_INVALID_ARGUMENT); // out null beats the IO error
    evtk_sequence* seq = nullptr;
    CHECK(evtk_sequence_load(root.file("missing").c_str(), nullptr, &seq) == EVTK_ERR_IO);
    CHECK(std::string(evtk_last_error()).size() > 0);

    CHECK(evtk_inspect(root.file("missing").c_str(), nullptr, &report) == EVTK_ERR_IO);
    CHECK(evtk_verify(root.str().c_str(), nullptr, &report) == EVTK_ERR_IO); // no manifest

    // A generated sequence whose adaptive threshold can never be met.
    evtk_config* cfg = quick_config();
    const std::string dir = root.file("seq");
    REQUIRE(evtk_generate(dir.c_str(), cfg, 3, 0, &report) == EVTK_OK);
    evtk_report_destroy(report);
    REQUIRE(evtk_config_set(cfg, "encoder.A_th=1e15") == EVTK_OK);
    const char* dirs[] = {dir.c_str()};
    CHECK(evtk_encode(dirs, 1, root.file("enc").c_str(), cfg, 1, 0, 1, &report) ==
          EVTK_ERR_NEVER_SATISFIED);
    evtk_config_destroy(cfg);

    evtk_config* bad = nullptr;
    REQUIRE(evtk_config_create(&bad) == EVTK_OK);
    REQUIRE(evtk_config_set(bad, "scene.duration_s=0") == EVTK_OK);
    CHECK(evtk_generate(root.file("nope").c_str(), bad, 1, 0, &report) == EVTK_ERR_BAD_CONFIG);
    evtk_config_destroy(bad);
}
