#include "containers.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>

#include "error.hpp"
#include "fsio.hpp"
#include "hdf5io.hpp"
#include "npy.hpp"

namespace evtk {
namespace {

namespace fs = std::filesystem;

constexpr char kFlatMagic[8] = {'E', 'V', 'T', 'F', 'L', 'A', 'T', '\0'};
constexpr std::uint16_t kFlatVersion = 1;

bool has_extension(const std::string& path, const char* ext) {
    return fs::path(path).extension() == ext;
}

void check_event_rows(const std::vector<std::int64_t>& rows, std::size_t n,
                      const SensorGeometry& geom) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t t = rows[i * 4 + 0];
        const std::int64_t x = rows[i * 4 + 1];
        const std::int64_t y = rows[i * 4 + 2];
        const std::int64_t p = rows[i * 4 + 3];
        if (i > 0 && t < rows[(i - 1) * 4 + 0])
            raise(ErrorCode::UnsortedTimestamps,
                  "event " + std::to_string(i) + " breaks timestamp order");
        if (x < 0 || y < 0 || x >= geom.width || y >= geom.height)
            raise(ErrorCode::CoordinateOutOfBounds,
                  "event " + std::to_string(i) + " at (" + std::to_string(x) + "," +
                      std::to_string(y) + ") lies outside the sensor plane");
        if (p != 0 && p != 1)
            raise(ErrorCode::InvalidValue,
                  "event " + std::to_string(i) + " has polarity " + std::to_string(p));
    }
}

EventStream rows_to_stream(const std::vector<std::int64_t>& rows, std::size_t n,
                           SensorGeometry geom) {
    check_event_rows(rows, n, geom);
    EventStream stream;
    stream.geometry = geom;
    stream.events.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        stream.events[i].t = rows[i * 4 + 0];
        stream.events[i].x = static_cast<std::uint16_t>(rows[i * 4 + 1]);
        stream.events[i].y = static_cast<std::uint16_t>(rows[i * 4 + 2]);
        stream.events[i].p = rows[i * 4 + 3] == 1 ? Polarity::Positive : Polarity::Negative;
    }
    return stream;
}

std::vector<std::int64_t> stream_to_rows(const EventStream& stream) {
    std::vector<std::int64_t> rows(stream.size() * 4);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const Event& e = stream.events[i];
        rows[i * 4 + 0] = e.t;
        rows[i * 4 + 1] = e.x;
        rows[i * 4 + 2] = e.y;
        rows[i * 4 + 3] = e.p == Polarity::Positive ? 1 : 0;
    }
    return rows;
}

void write_events_flat(const std::string& path, const EventStream& stream) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + stream.size() * 32);
    out.insert(out.end(), kFlatMagic, kFlatMagic + 8);
    auto put_u16 = [&out](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    put_u16(kFlatVersion);
    put_u16(static_cast<std::uint16_t>(stream.geometry.width));
    put_u16(static_cast<std::uint16_t>(stream.geometry.height));
    put_u16(0);
    const auto rows = stream_to_rows(stream);
    const std::size_t payload_off = out.size();
    out.resize(payload_off + rows.size() * 8);
    std::memcpy(out.data() + payload_off, rows.data(), rows.size() * 8);
    atomic_write_file(path, out.data(), out.size());
}

EventStream read_events_flat(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kFlatMagic, 8) != 0)
        raise(ErrorCode::BadHeader, "'" + path + "' is not a flat event file");
    auto get_u16 = [&bytes](std::size_t off) {
        return static_cast<std::uint16_t>(bytes[off] | (bytes[off + 1] << 8));
    };
    if (get_u16(8) != kFlatVersion)
        raise(ErrorCode::BadHeader, "unsupported flat event file version");
    SensorGeometry geom;
    geom.width = get_u16(10);
    geom.height = get_u16(12);
    if (geom.width <= 0 || geom.height <= 0)
        raise(ErrorCode::BadHeader, "flat event file carries a degenerate sensor plane");
    const std::size_t payload = bytes.size() - 16;
    if (payload % 32 != 0)
        raise(ErrorCode::BadHeader, "flat event file payload is not whole 4-column rows");
    const std::size_t n = payload / 32;
    std::vector<std::int64_t> rows(n * 4);
    std::memcpy(rows.data(), bytes.data() + 16, payload);
    return rows_to_stream(rows, n, geom);
}

void write_events_h5(const std::string& path, const EventStream& stream) {
    const auto rows = stream_to_rows(stream);
    h5::I64Dataset events{"events", {stream.size(), 4}, rows.data()};
    h5::write_file(path, {events}, {},
                   {{"events", "width", stream.geometry.width},
                    {"events", "height", stream.geometry.height}});
}

EventStream read_events_h5(const std::string& path) {
    std::vector<std::size_t> shape;
    const auto rows = h5::read_i64(path, "events", shape);
    if (shape.size() != 2 || shape[1] != 4)
        raise(ErrorCode::WrongColumnCount,
              "'" + path + "': events dataset must be N x 4, got rank " +
                  std::to_string(shape.size()));
    SensorGeometry geom;
    std::int64_t v = 0;
    if (h5::read_i64_attr(path, "events", "width", v)) geom.width = static_cast<int>(v);
    if (h5::read_i64_attr(path, "events", "height", v)) geom.height = static_cast<int>(v);
    if (geom.width <= 0 || geom.height <= 0)
        raise(ErrorCode::BadHeader, "events file carries a degenerate sensor plane");
    return rows_to_stream(rows, shape[0], geom);
}

} // namespace

void write_events(const std::string& path, const EventStream& stream) {
    // The writer holds the same row invariants as the strict reader, so a
    // file this layer produced always reads back.
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const Event& e = stream.events[i];
        if (i > 0 && e.t < stream.events[i - 1].t)
            raise(ErrorCode::UnsortedTimestamps,
                  "event " + std::to_string(i) + " breaks timestamp order");
        if (!stream.geometry.contains(e.x, e.y))
            raise(ErrorCode::CoordinateOutOfBounds,
                  "event " + std::to_string(i) + " at (" + std::to_string(e.x) + "," +
                      std::to_string(e.y) + ") lies outside the sensor plane");
    }
    if (has_extension(path, ".evt"))
        write_events_flat(path, stream);
    else
        write_events_h5(path, stream);
}

EventStream read_events(const std::string& path) {
    if (!file_exists(path)) raise(ErrorCode::IoFailure, "no event file at '" + path + "'");
    if (has_extension(path, ".evt")) return read_events_flat(path);
    if (h5::is_hdf5_file(path)) return read_events_h5(path);
    return read_events_flat(path); // extension lied; try the magic check
}

void write_frames(const std::string& path, const std::vector<Frame>& frames) {
    if (frames.empty()) {
        h5::write_file(path, {h5::I64Dataset{"frame_ts", {0}, nullptr}},
                       {h5::U8Dataset{"frames", {0, 0, 0}, nullptr}}, {});
        return;
    }
    const std::size_t h = static_cast<std::size_t>(frames.front().height);
    const std::size_t w = static_cast<std::size_t>(frames.front().width);
    std::vector<std::uint8_t> pixels;
    pixels.reserve(frames.size() * h * w);
    std::vector<std::int64_t> ts;
    ts.reserve(frames.size());
    for (const Frame& f : frames) {
        if (static_cast<std::size_t>(f.height) != h || static_cast<std::size_t>(f.width) != w)
            raise(ErrorCode::BadShape, "frames in one file must share dimensions");
        pixels.insert(pixels.end(), f.pixels.begin(), f.pixels.end());
        ts.push_back(f.t);
    }
    h5::write_file(path, {h5::I64Dataset{"frame_ts", {frames.size()}, ts.data()}},
                   {h5::U8Dataset{"frames", {frames.size(), h, w}, pixels.data()}}, {});
}

std::vector<Frame> read_frames(const std::string& path) {
    std::vector<std::size_t> fshape;
    const auto pixels = h5::read_u8(path, "frames", fshape);
    if (fshape.size() != 3)
        raise(ErrorCode::BadShape, "'" + path + "': frames dataset must be M x H x W");
    std::vector<std::size_t> tshape;
    const auto ts = h5::read_i64(path, "frame_ts", tshape);
    if (tshape.size() != 1 || tshape[0] != fshape[0])
        raise(ErrorCode::BadShape, "'" + path + "': frame_ts length must match frame count");

    const std::size_t m = fshape[0], h = fshape[1], w = fshape[2];
    std::vector<Frame> frames(m);
    for (std::size_t i = 0; i < m; ++i) {
        frames[i].t = ts[i];
        frames[i].height = static_cast<int>(h);
        frames[i].width = static_cast<int>(w);
        frames[i].pixels.assign(pixels.begin() + static_cast<std::ptrdiff_t>(i * h * w),
                                pixels.begin() + static_cast<std::ptrdiff_t>((i + 1) * h * w));
    }
    return frames;
}

namespace {

std::vector<Annotation> rows_to_annotations(const NpyArray& table, const std::string& origin) {
    if (table.shape.size() != 2 || table.shape[1] != 6)
        raise(ErrorCode::WrongColumnCount,
              origin + ": label table must be K x 6, got " +
                  (table.shape.size() == 2 ? std::to_string(table.shape[1]) + " columns"
                                           : "rank " + std::to_string(table.shape.size())));
    const auto values = table.as_f64();
    std::vector<Annotation> out(table.shape[0]);
    for (std::size_t i = 0; i < table.shape[0]; ++i) {
        const double* row = values.data() + i * 6;
        const double cls = row[1];
        if (cls != 0.0 && cls != 1.0)
            raise(ErrorCode::UnknownClassId,
                  origin + ": row " + std::to_string(i) + " has class id " + std::to_string(cls));
        out[i].t = static_cast<TimeUs>(std::llround(row[0]));
        out[i].class_id = static_cast<int>(cls);
        out[i].bbox = {row[2], row[3], row[4], row[5]};
    }
    return out;
}

NpyArray annotations_to_rows(const std::vector<Annotation>& annotations) {
    std::vector<double> values(annotations.size() * 6);
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const Annotation& a = annotations[i];
        double* row = values.data() + i * 6;
        row[0] = static_cast<double>(a.t);
        row[1] = static_cast<double>(a.class_id);
        row[2] = a.bbox.x;
        row[3] = a.bbox.y;
        row[4] = a.bbox.w;
        row[5] = a.bbox.h;
    }
    return NpyArray::from_f64(values, {annotations.size(), 6});
}

} // namespace

void write_labels(const std::string& path, const std::vector<Annotation>& annotations) {
    write_npy(path, annotations_to_rows(annotations));
}

std::vector<Annotation> read_labels(const std::string& path) {
    return rows_to_annotations(read_npy(path), path);
}

RecordingPaths locate_recording(const std::string& dir) {
    RecordingPaths paths;
    const fs::path base(dir);
    if (file_exists((base / "events.h5").string()))
        paths.events = (base / "events.h5").string();
    else if (file_exists((base / "events.evt").string()))
        paths.events = (base / "events.evt").string();
    if (file_exists((base / "frames.h5").string()))
        paths.frames = (base / "frames.h5").string();
    if (file_exists((base / "label.npy").string()))
        paths.labels = (base / "label.npy").string();
    if (file_exists((base / "frame_label.npy").string()))
        paths.frame_labels = (base / "frame_label.npy").string();
    return paths;
}

SequenceRecording read_recording(const std::string& dir) {
    const RecordingPaths paths = locate_recording(dir);
    if (paths.events.empty())
        raise(ErrorCode::IoFailure, "no events.h5 or events.evt under '" + dir + "'");
    SequenceRecording seq;
    seq.events = read_events(paths.events);
    seq.geometry = seq.events.geometry;
    if (!paths.frames.empty()) seq.frames = read_frames(paths.frames);
    if (!paths.labels.empty()) seq.annotations = read_labels(paths.labels);
    if (!paths.frame_labels.empty()) seq.frame_annotations = read_labels(paths.frame_labels);
    return seq;
}

void write_recording(const std::string& dir, const SequenceRecording& seq, bool use_flat_events) {
    fs::create_directories(dir);
    const fs::path base(dir);
    write_events((base / (use_flat_events ? "events.evt" : "events.h5")).string(), seq.events);
    write_frames((base / "frames.h5").string(), seq.frames);
    write_labels((base / "label.npy").string(), seq.annotations);
    if (seq.frame_annotations)
        write_labels((base / "frame_label.npy").string(), *seq.frame_annotations);
}

void write_bundle(const std::string& path, const SampleBundle& bundle) {
    NpzArchive archive;
    archive.arrays["hist"] =
        NpyArray::from_f64(bundle.hist, {2, bundle.height, bundle.width});
    if (bundle.frame)
        archive.arrays["frame"] = NpyArray::from_f64(*bundle.frame, {bundle.height, bundle.width});
    archive.arrays["labels"] = annotations_to_rows(bundle.labels);
    std::vector<double> meta = {static_cast<double>(bundle.t_min),
                                static_cast<double>(bundle.t_max),
                                static_cast<double>(bundle.mode),
                                bundle.T_th_ms,
                                bundle.A_th,
                                static_cast<double>(bundle.q),
                                static_cast<double>(bundle.grid_m),
                                static_cast<double>(bundle.grid_n),
                                bundle.half_window_ms,
                                bundle.clip_sigma,
                                static_cast<double>(bundle.seq_id),
                                static_cast<double>(bundle.anchor_id),
                                static_cast<double>(bundle.frame_t),
                                bundle.per_channel_norm ? 1.0 : 0.0};
    archive.arrays["meta"] = NpyArray::from_f64(meta, {meta.size()});
    write_npz(path, archive);
}

SampleBundle read_bundle(const std::string& path) {
    const NpzArchive archive = read_npz(path);
    for (const char* required : {"hist", "labels", "meta"})
        if (!archive.contains(required))
            raise(ErrorCode::MissingRequiredArray,
                  "'" + path + "' is missing required array '" + std::string(required) + "'");

    SampleBundle bundle;
    const NpyArray& hist = archive.arrays.at("hist");
    if (hist.shape.size() != 3 || hist.shape[0] != 2)
        raise(ErrorCode::BadShape, "'" + path + "': hist must be 2 x H x W");
    bundle.height = hist.shape[1];
    bundle.width = hist.shape[2];
    bundle.hist = hist.as_f64();

    if (archive.contains("frame")) {
        const NpyArray& frame = archive.arrays.at("frame");
        if (frame.shape.size() != 2 || frame.shape[0] != bundle.height ||
            frame.shape[1] != bundle.width)
            raise(ErrorCode::BadShape, "'" + path + "': frame shape must match hist plane");
        bundle.frame = frame.as_f64();
    }

    bundle.labels = rows_to_annotations(archive.arrays.at("labels"), path);

    const auto meta = archive.arrays.at("meta").as_f64();
    if (meta.size() < 13)
        raise(ErrorCode::BadShape, "'" + path + "': meta must carry 13 entries");
    bundle.t_min = static_cast<TimeUs>(std::llround(meta[0]));
    bundle.t_max = static_cast<TimeUs>(std::llround(meta[1]));
    bundle.mode = static_cast<int>(meta[2]);
    bundle.T_th_ms = meta[3];
    bundle.A_th = meta[4];
    bundle.q = static_cast<std::int64_t>(std::llround(meta[5]));
    bundle.grid_m = static_cast<int>(meta[6]);
    bundle.grid_n = static_cast<int>(meta[7]);
    bundle.half_window_ms = meta[8];
    bundle.clip_sigma = meta[9];
    bundle.seq_id = static_cast<std::int64_t>(std::llround(meta[10]));
    bundle.anchor_id = static_cast<std::int64_t>(std::llround(meta[11]));
    bundle.frame_t = static_cast<TimeUs>(std::llround(meta[12]));
    if (meta.size() > 13) bundle.per_channel_norm = meta[13] != 0.0;
    return bundle;
}

} // namespace evtk
