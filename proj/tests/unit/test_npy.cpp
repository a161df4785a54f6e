#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "core/error.hpp"
#include "core/fsio.hpp"
#include "core/npy.hpp"
#include "helpers.hpp"

using namespace evtk;
using testutil::TempDir;

namespace {

// Validates the serialized header against the v1.0 byte rules: magic,
// version, little-endian length, space padding to a 64-byte multiple, and
// the trailing newline.
void check_npy_grammar(const std::vector<std::uint8_t>& bytes) {
    REQUIRE(bytes.size() >= 10);
    const std::uint8_t magic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
    CHECK(std::memcmp(bytes.data(), magic, 6) == 0);
    CHECK(bytes[6] == 1);
    CHECK(bytes[7] == 0);
    const std::size_t header_len = bytes[8] | (std::size_t(bytes[9]) << 8);
    REQUIRE(bytes.size() >= 10 + header_len);
    CHECK((10 + header_len) % 64 == 0);
    CHECK(bytes[10 + header_len - 1] == '\n');

    std::string dict(bytes.begin() + 10, bytes.begin() + 10 + header_len);
    CHECK(dict.front() == '{');
    const std::size_t close = dict.rfind('}');
    REQUIRE(close != std::string::npos);
    for (std::size_t i = close + 1; i + 1 < dict.size(); ++i) CHECK(dict[i] == ' ');
    CHECK(dict.find("'descr'") != std::string::npos);
    CHECK(dict.find("'fortran_order': False") != std::string::npos);
    CHECK(dict.find("'shape'") != std::string::npos);
}

void append_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back(x >> 8);
}
void append_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back((x >> (8 * i)) & 0xff);
}

std::vector<std::uint8_t> raw_deflate(const std::vector<std::uint8_t>& in) {
    z_stream zs{};
    REQUIRE(deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                         Z_DEFAULT_STRATEGY) == Z_OK);
    std::vector<std::uint8_t> out(deflateBound(&zs, in.size()));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

// Single-member zip with a deflate-compressed payload, assembled by hand.
std::vector<std::uint8_t> deflated_zip(const std::string& name,
                                       const std::vector<std::uint8_t>& payload) {
    const std::vector<std::uint8_t> packed = raw_deflate(payload);
    const auto crc =
        static_cast<std::uint32_t>(crc32(0, payload.data(), static_cast<uInt>(payload.size())));

    std::vector<std::uint8_t> z;
    append_u32(z, 0x04034b50);
    append_u16(z, 20);
    append_u16(z, 0);
    append_u16(z, 8); // deflate
    append_u16(z, 0);
    append_u16(z, 0x0021);
    append_u32(z, crc);
    append_u32(z, static_cast<std::uint32_t>(packed.size()));
    append_u32(z, static_cast<std::uint32_t>(payload.size()));
    append_u16(z, static_cast<std::uint16_t>(name.size()));
    append_u16(z, 0);
    z.insert(z.end(), name.begin(), name.end());
    z.insert(z.end(), packed.begin(), packed.end());

    const std::size_t central_offset = z.size();
    append_u32(z, 0x02014b50);
    append_u16(z, 20);
    append_u16(z, 20);
    append_u16(z, 0);
    append_u16(z, 8);
    append_u16(z, 0);
    append_u16(z, 0x0021);
    append_u32(z, crc);
    append_u32(z, static_cast<std::uint32_t>(packed.size()));
    append_u32(z, static_cast<std::uint32_t>(payload.size()));
    append_u16(z, static_cast<std::uint16_t>(name.size()));
    append_u16(z, 0);
    append_u16(z, 0);
    append_u16(z, 0);
    append_u16(z, 0);
    append_u32(z, 0);
    append_u32(z, 0); // local header offset
    z.insert(z.end(), name.begin(), name.end());
    const std::size_t central_size = z.size() - central_offset;

    append_u32(z, 0x06054b50);
    append_u16(z, 0);
    append_u16(z, 0);
    append_u16(z, 1);
    append_u16(z, 1);
    append_u32(z, static_cast<std::uint32_t>(central_size));
    append_u32(z, static_cast<std::uint32_t>(central_offset));
    append_u16(z, 0);
    return z;
}

bool python_numpy_available() {
    static const bool ok =
        std::system("python3 -c 'import numpy' >/dev/null 2>&1") == 0;
    return ok;
}

} // namespace

TEST_SUITE("npy") {

TEST_CASE("encoded headers obey the v1.0 grammar") {
    check_npy_grammar(npy_encode(NpyArray::from_f64({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {3, 2})));
    check_npy_grammar(npy_encode(NpyArray::from_i64({7}, {1})));
    check_npy_grammar(npy_encode(NpyArray::from_u8(std::vector<std::uint8_t>(24, 9), {2, 3, 4})));
    check_npy_grammar(npy_encode(NpyArray::from_f64({}, {0, 6})));
    // A long shape tuple pushes the dict across the first 64-byte boundary.
    check_npy_grammar(
        npy_encode(NpyArray::from_f64(std::vector<double>(16, 0.0), {2, 2, 2, 2, 1, 1, 1})));
}

TEST_CASE("arrays survive an encode/decode cycle exactly") {
    const std::vector<double> f = {0.0, -1.5, 3.25, 1e300, -0.0, 42.0};
    auto a = NpyArray::from_f64(f, {2, 3});
    auto bytes = npy_encode(a);
    auto back = npy_decode(bytes.data(), bytes.size());
    CHECK(back.descr == "<f8");
    CHECK(back.shape == std::vector<std::size_t>{2, 3});
    CHECK(back.as_f64() == f);

    const std::vector<std::int64_t> i = {INT64_MIN, -1, 0, 1, INT64_MAX};
    auto ia = NpyArray::from_i64(i, {5});
    auto ib = npy_encode(ia);
    CHECK(npy_decode(ib.data(), ib.size()).as_i64() == i);
}

TEST_CASE("file round trip") {
    TempDir tmp("npy");
    const std::vector<double> v = {1.0, 2.0, 3.0};
    write_npy(tmp.file("a.npy"), NpyArray::from_f64(v, {3}));
    CHECK(read_npy(tmp.file("a.npy")).as_f64() == v);
}

TEST_CASE("empty arrays round trip with their shape") {
    auto bytes = npy_encode(NpyArray::from_f64({}, {0, 6}));
    auto back = npy_decode(bytes.data(), bytes.size());
    CHECK(back.shape == std::vector<std::size_t>{0, 6});
    CHECK(back.element_count() == 0);
}

TEST_CASE("malformed inputs are rejected") {
    auto bytes = npy_encode(NpyArray::from_f64({1.0}, {1}));

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK_RAISES(ErrorCode::BadHeader, npy_decode(bytes.data(), bytes.size()));
    }
    SUBCASE("truncated payload") {
        CHECK_RAISES(ErrorCode::BadHeader, npy_decode(bytes.data(), bytes.size() - 4));
    }
    SUBCASE("fortran order") {
        std::string s(bytes.begin(), bytes.end());
        auto pos = s.find("False");
        REQUIRE(pos != std::string::npos);
        s.replace(pos, 5, "True ");
        std::vector<std::uint8_t> mod(s.begin(), s.end());
        CHECK_RAISES(ErrorCode::BadHeader, npy_decode(mod.data(), mod.size()));
    }
}

TEST_CASE("npz archives round trip all member types") {
    TempDir tmp("npz");
    NpzArchive ar;
    ar.arrays["hist"] = NpyArray::from_f64({0.5, 1.0, 0.0, 0.25}, {4});
    ar.arrays["ids"] = NpyArray::from_i64({10, 20, 30}, {3});
    ar.arrays["mask"] = NpyArray::from_u8({1, 0, 1, 1}, {2, 2});
    write_npz(tmp.file("b.npz"), ar);

    auto back = read_npz(tmp.file("b.npz"));
    REQUIRE(back.arrays.size() == 3);
    CHECK(back.arrays.at("hist").as_f64() == ar.arrays.at("hist").as_f64());
    CHECK(back.arrays.at("ids").as_i64() == ar.arrays.at("ids").as_i64());
    CHECK(back.arrays.at("mask").data == ar.arrays.at("mask").data);
    CHECK(back.arrays.at("mask").shape == std::vector<std::size_t>{2, 2});
}

TEST_CASE("identical archives serialize to identical bytes") {
    TempDir tmp("npzdet");
    NpzArchive ar;
    ar.arrays["x"] = NpyArray::from_f64({1.0, 2.0}, {2});
    write_npz(tmp.file("one.npz"), ar);
    write_npz(tmp.file("two.npz"), ar);
    CHECK(read_file_bytes(tmp.file("one.npz")) == read_file_bytes(tmp.file("two.npz")));
}

TEST_CASE("deflate-compressed members are readable") {
    TempDir tmp("npzdef");
    const std::vector<double> v = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0};
    auto payload = npy_encode(NpyArray::from_f64(v, {6}));
    auto zip = deflated_zip("vals.npy", payload);
    std::ofstream(tmp.file("c.npz"), std::ios::binary)
        .write(reinterpret_cast<const char*>(zip.data()), static_cast<std::streamsize>(zip.size()));

    auto back = read_npz(tmp.file("c.npz"));
    REQUIRE(back.contains("vals"));
    CHECK(back.arrays.at("vals").as_f64() == v);
}

TEST_CASE("corrupted member payloads are rejected") {
    TempDir tmp("npzcrc");
    NpzArchive ar;
    ar.arrays["x"] = NpyArray::from_f64({1.0, 2.0, 3.0, 4.0}, {4});
    write_npz(tmp.file("d.npz"), ar);

    auto bytes = read_file_bytes(tmp.file("d.npz"));
    // Flip one payload byte past the member header region.
    bytes[60] ^= 0xff;
    std::ofstream(tmp.file("d.npz"), std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(read_npz(tmp.file("d.npz")), Error);
}

TEST_CASE("numpy reads our archives and we read numpy's") {
    if (!python_numpy_available()) return;
    TempDir tmp("interop");

    NpzArchive ar;
    ar.arrays["f"] = NpyArray::from_f64({1.5, -2.0, 1e10}, {3});
    ar.arrays["i"] = NpyArray::from_i64({-7, 0, 123456789012345}, {3});
    ar.arrays["u"] = NpyArray::from_u8({0, 127, 255}, {3});
    write_npz(tmp.file("ours.npz"), ar);

    std::ofstream(tmp.file("roundtrip.py")) << R"(
import sys
import numpy as np
src, plain, packed = sys.argv[1:4]
d = np.load(src)
assert d["f"].dtype == np.float64 and d["f"].shape == (3,)
assert d["i"].dtype == np.int64
assert d["u"].dtype == np.uint8
arrays = {k: d[k] for k in d.files}
np.savez(plain, **arrays)
np.savez_compressed(packed, **arrays)
)";
    const std::string cmd = "python3 " + tmp.file("roundtrip.py") + " " + tmp.file("ours.npz") +
                            " " + tmp.file("plain.npz") + " " + tmp.file("packed.npz") +
                            " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);

    for (const char* name : {"plain.npz", "packed.npz"}) {
        auto back = read_npz(tmp.file(name));
        CHECK(back.arrays.at("f").as_f64() == ar.arrays.at("f").as_f64());
        CHECK(back.arrays.at("i").as_i64() == ar.arrays.at("i").as_i64());
        CHECK(back.arrays.at("u").data == ar.arrays.at("u").data);
    }
}

} // TEST_SUITE("npy")
