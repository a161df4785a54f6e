#include "npy.hpp"

#include <zlib.h>

#include <cstring>
#include <sstream>

#include "error.hpp"
#include "fsio.hpp"

namespace evtk {
namespace {

std::size_t dtype_size(const std::string& descr) {
    if (descr == "<f8" || descr == "<i8" || descr == "<u8") return 8;
    if (descr == "<f4" || descr == "<i4" || descr == "<u4") return 4;
    if (descr == "<i2" || descr == "<u2") return 2;
    if (descr == "|u1" || descr == "|i1") return 1;
    raise(ErrorCode::BadHeader, "unsupported dtype descriptor '" + descr + "'");
}

void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string shape_tuple(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << shape[i];
        if (shape.size() == 1 || i + 1 < shape.size()) os << ",";
        if (i + 1 < shape.size()) os << " ";
    }
    os << ")";
    return os.str();
}

// Minimal parser for the python-literal header dict. Tolerates arbitrary
// spacing, requires the three canonical keys.
struct HeaderFields {
    std::string descr;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
};

void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n')) ++i;
}

std::string parse_py_string(const std::string& s, std::size_t& i) {
    if (i >= s.size() || (s[i] != '\'' && s[i] != '"'))
        raise(ErrorCode::BadHeader, "npy header: expected quoted string");
    const char quote = s[i++];
    std::string out;
    while (i < s.size() && s[i] != quote) out.push_back(s[i++]);
    if (i >= s.size()) raise(ErrorCode::BadHeader, "npy header: unterminated string");
    ++i;
    return out;
}

HeaderFields parse_header_dict(const std::string& header) {
    HeaderFields f;
    bool saw_descr = false, saw_order = false, saw_shape = false;
    std::size_t i = 0;
    skip_ws(header, i);
    if (i >= header.size() || header[i] != '{')
        raise(ErrorCode::BadHeader, "npy header: missing '{'");
    ++i;
    while (true) {
        skip_ws(header, i);
        if (i < header.size() && header[i] == ',') { ++i; continue; }
        if (i < header.size() && header[i] == '}') break;
        if (i >= header.size()) raise(ErrorCode::BadHeader, "npy header: missing '}'");
        const std::string key = parse_py_string(header, i);
        skip_ws(header, i);
        if (i >= header.size() || header[i] != ':')
            raise(ErrorCode::BadHeader, "npy header: expected ':' after key");
        ++i;
        skip_ws(header, i);
        if (key == "descr") {
            f.descr = parse_py_string(header, i);
            saw_descr = true;
        } else if (key == "fortran_order") {
            if (header.compare(i, 4, "True") == 0) { f.fortran_order = true; i += 4; }
            else if (header.compare(i, 5, "False") == 0) { f.fortran_order = false; i += 5; }
            else raise(ErrorCode::BadHeader, "npy header: fortran_order must be True/False");
            saw_order = true;
        } else if (key == "shape") {
            if (i >= header.size() || header[i] != '(')
                raise(ErrorCode::BadHeader, "npy header: shape must be a tuple");
            ++i;
            while (true) {
                skip_ws(header, i);
                if (i < header.size() && header[i] == ')') { ++i; break; }
                if (i >= header.size() || !std::isdigit(static_cast<unsigned char>(header[i])))
                    raise(ErrorCode::BadHeader, "npy header: bad shape entry");
                std::size_t dim = 0;
                while (i < header.size() && std::isdigit(static_cast<unsigned char>(header[i])))
                    dim = dim * 10 + static_cast<std::size_t>(header[i++] - '0');
                f.shape.push_back(dim);
                skip_ws(header, i);
                if (i < header.size() && header[i] == ',') ++i;
            }
            saw_shape = true;
        } else {
            raise(ErrorCode::BadHeader, "npy header: unknown key '" + key + "'");
        }
    }
    if (!saw_descr || !saw_order || !saw_shape)
        raise(ErrorCode::BadHeader, "npy header: missing required key");
    return f;
}

constexpr std::uint8_t kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

// Fixed DOS date/time stamp (1980-01-01 00:00:00) keeps archives
// byte-identical across runs.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = 0x0021;

std::vector<std::uint8_t> inflate_raw(const std::uint8_t* src, std::size_t src_len,
                                      std::size_t dst_len) {
    std::vector<std::uint8_t> out(dst_len);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK)
        raise(ErrorCode::IoFailure, "inflateInit2 failed");
    zs.next_in = const_cast<Bytef*>(src);
    zs.avail_in = static_cast<uInt>(src_len);
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(dst_len);
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END)
        raise(ErrorCode::IoFailure, "deflated npz member failed to decompress");
    return out;
}

} // namespace

std::size_t NpyArray::element_size() const { return dtype_size(descr); }

std::size_t NpyArray::element_count() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::vector<double> NpyArray::as_f64() const {
    if (descr != "<f8")
        raise(ErrorCode::BadHeader, "array dtype is '" + descr + "', expected <f8");
    std::vector<double> out(element_count());
    std::memcpy(out.data(), data.data(), out.size() * sizeof(double));
    return out;
}

std::vector<std::int64_t> NpyArray::as_i64() const {
    if (descr != "<i8")
        raise(ErrorCode::BadHeader, "array dtype is '" + descr + "', expected <i8");
    std::vector<std::int64_t> out(element_count());
    std::memcpy(out.data(), data.data(), out.size() * sizeof(std::int64_t));
    return out;
}

NpyArray NpyArray::from_f64(const std::vector<double>& values, std::vector<std::size_t> shape) {
    NpyArray a;
    a.descr = "<f8";
    a.shape = std::move(shape);
    a.data.resize(values.size() * sizeof(double));
    std::memcpy(a.data.data(), values.data(), a.data.size());
    if (a.element_count() != values.size())
        raise(ErrorCode::BadShape, "shape does not match value count");
    return a;
}

NpyArray NpyArray::from_i64(const std::vector<std::int64_t>& values, std::vector<std::size_t> shape) {
    NpyArray a;
    a.descr = "<i8";
    a.shape = std::move(shape);
    a.data.resize(values.size() * sizeof(std::int64_t));
    std::memcpy(a.data.data(), values.data(), a.data.size());
    if (a.element_count() != values.size())
        raise(ErrorCode::BadShape, "shape does not match value count");
    return a;
}

NpyArray NpyArray::from_u8(const std::vector<std::uint8_t>& values, std::vector<std::size_t> shape) {
    NpyArray a;
    a.descr = "|u1";
    a.shape = std::move(shape);
    a.data = values;
    if (a.element_count() != values.size())
        raise(ErrorCode::BadShape, "shape does not match value count");
    return a;
}

std::vector<std::uint8_t> npy_encode(const NpyArray& array) {
    std::string dict = "{'descr': '" + array.descr + "', 'fortran_order': False, 'shape': " +
                       shape_tuple(array.shape) + ", }";
    // magic(6) + version(2) + headerlen(2) + dict, padded with spaces so the
    // total preamble is a multiple of 64 and ends in '\n'.
    std::size_t preamble = 6 + 2 + 2 + dict.size() + 1;
    const std::size_t padded = (preamble + 63) / 64 * 64;
    dict.append(padded - preamble, ' ');
    dict.push_back('\n');
    if (dict.size() > 0xffff)
        raise(ErrorCode::BadHeader, "npy header too large for version 1.0");

    std::vector<std::uint8_t> out;
    out.reserve(padded + array.data.size());
    out.insert(out.end(), kMagic, kMagic + 6);
    out.push_back(0x01);
    out.push_back(0x00);
    put_u16le(out, static_cast<std::uint16_t>(dict.size()));
    out.insert(out.end(), dict.begin(), dict.end());
    const std::size_t expected = array.element_count() * array.element_size();
    if (array.data.size() != expected)
        raise(ErrorCode::BadShape, "payload size does not match header shape");
    out.insert(out.end(), array.data.begin(), array.data.end());
    return out;
}

NpyArray npy_decode(const std::uint8_t* bytes, std::size_t size) {
    if (size < 10 || std::memcmp(bytes, kMagic, 6) != 0)
        raise(ErrorCode::BadHeader, "not an npy file (bad magic)");
    const std::uint8_t major = bytes[6];
    std::size_t header_len = 0;
    std::size_t header_off = 0;
    if (major == 1) {
        header_len = get_u16le(bytes + 8);
        header_off = 10;
    } else if (major == 2 || major == 3) {
        if (size < 12) raise(ErrorCode::BadHeader, "truncated npy header");
        header_len = get_u32le(bytes + 8);
        header_off = 12;
    } else {
        raise(ErrorCode::BadHeader, "unsupported npy version");
    }
    if (header_off + header_len > size)
        raise(ErrorCode::BadHeader, "npy header extends past end of file");
    const std::string header(reinterpret_cast<const char*>(bytes + header_off), header_len);
    const HeaderFields f = parse_header_dict(header);
    if (f.fortran_order)
        raise(ErrorCode::BadHeader, "fortran-order arrays are not supported");

    NpyArray a;
    a.descr = f.descr;
    a.shape = f.shape;
    const std::size_t payload = a.element_count() * a.element_size();
    const std::size_t data_off = header_off + header_len;
    if (data_off + payload > size)
        raise(ErrorCode::BadHeader, "npy payload truncated");
    a.data.assign(bytes + data_off, bytes + data_off + payload);
    return a;
}

void write_npy(const std::string& path, const NpyArray& array) {
    const auto bytes = npy_encode(array);
    atomic_write_file(path, bytes.data(), bytes.size());
}

NpyArray read_npy(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return npy_decode(bytes.data(), bytes.size());
}

void write_npz(const std::string& path, const NpzArchive& archive) {
    std::vector<std::uint8_t> out;
    struct CentralEntry {
        std::string name;
        std::uint32_t crc;
        std::uint32_t size;
        std::uint32_t offset;
    };
    std::vector<CentralEntry> entries;

    for (const auto& [key, array] : archive.arrays) {
        const std::string name = key + ".npy";
        const auto payload = npy_encode(array);
        const auto crc = static_cast<std::uint32_t>(
            crc32(crc32(0L, Z_NULL, 0), payload.data(), static_cast<uInt>(payload.size())));
        const auto offset = static_cast<std::uint32_t>(out.size());

        put_u32le(out, 0x04034b50);          // local file header
        put_u16le(out, 20);                  // version needed
        put_u16le(out, 0);                   // flags
        put_u16le(out, 0);                   // method: stored
        put_u16le(out, kDosTime);
        put_u16le(out, kDosDate);
        put_u32le(out, crc);
        put_u32le(out, static_cast<std::uint32_t>(payload.size()));
        put_u32le(out, static_cast<std::uint32_t>(payload.size()));
        put_u16le(out, static_cast<std::uint16_t>(name.size()));
        put_u16le(out, 0);                   // extra length
        out.insert(out.end(), name.begin(), name.end());
        out.insert(out.end(), payload.begin(), payload.end());

        entries.push_back({name, crc, static_cast<std::uint32_t>(payload.size()), offset});
    }

    const auto central_off = static_cast<std::uint32_t>(out.size());
    for (const auto& e : entries) {
        put_u32le(out, 0x02014b50); // central directory header
        put_u16le(out, 20);
        put_u16le(out, 20);
        put_u16le(out, 0);
        put_u16le(out, 0);
        put_u16le(out, kDosTime);
        put_u16le(out, kDosDate);
        put_u32le(out, e.crc);
        put_u32le(out, e.size);
        put_u32le(out, e.size);
        put_u16le(out, static_cast<std::uint16_t>(e.name.size()));
        put_u16le(out, 0);
        put_u16le(out, 0);
        put_u16le(out, 0);
        put_u16le(out, 0);
        put_u32le(out, 0);
        put_u32le(out, e.offset);
        out.insert(out.end(), e.name.begin(), e.name.end());
    }
    const auto central_size = static_cast<std::uint32_t>(out.size()) - central_off;

    put_u32le(out, 0x06054b50); // end of central directory
    put_u16le(out, 0);
    put_u16le(out, 0);
    put_u16le(out, static_cast<std::uint16_t>(entries.size()));
    put_u16le(out, static_cast<std::uint16_t>(entries.size()));
    put_u32le(out, central_size);
    put_u32le(out, central_off);
    put_u16le(out, 0);

    atomic_write_file(path, out.data(), out.size());
}

NpzArchive read_npz(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() < 22) raise(ErrorCode::BadHeader, "npz too small for zip structure");

    // Locate end-of-central-directory (no zip comment is written, but scan
    // backwards anyway to accept archives that carry one).
    std::size_t eocd = std::string::npos;
    const std::size_t scan_floor = bytes.size() >= 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
    for (std::size_t i = bytes.size() - 22; ; --i) {
        if (get_u32le(bytes.data() + i) == 0x06054b50) { eocd = i; break; }
        if (i == scan_floor) break;
    }
    if (eocd == std::string::npos)
        raise(ErrorCode::BadHeader, "npz: end-of-central-directory not found");

    const std::uint16_t entry_count = get_u16le(bytes.data() + eocd + 10);
    std::size_t pos = get_u32le(bytes.data() + eocd + 16);

    NpzArchive archive;
    for (std::uint16_t e = 0; e < entry_count; ++e) {
        if (pos + 46 > bytes.size() || get_u32le(bytes.data() + pos) != 0x02014b50)
            raise(ErrorCode::BadHeader, "npz: bad central directory entry");
        const std::uint16_t method = get_u16le(bytes.data() + pos + 10);
        const std::uint32_t csize = get_u32le(bytes.data() + pos + 20);
        const std::uint32_t usize = get_u32le(bytes.data() + pos + 24);
        const std::uint16_t name_len = get_u16le(bytes.data() + pos + 28);
        const std::uint16_t extra_len = get_u16le(bytes.data() + pos + 30);
        const std::uint16_t comment_len = get_u16le(bytes.data() + pos + 32);
        const std::uint32_t local_off = get_u32le(bytes.data() + pos + 42);
        const std::string name(reinterpret_cast<const char*>(bytes.data() + pos + 46), name_len);
        pos += 46u + name_len + extra_len + comment_len;

        if (local_off + 30 > bytes.size() || get_u32le(bytes.data() + local_off) != 0x04034b50)
            raise(ErrorCode::BadHeader, "npz: bad local file header");
        const std::uint16_t lname = get_u16le(bytes.data() + local_off + 26);
        const std::uint16_t lextra = get_u16le(bytes.data() + local_off + 28);
        const std::size_t data_off = local_off + 30u + lname + lextra;
        if (data_off + csize > bytes.size())
            raise(ErrorCode::BadHeader, "npz: member data truncated");

        std::vector<std::uint8_t> payload;
        if (method == 0) {
            payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_off),
                           bytes.begin() + static_cast<std::ptrdiff_t>(data_off + csize));
        } else if (method == 8) {
            payload = inflate_raw(bytes.data() + data_off, csize, usize);
        } else {
            raise(ErrorCode::BadHeader, "npz: unsupported compression method");
        }

        std::string key = name;
        if (key.size() > 4 && key.compare(key.size() - 4, 4, ".npy") == 0)
            key.resize(key.size() - 4);
        archive.arrays[key] = npy_decode(payload.data(), payload.size());
    }
    return archive;
}

} // namespace evtk
