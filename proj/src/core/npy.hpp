#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace evtk {

/// In-memory NPY array: dtype descriptor string, C-order shape, raw bytes.
/// Only the little-endian scalar dtypes used by the container formats are
/// supported.
struct NpyArray {
    std::string descr = "<f8";
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> data;

    std::size_t element_count() const;
    std::size_t element_size() const;

    std::vector<double> as_f64() const;
    std::vector<std::int64_t> as_i64() const;

    static NpyArray from_f64(const std::vector<double>& values, std::vector<std::size_t> shape);
    static NpyArray from_i64(const std::vector<std::int64_t>& values, std::vector<std::size_t> shape);
    static NpyArray from_u8(const std::vector<std::uint8_t>& values, std::vector<std::size_t> shape);
};

// NPY v1.0 serialization. Headers carry the canonical padded dict and are
// 64-byte aligned, which also satisfies the original 16-byte grammar rule.
std::vector<std::uint8_t> npy_encode(const NpyArray& array);
NpyArray npy_decode(const std::uint8_t* bytes, std::size_t size);

void write_npy(const std::string& path, const NpyArray& array);
NpyArray read_npy(const std::string& path);

/// NPZ = zip of .npy members. Written uncompressed (stored) with fixed
/// timestamps; reading also accepts deflated members.
struct NpzArchive {
    std::map<std::string, NpyArray> arrays; // keys without the ".npy" suffix

    bool contains(const std::string& name) const { return arrays.count(name) > 0; }
};

void write_npz(const std::string& path, const NpzArchive& archive);
NpzArchive read_npz(const std::string& path);

} // namespace evtk
