#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evtk::h5 {

/// Thin serialization layer over the HDF5 C library. All calls are routed
/// through one process-wide mutex: the serial HDF5 build is not thread-safe.
/// Object timestamp tracking is disabled on write so identical data produces
/// identical files.

bool is_hdf5_file(const std::string& path);

struct DatasetInfo {
    std::string name;
    std::vector<std::size_t> shape;
    std::string type_label; // "i64", "u8", ... best-effort description
};

std::vector<DatasetInfo> list_datasets(const std::string& path);

bool has_dataset(const std::string& path, const std::string& name);

std::vector<std::size_t> dataset_shape(const std::string& path, const std::string& name);

std::vector<std::int64_t> read_i64(const std::string& path, const std::string& name,
                                   std::vector<std::size_t>& shape);
std::vector<std::uint8_t> read_u8(const std::string& path, const std::string& name,
                                  std::vector<std::size_t>& shape);

/// Writes one file with the given datasets in a single open/close cycle.
/// Pass attrs on the events dataset via write_events_file.
struct I64Dataset {
    std::string name;
    std::vector<std::size_t> shape;
    const std::int64_t* data = nullptr;
};

struct U8Dataset {
    std::string name;
    std::vector<std::size_t> shape;
    const std::uint8_t* data = nullptr;
};

struct I64Attr {
    std::string dataset; // attach target, must be one of the written datasets
    std::string name;
    std::int64_t value = 0;
};

void write_file(const std::string& path, const std::vector<I64Dataset>& i64_sets,
                const std::vector<U8Dataset>& u8_sets, const std::vector<I64Attr>& attrs);

bool read_i64_attr(const std::string& path, const std::string& dataset, const std::string& name,
                   std::int64_t& out);

} // namespace evtk::h5
