#include "hdf5io.hpp"

#include <hdf5.h>

#include <mutex>

#include "error.hpp"

namespace evtk::h5 {
namespace {

std::mutex& h5_mutex() {
    static std::mutex m;
    return m;
}

struct Hid {
    hid_t id = H5I_INVALID_HID;
    herr_t (*closer)(hid_t) = nullptr;

    Hid(hid_t id_, herr_t (*closer_)(hid_t)) : id(id_), closer(closer_) {}
    ~Hid() {
        if (id >= 0 && closer) closer(id);
    }
    Hid(const Hid&) = delete;
    Hid& operator=(const Hid&) = delete;
    Hid(Hid&& other) noexcept : id(other.id), closer(other.closer) {
        other.id = H5I_INVALID_HID;
        other.closer = nullptr;
    }
    bool valid() const { return id >= 0; }
};

struct SilenceErrors {
    H5E_auto2_t func = nullptr;
    void* client = nullptr;
    SilenceErrors() {
        H5Eget_auto2(H5E_DEFAULT, &func, &client);
        H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
    }
    ~SilenceErrors() { H5Eset_auto2(H5E_DEFAULT, func, client); }
};

Hid open_read(const std::string& path) {
    Hid file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) raise(ErrorCode::IoFailure, "cannot open hdf5 file '" + path + "'");
    return file;
}

std::vector<std::size_t> space_dims(hid_t dset) {
    Hid space(H5Dget_space(dset), H5Sclose);
    const int rank = H5Sget_simple_extent_ndims(space.id);
    if (rank < 0) raise(ErrorCode::IoFailure, "cannot query dataset rank");
    std::vector<hsize_t> dims(static_cast<std::size_t>(rank));
    H5Sget_simple_extent_dims(space.id, dims.data(), nullptr);
    return {dims.begin(), dims.end()};
}

std::string describe_type(hid_t dset) {
    Hid type(H5Dget_type(dset), H5Tclose);
    const H5T_class_t cls = H5Tget_class(type.id);
    const std::size_t size = H5Tget_size(type.id);
    const bool is_signed = H5Tget_sign(type.id) == H5T_SGN_2;
    if (cls == H5T_INTEGER) return (is_signed ? "i" : "u") + std::to_string(size * 8);
    if (cls == H5T_FLOAT) return "f" + std::to_string(size * 8);
    return "other";
}

herr_t collect_cb(hid_t, const char* name, const H5O_info_t* info, void* op_data) {
    auto* names = static_cast<std::vector<std::string>*>(op_data);
    if (info->type == H5O_TYPE_DATASET) names->emplace_back(name);
    return 0;
}

} // namespace

bool is_hdf5_file(const std::string& path) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    const htri_t rc = H5Fis_hdf5(path.c_str());
    return rc > 0;
}

std::vector<DatasetInfo> list_datasets(const std::string& path) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    std::vector<std::string> names;
#if H5_VERSION_GE(1, 12, 0)
    H5Ovisit(file.id, H5_INDEX_NAME, H5_ITER_NATIVE, collect_cb, &names, H5O_INFO_BASIC);
#else
    H5Ovisit(file.id, H5_INDEX_NAME, H5_ITER_NATIVE, collect_cb, &names);
#endif
    std::vector<DatasetInfo> out;
    for (const auto& name : names) {
        Hid dset(H5Dopen2(file.id, name.c_str(), H5P_DEFAULT), H5Dclose);
        if (!dset.valid()) continue;
        out.push_back({name, space_dims(dset.id), describe_type(dset.id)});
    }
    return out;
}

bool has_dataset(const std::string& path, const std::string& name) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    return H5Lexists(file.id, name.c_str(), H5P_DEFAULT) > 0;
}

std::vector<std::size_t> dataset_shape(const std::string& path, const std::string& name) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    Hid dset(H5Dopen2(file.id, name.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dset.valid())
        raise(ErrorCode::MissingDataset, "dataset '" + name + "' not found in '" + path + "'");
    return space_dims(dset.id);
}

std::vector<std::int64_t> read_i64(const std::string& path, const std::string& name,
                                   std::vector<std::size_t>& shape) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    Hid dset(H5Dopen2(file.id, name.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dset.valid())
        raise(ErrorCode::MissingDataset, "dataset '" + name + "' not found in '" + path + "'");
    shape = space_dims(dset.id);
    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;
    std::vector<std::int64_t> out(count);
    if (count > 0 &&
        H5Dread(dset.id, H5T_NATIVE_INT64, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()) < 0)
        raise(ErrorCode::IoFailure, "failed reading dataset '" + name + "'");
    return out;
}

std::vector<std::uint8_t> read_u8(const std::string& path, const std::string& name,
                                  std::vector<std::size_t>& shape) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    Hid dset(H5Dopen2(file.id, name.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dset.valid())
        raise(ErrorCode::MissingDataset, "dataset '" + name + "' not found in '" + path + "'");
    shape = space_dims(dset.id);
    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;
    std::vector<std::uint8_t> out(count);
    if (count > 0 &&
        H5Dread(dset.id, H5T_NATIVE_UINT8, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()) < 0)
        raise(ErrorCode::IoFailure, "failed reading dataset '" + name + "'");
    return out;
}

void write_file(const std::string& path, const std::vector<I64Dataset>& i64_sets,
                const std::vector<U8Dataset>& u8_sets, const std::vector<I64Attr>& attrs) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) raise(ErrorCode::IoFailure, "cannot create hdf5 file '" + path + "'");

    Hid dcpl(H5Pcreate(H5P_DATASET_CREATE), H5Pclose);
    H5Pset_obj_track_times(dcpl.id, false);

    auto make_space = [](const std::vector<std::size_t>& shape) {
        std::vector<hsize_t> dims(shape.begin(), shape.end());
        return Hid(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
    };

    auto write_one = [&](const std::string& name, hid_t type, const void* data,
                         const std::vector<std::size_t>& shape) {
        Hid space = make_space(shape);
        Hid dset(H5Dcreate2(file.id, name.c_str(), type, space.id, H5P_DEFAULT, dcpl.id,
                            H5P_DEFAULT),
                 H5Dclose);
        if (!dset.valid()) raise(ErrorCode::IoFailure, "cannot create dataset '" + name + "'");
        std::size_t count = 1;
        for (std::size_t d : shape) count *= d;
        if (count > 0 && H5Dwrite(dset.id, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, data) < 0)
            raise(ErrorCode::IoFailure, "failed writing dataset '" + name + "'");
    };

    for (const auto& ds : i64_sets) write_one(ds.name, H5T_NATIVE_INT64, ds.data, ds.shape);
    for (const auto& ds : u8_sets) write_one(ds.name, H5T_NATIVE_UINT8, ds.data, ds.shape);

    for (const auto& attr : attrs) {
        Hid dset(H5Dopen2(file.id, attr.dataset.c_str(), H5P_DEFAULT), H5Dclose);
        if (!dset.valid())
            raise(ErrorCode::MissingDataset, "attribute target '" + attr.dataset + "' missing");
        Hid space(H5Screate(H5S_SCALAR), H5Sclose);
        Hid acpl(H5Pcreate(H5P_ATTRIBUTE_CREATE), H5Pclose);
        Hid a(H5Acreate2(dset.id, attr.name.c_str(), H5T_NATIVE_INT64, space.id, acpl.id,
                         H5P_DEFAULT),
              H5Aclose);
        if (!a.valid() || H5Awrite(a.id, H5T_NATIVE_INT64, &attr.value) < 0)
            raise(ErrorCode::IoFailure, "failed writing attribute '" + attr.name + "'");
    }
}

bool read_i64_attr(const std::string& path, const std::string& dataset, const std::string& name,
                   std::int64_t& out) {
    std::lock_guard lock(h5_mutex());
    SilenceErrors quiet;
    Hid file = open_read(path);
    Hid dset(H5Dopen2(file.id, dataset.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dset.valid()) return false;
    if (H5Aexists(dset.id, name.c_str()) <= 0) return false;
    Hid a(H5Aopen(dset.id, name.c_str(), H5P_DEFAULT), H5Aclose);
    if (!a.valid()) return false;
    return H5Aread(a.id, H5T_NATIVE_INT64, &out) >= 0;
}

} // namespace evtk::h5
