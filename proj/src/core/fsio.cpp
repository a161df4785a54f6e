#include "core/fsio.hpp"
#include "core/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace evtk {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorCode::IoFailure, "cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(size);
    if (size > 0)
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in)
        raise(ErrorCode::IoFailure, "short read on " + path);
    return bytes;
}

void atomic_write_file(const std::string& path, const void* data, std::size_t size) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            raise(ErrorCode::IoFailure, "cannot open " + tmp);
        if (size > 0)
            out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out)
            raise(ErrorCode::IoFailure, "short write on " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        raise(ErrorCode::IoFailure, "rename " + tmp + " -> " + path + ": " + ec.message());
}

bool file_exists(const std::string& path) {
    std::error_code ec;
    return std::filesystem::exists(path, ec);
}

} // namespace evtk
