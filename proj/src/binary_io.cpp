#include "stacksent/binary_io.hpp"

#include "stacksent/error.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

namespace stacksent {

void ByteReader::require(std::size_t n) const
{
    if (n > remaining()) {
        fail(ErrorCode::Truncated, "need " + std::to_string(n) + " bytes at offset " +
                                       std::to_string(pos_) + ", " + std::to_string(remaining()) +
                                       " left");
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) fail(ErrorCode::Io, "read failed for " + path.string());
    return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) fail(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::Io, "rename to " + path.string() + " failed: " + ec.message());
}

} // namespace stacksent
