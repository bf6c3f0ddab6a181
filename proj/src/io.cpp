#include <charconv>
#include "flame/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "flame/error.hpp"

namespace fs = std::filesystem;

namespace flame {

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    if (size < 0) fail(ErrorCode::IoFailure, "cannot size " + path.string());
    in.seekg(0, std::ios::beg);
    Bytes data(static_cast<std::size_t>(size));
    if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), size)) {
        fail(ErrorCode::IoFailure, "short read on " + path.string());
    }
    return data;
}

std::string read_text_file(const fs::path& path) {
    Bytes b = read_file(path);
    return {b.begin(), b.end()};
}

void write_file(const fs::path& path, ByteView data) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot create " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::IoFailure, "short write on " + path.string());
}

void write_text_file(const fs::path& path, std::string_view text) { write_file(path, as_bytes(text)); }

void write_file_atomic(const fs::path& path, ByteView data) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, data);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorCode::IoFailure, "cannot rename into " + path.string());
    }
}

void write_text_file_atomic(const fs::path& path, std::string_view text) {
    write_file_atomic(path, as_bytes(text));
}

bool write_file_if_changed(const fs::path& path, ByteView data) {
    std::error_code ec;
    if (fs::is_regular_file(path, ec) && fs::file_size(path, ec) == data.size()) {
        Bytes existing = read_file(path);
        if (std::equal(existing.begin(), existing.end(), data.begin(), data.end())) return false;
    }
    write_file_atomic(path, data);
    return true;
}

bool copy_file_if_changed(const fs::path& from, const fs::path& to) {
    Bytes data = read_file(from);
    return write_file_if_changed(to, data);
}

std::uint64_t fnv1a64(ByteView data, std::uint64_t h) {
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

namespace {
[[noreturn]] void out_of_bounds(std::size_t offset, std::size_t n, std::size_t size) {
    fail(ErrorCode::CorruptPayload, fmt::format("read of {} bytes at offset {} exceeds buffer of {}",
                                                n, offset, size));
}
}  // namespace

std::uint8_t ByteReader::u8(std::size_t o) const {
    if (!has(o, 1)) out_of_bounds(o, 1, data_.size());
    return data_[o];
}

std::uint16_t ByteReader::u16(std::size_t o) const {
    if (!has(o, 2)) out_of_bounds(o, 2, data_.size());
    return le_ ? static_cast<std::uint16_t>(data_[o] | (data_[o + 1] << 8))
               : static_cast<std::uint16_t>((data_[o] << 8) | data_[o + 1]);
}

std::uint32_t ByteReader::u32(std::size_t o) const {
    if (!has(o, 4)) out_of_bounds(o, 4, data_.size());
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t b = data_[o + (le_ ? 3 - i : i)];
        v = (v << 8) | b;
    }
    return v;
}

std::uint64_t ByteReader::u64(std::size_t o) const {
    std::uint64_t a = u32(o), b = u32(o + 4);
    return le_ ? (b << 32) | a : (a << 32) | b;
}

float ByteReader::f32(std::size_t o) const { return std::bit_cast<float>(u32(o)); }

ByteView ByteReader::slice(std::size_t o, std::size_t n) const {
    if (!has(o, n)) out_of_bounds(o, n, data_.size());
    return data_.subspan(o, n);
}

void ByteWriter::u16(std::uint16_t v) {
    if (le_) {
        out_.push_back(static_cast<std::uint8_t>(v));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    } else {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        int shift = le_ ? 8 * i : 8 * (3 - i);
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void ByteWriter::u64(std::uint64_t v) {
    if (le_) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    } else {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::patch_u32(std::size_t offset, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        int shift = le_ ? 8 * i : 8 * (3 - i);
        out_[offset + i] = static_cast<std::uint8_t>(v >> shift);
    }
}

double widen_float(float v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    double d = v;
    if (ec == std::errc{}) std::from_chars(buf, end, d);
    return d;
}

}  // namespace flame
