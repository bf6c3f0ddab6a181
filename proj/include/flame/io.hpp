#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flame {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, ByteView data);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Writes to a sibling temp file and renames over the target, so readers see
/// either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, ByteView data);
void write_text_file_atomic(const std::filesystem::path& path, std::string_view text);

/// Returns true when the file was (re)written, false when the existing file
/// already held identical bytes.
bool write_file_if_changed(const std::filesystem::path& path, ByteView data);
bool copy_file_if_changed(const std::filesystem::path& from, const std::filesystem::path& to);

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(ByteView data, std::uint64_t seed = 0xcbf29ce484222325ULL);
/// The shortest decimal that round-trips `v` as a float, as a double
/// (0.1f -> 0.1). Narrowing the result back gives `v` again.
double widen_float(float v);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(as_bytes(s)); }

std::string hex64(std::uint64_t v);

/// Forward-only reader over a byte span with explicit endianness.
class ByteReader {
public:
    ByteReader(ByteView data, bool little_endian) : data_(data), le_(little_endian) {}

    std::size_t size() const { return data_.size(); }
    bool has(std::size_t offset, std::size_t n) const {
        return offset <= data_.size() && n <= data_.size() - offset;
    }
    std::uint8_t u8(std::size_t offset) const;
    std::uint16_t u16(std::size_t offset) const;
    std::uint32_t u32(std::size_t offset) const;
    std::uint64_t u64(std::size_t offset) const;
    float f32(std::size_t offset) const;
    ByteView slice(std::size_t offset, std::size_t n) const;

private:
    ByteView data_;
    bool le_;
};

class ByteWriter {
public:
    explicit ByteWriter(bool little_endian) : le_(little_endian) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void bytes(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
    void str(std::string_view s) { bytes(as_bytes(s)); }
    void reserve(std::size_t n) { out_.reserve(n); }

    void patch_u32(std::size_t offset, std::uint32_t v);
    std::size_t size() const { return out_.size(); }
    Bytes& data() { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
    bool le_;
};

}  // namespace flame
