#include "flame/exif.hpp"

#include <algorithm>
#include <cstring>
#include <string_view>
#include <vector>

#include "flame/error.hpp"

namespace flame::exif {

namespace {

enum Tag : std::uint16_t {
    kMake = 0x010F,
    kModel = 0x0110,
    kDateTime = 0x0132,
    kExifIfd = 0x8769,
    kDateTimeOriginal = 0x9003,
    kUserComment = 0x9286,
    kSubSecTimeOriginal = 0x9291,
    kPixelX = 0xA002,
    kPixelY = 0xA003,
};

enum Type : std::uint16_t { kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5, kUndefined = 7,
                            kSLong = 9, kSRational = 10 };

constexpr std::string_view kAsciiCharset{"ASCII\0\0\0", 8};

std::size_t type_size(std::uint16_t type) {
    switch (type) {
        case kByte: case kAscii: case kUndefined: return 1;
        case kShort: return 2;
        case kLong: case kSLong: return 4;
        case kRational: case kSRational: return 8;
        default: return 0;
    }
}

struct Entry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::size_t value_offset;  // absolute offset (within TIFF block) of the value bytes
};

// TIFF-structured block following the 6-byte signature.
class Block {
public:
    explicit Block(ByteView tiff) : tiff_(tiff), reader_(tiff, true) {
        if (tiff.size() < 8) fail(ErrorCode::CorruptPayload, "EXIF block too short");
        if (tiff[0] == 'I' && tiff[1] == 'I') {
            reader_ = ByteReader(tiff, true);
        } else if (tiff[0] == 'M' && tiff[1] == 'M') {
            reader_ = ByteReader(tiff, false);
        } else {
            fail(ErrorCode::CorruptPayload, "EXIF block has no byte-order mark");
        }
        if (reader_.u16(2) != 42) fail(ErrorCode::CorruptPayload, "EXIF block has bad TIFF magic");
    }

    const ByteReader& reader() const { return reader_; }
    bool little_endian() const { return tiff_[0] == 'I'; }
    std::uint32_t first_ifd() const { return reader_.u32(4); }

    std::vector<Entry> entries(std::uint32_t ifd_offset) const {
        std::vector<Entry> out;
        std::uint16_t n = reader_.u16(ifd_offset);
        if (!reader_.has(ifd_offset + 2, static_cast<std::size_t>(n) * 12)) {
            fail(ErrorCode::CorruptPayload, "EXIF IFD runs past end of block");
        }
        for (std::uint16_t i = 0; i < n; ++i) {
            std::size_t at = ifd_offset + 2 + static_cast<std::size_t>(i) * 12;
            Entry e{reader_.u16(at), reader_.u16(at + 2), reader_.u32(at + 4), at + 8};
            std::size_t bytes = type_size(e.type) * e.count;
            if (bytes > 4) e.value_offset = reader_.u32(at + 8);
            if (type_size(e.type) != 0 && !reader_.has(e.value_offset, bytes)) {
                fail(ErrorCode::CorruptPayload, "EXIF value runs past end of block");
            }
            out.push_back(e);
        }
        return out;
    }

    std::string ascii(const Entry& e) const {
        ByteView v = reader_.slice(e.value_offset, e.count);
        std::string s(v.begin(), v.end());
        while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
        return s;
    }

    std::optional<std::uint32_t> integer(const Entry& e) const {
        if (e.count < 1) return std::nullopt;
        if (e.type == kShort) return reader_.u16(e.value_offset);
        if (e.type == kLong) return reader_.u32(e.value_offset);
        return std::nullopt;
    }

    ByteView raw(const Entry& e) const { return reader_.slice(e.value_offset, type_size(e.type) * e.count); }

private:
    ByteView tiff_;
    ByteReader reader_;
};

std::map<std::string, std::string> parse_user_comment(ByteView v) {
    std::map<std::string, std::string> out;
    if (v.size() < 8 || std::memcmp(v.data(), kAsciiCharset.data(), 8) != 0) return out;
    std::string_view text(reinterpret_cast<const char*>(v.data()) + 8, v.size() - 8);
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        auto eq = line.find('=');
        if (eq != std::string_view::npos && eq > 0) {
            out.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
        }
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

struct OutEntry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    Bytes value;  // already in little-endian order
};

OutEntry ascii_entry(std::uint16_t tag, const std::string& s) {
    Bytes v(s.begin(), s.end());
    v.push_back(0);
    return {tag, kAscii, static_cast<std::uint32_t>(v.size()), std::move(v)};
}

OutEntry long_entry(std::uint16_t tag, std::uint32_t value) {
    ByteWriter w(true);
    w.u32(value);
    return {tag, kLong, 1, w.take()};
}

// Serialized size of an IFD plus its out-of-line values.
std::size_t ifd_size(const std::vector<OutEntry>& entries) {
    std::size_t size = 2 + entries.size() * 12 + 4;
    for (const auto& e : entries) {
        if (e.value.size() > 4) size += e.value.size() + (e.value.size() & 1);
    }
    return size;
}

void write_ifd(ByteWriter& w, std::vector<OutEntry> entries, std::uint32_t next_ifd) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.tag < b.tag; });
    std::size_t base = w.size();
    std::size_t data_at = base + 2 + entries.size() * 12 + 4;
    w.u16(static_cast<std::uint16_t>(entries.size()));
    for (const auto& e : entries) {
        w.u16(e.tag);
        w.u16(e.type);
        w.u32(e.count);
        if (e.value.size() <= 4) {
            Bytes inline_value = e.value;
            inline_value.resize(4, 0);
            w.bytes(inline_value);
        } else {
            w.u32(static_cast<std::uint32_t>(data_at - 6));  // offsets are relative to the TIFF header
            data_at += e.value.size() + (e.value.size() & 1);
        }
    }
    w.u32(next_ifd);
    for (const auto& e : entries) {
        if (e.value.size() > 4) {
            w.bytes(e.value);
            if (e.value.size() & 1) w.u8(0);
        }
    }
}

}  // namespace

bool is_exif_segment(ByteView body) {
    return body.size() >= kSignature.size() &&
           std::memcmp(body.data(), kSignature.data(), kSignature.size()) == 0;
}

Fields parse(ByteView body) {
    if (!is_exif_segment(body)) fail(ErrorCode::CorruptPayload, "APP1 segment is not EXIF");
    Block block(body.subspan(kSignature.size()));
    Fields f;
    std::optional<std::uint32_t> exif_ifd;
    for (const Entry& e : block.entries(block.first_ifd())) {
        switch (e.tag) {
            case kMake: if (e.type == kAscii) f.make = block.ascii(e); break;
            case kModel: if (e.type == kAscii) f.model = block.ascii(e); break;
            case kDateTime: if (e.type == kAscii) f.datetime = block.ascii(e); break;
            case kExifIfd: exif_ifd = block.integer(e); break;
            default: break;
        }
    }
    if (exif_ifd) {
        for (const Entry& e : block.entries(*exif_ifd)) {
            switch (e.tag) {
                case kDateTimeOriginal: if (e.type == kAscii) f.datetime_original = block.ascii(e); break;
                case kSubSecTimeOriginal: if (e.type == kAscii) f.subsec_time_original = block.ascii(e); break;
                case kPixelX: f.pixel_x = block.integer(e); break;
                case kPixelY: f.pixel_y = block.integer(e); break;
                case kUserComment:
                    if (e.type == kUndefined) f.extra = parse_user_comment(block.raw(e));
                    break;
                default: break;
            }
        }
    }
    return f;
}

Bytes build(const Fields& f) {
    std::vector<OutEntry> ifd0;
    if (f.make) ifd0.push_back(ascii_entry(kMake, *f.make));
    if (f.model) ifd0.push_back(ascii_entry(kModel, *f.model));
    if (f.datetime) ifd0.push_back(ascii_entry(kDateTime, *f.datetime));

    std::vector<OutEntry> exif_ifd;
    if (f.datetime_original) exif_ifd.push_back(ascii_entry(kDateTimeOriginal, *f.datetime_original));
    if (!f.extra.empty()) {
        std::string text(kAsciiCharset);
        for (const auto& [k, v] : f.extra) text += k + "=" + v + "\n";
        Bytes value(text.begin(), text.end());
        auto count = static_cast<std::uint32_t>(value.size());
        exif_ifd.push_back({kUserComment, kUndefined, count, std::move(value)});
    }
    if (f.subsec_time_original) exif_ifd.push_back(ascii_entry(kSubSecTimeOriginal, *f.subsec_time_original));
    if (f.pixel_x) exif_ifd.push_back(long_entry(kPixelX, *f.pixel_x));
    if (f.pixel_y) exif_ifd.push_back(long_entry(kPixelY, *f.pixel_y));

    // Pointer value is fixed up once the IFD0 size is known.
    ifd0.push_back(long_entry(kExifIfd, 0));
    std::uint32_t exif_offset = static_cast<std::uint32_t>(8 + ifd_size(ifd0));
    ifd0.back() = long_entry(kExifIfd, exif_offset);

    ByteWriter w(true);
    w.str(kSignature);
    w.str("II");
    w.u16(42);
    w.u32(8);
    write_ifd(w, std::move(ifd0), 0);
    write_ifd(w, std::move(exif_ifd), 0);
    return w.take();
}

Bytes patch_pixel_dimensions(ByteView body, std::uint32_t width, std::uint32_t height) {
    if (!is_exif_segment(body)) fail(ErrorCode::CorruptPayload, "APP1 segment is not EXIF");
    Bytes out(body.begin(), body.end());
    ByteView tiff = ByteView(out).subspan(kSignature.size());
    Block block(tiff);
    std::optional<std::uint32_t> exif_ifd;
    for (const Entry& e : block.entries(block.first_ifd())) {
        if (e.tag == kExifIfd) exif_ifd = block.integer(e);
    }
    if (!exif_ifd) return out;
    const bool le = block.little_endian();
    for (const Entry& e : block.entries(*exif_ifd)) {
        if ((e.tag != kPixelX && e.tag != kPixelY) || e.count != 1) continue;
        std::uint32_t v = e.tag == kPixelX ? width : height;
        std::size_t at = kSignature.size() + e.value_offset;
        if (e.type == kLong) {
            for (int i = 0; i < 4; ++i) {
                out[at + i] = static_cast<std::uint8_t>(v >> (le ? 8 * i : 8 * (3 - i)));
            }
        } else if (e.type == kShort && v <= 0xFFFF) {
            out[at + (le ? 0 : 1)] = static_cast<std::uint8_t>(v);
            out[at + (le ? 1 : 0)] = static_cast<std::uint8_t>(v >> 8);
        }
    }
    return out;
}

}  // namespace flame::exif
