#include "flame/jpeg.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

#include <jpeglib.h>

#include "flame/error.hpp"

namespace flame::jpeg {

bool Segment::starts_with(std::string_view prefix) const {
    return body.size() >= prefix.size() &&
           std::memcmp(body.data(), prefix.data(), prefix.size()) == 0;
}

bool has_magic(ByteView data) { return data.size() >= 3 && data[0] == 0xFF && data[1] == 0xD8 && data[2] == 0xFF; }

Container Container::parse(ByteView data) {
    if (!has_magic(data)) fail(ErrorCode::NotAJpeg, "missing JPEG SOI marker");
    Container c;
    std::size_t pos = 2;
    while (true) {
        if (pos >= data.size()) fail(ErrorCode::CorruptPayload, "JPEG ends before scan data");
        if (data[pos] != 0xFF) fail(ErrorCode::CorruptPayload, "expected JPEG marker");
        while (pos < data.size() && data[pos] == 0xFF) ++pos;  // fill bytes
        if (pos >= data.size()) fail(ErrorCode::CorruptPayload, "JPEG ends inside marker");
        std::uint8_t marker = data[pos++];
        if (marker == 0xDA || marker == 0xD9) {
            c.scan.assign({0xFF, marker});
            c.scan.insert(c.scan.end(), data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
            return c;
        }
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;  // standalone
        if (pos + 2 > data.size()) fail(ErrorCode::CorruptPayload, "truncated JPEG segment length");
        std::size_t len = (static_cast<std::size_t>(data[pos]) << 8) | data[pos + 1];
        if (len < 2 || pos + len > data.size()) {
            fail(ErrorCode::CorruptPayload, "JPEG segment length exceeds file");
        }
        Segment seg;
        seg.marker = marker;
        seg.body.assign(data.begin() + static_cast<std::ptrdiff_t>(pos + 2),
                        data.begin() + static_cast<std::ptrdiff_t>(pos + len));
        c.segments.push_back(std::move(seg));
        pos += len;
    }
}

Bytes Container::serialize() const {
    Bytes out{0xFF, 0xD8};
    for (const auto& s : segments) {
        if (s.body.size() > kMaxSegmentBody) fail(ErrorCode::InvalidArgument, "JPEG segment too large");
        std::size_t len = s.body.size() + 2;
        out.push_back(0xFF);
        out.push_back(s.marker);
        out.push_back(static_cast<std::uint8_t>(len >> 8));
        out.push_back(static_cast<std::uint8_t>(len));
        out.insert(out.end(), s.body.begin(), s.body.end());
    }
    out.insert(out.end(), scan.begin(), scan.end());
    return out;
}

const Segment* Container::find(std::uint8_t marker, std::string_view prefix) const {
    for (const auto& s : segments) {
        if (s.marker == marker && s.starts_with(prefix)) return &s;
    }
    return nullptr;
}

std::vector<const Segment*> Container::find_all(std::uint8_t marker, std::string_view prefix) const {
    std::vector<const Segment*> out;
    for (const auto& s : segments) {
        if (s.marker == marker && s.starts_with(prefix)) out.push_back(&s);
    }
    return out;
}

void Container::remove(std::uint8_t marker, std::string_view prefix) {
    std::erase_if(segments, [&](const Segment& s) { return s.marker == marker && s.starts_with(prefix); });
}

void Container::insert_front(Segment seg) {
    std::vector<Segment> v;
    v.push_back(std::move(seg));
    insert_front(std::move(v));
}

void Container::insert_front(std::vector<Segment> segs) {
    auto it = segments.begin();
    while (it != segments.end() && it->marker == kApp0) ++it;
    segments.insert(it, std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
}

std::optional<Size2> Container::frame_size() const {
    for (const auto& s : segments) {
        bool sof = s.marker >= 0xC0 && s.marker <= 0xCF && s.marker != 0xC4 && s.marker != 0xC8 &&
                   s.marker != 0xCC;
        if (sof && s.body.size() >= 5) {
            int h = (s.body[1] << 8) | s.body[2];
            int w = (s.body[3] << 8) | s.body[4];
            return Size2{w, h};
        }
    }
    return std::nullopt;
}

namespace {

struct ErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void silence(j_common_ptr, int) {}

Bytes encode_impl(const std::uint8_t* pixels, int w, int h, int components, int quality) {
    if (w <= 0 || h <= 0) fail(ErrorCode::InvalidArgument, "cannot encode empty image");
    jpeg_compress_struct cinfo{};
    ErrorManager err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        fail(ErrorCode::InvalidArgument, std::string("JPEG encode failed: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(w);
    cinfo.image_height = static_cast<JDIMENSION>(h);
    cinfo.input_components = components;
    cinfo.in_color_space = components == 3 ? JCS_RGB : JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t stride = static_cast<std::size_t>(w) * components;
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(pixels + cinfo.next_scanline * stride);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    Bytes out(buffer, buffer + size);
    std::free(buffer);
    return out;
}

}  // namespace

Bytes encode_rgb(const RgbImage& image, int quality) {
    return encode_impl(image.pixels.data(), image.width, image.height, 3, quality);
}

Bytes encode_gray(const ByteImage& image, int quality) {
    return encode_impl(image.pixels.data(), image.width, image.height, 1, quality);
}

RgbImage decode_rgb(ByteView data) {
    if (!has_magic(data)) fail(ErrorCode::NotAJpeg, "missing JPEG SOI marker");
    jpeg_decompress_struct cinfo{};
    ErrorManager err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    err.pub.emit_message = silence;
    RgbImage image;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(ErrorCode::UnsupportedContainer, std::string("JPEG decode failed: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data.data(), static_cast<unsigned long>(data.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    image = RgbImage(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = image.pixels.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return image;
}

}  // namespace flame::jpeg
