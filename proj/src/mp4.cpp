#include "flame/mp4.hpp"

#include <cstring>
#include <string_view>

#include "flame/error.hpp"

namespace flame::mp4 {

namespace {

// Seconds between 1904-01-01 (ISO-BMFF epoch) and 1970-01-01.
constexpr std::int64_t kEpochOffset = 2082844800;

struct Box {
    std::string_view type;
    std::size_t body;  // offset of first byte after the header
    std::size_t end;
};

template <typename Fn>
void for_each_box(const ByteReader& r, std::size_t begin, std::size_t end, Fn&& fn) {
    std::size_t pos = begin;
    while (pos + 8 <= end) {
        std::uint64_t size = r.u32(pos);
        ByteView type = r.slice(pos + 4, 4);
        std::size_t header = 8;
        if (size == 1) {
            size = r.u64(pos + 8);
            header = 16;
        } else if (size == 0) {
            size = end - pos;
        }
        if (size < header || size > end - pos) fail(ErrorCode::CorruptPayload, "MP4 box overruns parent");
        Box box{std::string_view(reinterpret_cast<const char*>(type.data()), 4), pos + header,
                pos + static_cast<std::size_t>(size)};
        if (!fn(box)) return;
        pos = box.end;
    }
}

Timestamp from_mp4_seconds(std::uint64_t secs) {
    auto unix_secs = static_cast<std::int64_t>(secs) - kEpochOffset;
    return Timestamp{std::chrono::seconds{unix_secs}};
}

void put_box(ByteWriter& w, std::string_view type, ByteView body) {
    w.u32(static_cast<std::uint32_t>(body.size() + 8));
    w.str(type);
    w.bytes(body);
}

}  // namespace

bool has_signature(ByteView data) {
    return data.size() >= 12 && std::memcmp(data.data() + 4, "ftyp", 4) == 0;
}

Info parse(ByteView data) {
    ByteReader r(data, false);
    Info info;
    bool have_mvhd = false;
    std::string_view mdl{"\xA9mdl", 4};

    for_each_box(r, 0, data.size(), [&](const Box& top) {
        if (top.type != "moov") return true;
        for_each_box(r, top.body, top.end, [&](const Box& b) {
            if (b.type == "mvhd") {
                std::uint8_t version = r.u8(b.body);
                std::uint64_t created;
                std::uint32_t timescale;
                std::uint64_t duration;
                if (version == 1) {
                    created = r.u64(b.body + 4);
                    timescale = r.u32(b.body + 20);
                    duration = r.u64(b.body + 24);
                } else {
                    created = r.u32(b.body + 4);
                    timescale = r.u32(b.body + 12);
                    duration = r.u32(b.body + 16);
                }
                info.creation_time = from_mp4_seconds(created);
                info.duration_s = timescale ? static_cast<double>(duration) / timescale : 0.0;
                have_mvhd = true;
            } else if (b.type == "trak") {
                for_each_box(r, b.body, b.end, [&](const Box& t) {
                    if (t.type != "tkhd") return true;
                    std::uint8_t version = r.u8(t.body);
                    std::size_t dims = t.body + (version == 1 ? 88 : 76);
                    int w = static_cast<int>(r.u32(dims) >> 16);
                    int h = static_cast<int>(r.u32(dims + 4) >> 16);
                    if (info.width == 0 && w > 0 && h > 0) {
                        info.width = w;
                        info.height = h;
                    }
                    return false;
                });
            } else if (b.type == "udta") {
                for_each_box(r, b.body, b.end, [&](const Box& u) {
                    if (u.type != mdl) return true;
                    std::uint16_t len = r.u16(u.body);
                    ByteView s = r.slice(u.body + 4, len);
                    info.model = std::string(s.begin(), s.end());
                    return false;
                });
            }
            return true;
        });
        return false;
    });
    if (!have_mvhd) fail(ErrorCode::UnsupportedContainer, "MP4 has no moov/mvhd box");
    return info;
}

Bytes build_minimal(const Info& info) {
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(info.creation_time.time_since_epoch()).count();
    auto created = static_cast<std::uint32_t>(secs + kEpochOffset);
    constexpr std::uint32_t kTimescale = 1000;
    auto duration = static_cast<std::uint32_t>(info.duration_s * kTimescale + 0.5);
    const std::uint32_t matrix[9] = {0x00010000, 0, 0, 0, 0x00010000, 0, 0, 0, 0x40000000};

    ByteWriter ftyp(false);
    ftyp.str("isom");
    ftyp.u32(512);
    ftyp.str("isomiso2mp41");

    ByteWriter mvhd(false);
    mvhd.u32(0);  // version 0, flags 0
    mvhd.u32(created);
    mvhd.u32(created);
    mvhd.u32(kTimescale);
    mvhd.u32(duration);
    mvhd.u32(0x00010000);  // rate 1.0
    mvhd.u16(0x0100);      // volume 1.0
    mvhd.u16(0);
    mvhd.u32(0);
    mvhd.u32(0);
    for (auto m : matrix) mvhd.u32(m);
    for (int i = 0; i < 6; ++i) mvhd.u32(0);  // pre_defined
    mvhd.u32(2);                              // next_track_ID

    ByteWriter tkhd(false);
    tkhd.u32(0x00000003);  // version 0, enabled | in_movie
    tkhd.u32(created);
    tkhd.u32(created);
    tkhd.u32(1);  // track_ID
    tkhd.u32(0);
    tkhd.u32(duration);
    tkhd.u32(0);
    tkhd.u32(0);
    tkhd.u16(0);  // layer
    tkhd.u16(0);  // alternate_group
    tkhd.u16(0);  // volume
    tkhd.u16(0);
    for (auto m : matrix) tkhd.u32(m);
    tkhd.u32(static_cast<std::uint32_t>(info.width) << 16);
    tkhd.u32(static_cast<std::uint32_t>(info.height) << 16);

    ByteWriter trak(false);
    put_box(trak, "tkhd", tkhd.data());

    ByteWriter moov(false);
    put_box(moov, "mvhd", mvhd.data());
    put_box(moov, "trak", trak.data());
    if (info.model) {
        ByteWriter mdl(false);
        mdl.u16(static_cast<std::uint16_t>(info.model->size()));
        mdl.u16(0x55C4);  // language "und"
        mdl.str(*info.model);
        ByteWriter udta(false);
        put_box(udta, std::string_view{"\xA9mdl", 4}, mdl.data());
        put_box(moov, "udta", udta.data());
    }

    ByteWriter out(false);
    put_box(out, "ftyp", ftyp.data());
    put_box(out, "moov", moov.data());
    return out.take();
}

}  // namespace flame::mp4
