#include "flame/colormap.hpp"

#include <charconv>
#include <fmt/format.h>

#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/jpeg.hpp"

namespace flame::colormap {

const Palette& inferno() {
    static const Palette palette{"inferno", {{
#include "inferno_table.inc"
    }}};
    return palette;
}

Palette parse_palette_csv(std::string_view text, std::string name) {
    auto rows = csv::parse_with_header(text, {"index", "R", "G", "B"}, "palette");
    if (rows.size() != 256) fail(ErrorCode::BadConfig, "palette must have exactly 256 rows");
    Palette p{std::move(name), {}};
    std::array<bool, 256> seen{};
    for (const auto& row : rows) {
        int v[4];
        for (int k = 0; k < 4; ++k) {
            double d = csv::parse_number(row[k], "palette");
            if (d < 0 || d > 255 || d != static_cast<int>(d)) fail(ErrorCode::BadConfig, "palette value out of range");
            v[k] = static_cast<int>(d);
        }
        if (seen[v[0]]) fail(ErrorCode::BadConfig, fmt::format("palette index {} repeated", v[0]));
        seen[v[0]] = true;
        p.entries[v[0]] = {static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2]),
                           static_cast<std::uint8_t>(v[3])};
    }
    return p;
}

Palette load_palette_csv(const std::filesystem::path& path) {
    return parse_palette_csv(read_text_file(path), path.stem().string());
}

std::string palette_csv(const Palette& p) {
    std::string out = "index,R,G,B\n";
    for (int i = 0; i < 256; ++i) {
        const auto& c = p.entries[i];
        out += fmt::format("{},{},{},{}\n", i, c.r, c.g, c.b);
    }
    return out;
}

NormalizationMode NormalizationMode::fixed(double lo, double hi) {
    if (!(lo < hi)) fail(ErrorCode::InvalidArgument, fmt::format("fixed range needs lo < hi, got {} {}", lo, hi));
    return {Kind::FixedRange, lo, hi};
}

NormalizationMode NormalizationMode::parse(std::string_view text) {
    if (text == "minmax") return min_max();
    if (text.starts_with("fixed:")) {
        std::string_view rest = text.substr(6);
        auto colon = rest.find(':');
        if (colon != std::string_view::npos) {
            double lo = csv::parse_number(rest.substr(0, colon), "normalization");
            double hi = csv::parse_number(rest.substr(colon + 1), "normalization");
            if (!(lo < hi)) fail(ErrorCode::BadConfig, "normalization fixed range needs lo < hi");
            return fixed(lo, hi);
        }
    }
    fail(ErrorCode::BadConfig, "normalization must be 'minmax' or 'fixed:LO:HI'");
}

std::string NormalizationMode::to_string() const {
    if (kind == Kind::MinMaxPerImage) return "minmax";
    return "fixed:" + csv::format_number(lo) + ":" + csv::format_number(hi);
}

Normalized normalize(const TemperatureRaster& raster, const NormalizationMode& mode) {
    raster.validate();
    Normalized out;
    out.indices = ByteImage(raster.width, raster.height, 0);
    if (mode.kind == NormalizationMode::Kind::MinMaxPerImage) {
        auto mm = kernels::min_max(raster.values);
        out.lo = mm.min;
        out.hi = mm.max;
        if (!(mm.max > mm.min)) {
            out.degenerate = true;
            return out;
        }
    } else {
        out.lo = mode.lo;
        out.hi = mode.hi;
    }
    kernels::normalize_indices(raster.values, out.lo, out.hi, out.indices.pixels);
    return out;
}

Rendered render(const TemperatureRaster& raster, const Palette& palette, const NormalizationMode& mode) {
    Normalized n = normalize(raster, mode);
    Rendered r{RgbImage(raster.width, raster.height), n.degenerate};
    kernels::palette_lookup(n.indices.pixels, palette.entries, r.image.pixels);
    return r;
}

Bytes render_thermal_jpeg(const TemperatureRaster& raster, const Palette& palette,
                          const NormalizationMode& mode, bool* degenerate) {
    Rendered r = render(raster, palette, mode);
    if (degenerate) *degenerate = r.degenerate;
    return jpeg::encode_rgb(r.image, kJpegQuality);
}

}  // namespace flame::colormap
