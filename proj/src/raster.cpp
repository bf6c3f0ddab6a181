#include "flame/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flame/error.hpp"
#include "flame/kernels.hpp"

namespace flame {

TemperatureRaster::TemperatureRaster(int w, int h, std::vector<double> v, double step)
    : width(w), height(h), values(std::move(v)), quantization_step(step) {
    validate();
}

TemperatureRaster::TemperatureRaster(int w, int h, double fill, double step)
    : width(w), height(h), values(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill),
      quantization_step(step) {
    validate();
}

void TemperatureRaster::validate() const {
    if (width <= 0 || height <= 0) {
        fail(ErrorCode::InvalidArgument,
             "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                 std::to_string(height));
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        fail(ErrorCode::InvalidArgument, "raster value count does not match dimensions");
    }
    if (!kernels::all_finite(values)) {
        fail(ErrorCode::InvalidArgument, "raster contains non-finite values");
    }
}

double TemperatureRaster::min_value() const { return kernels::min_max(values).min; }
double TemperatureRaster::max_value() const { return kernels::min_max(values).max; }

std::size_t ByteImage::count_nonzero() const {
    return static_cast<std::size_t>(
        std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t p) { return p != 0; }));
}

}  // namespace flame
