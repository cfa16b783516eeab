#pragma once

#include <string>

#include "alphagan/tensor.hpp"

namespace alphagan {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes a grid of grayscale tiles as binary PPM (P6, maxval 255). Rows of
/// `images` are flattened side*side tiles in [-1,1]; -1 maps to byte 0 and
/// +1 to byte 255. The file is exactly (grid_w*side) x (grid_h*side) pixels.
void write_ppm_grid(const std::string& path, const Tensor& images, std::size_t image_side,
                    std::size_t grid_w, std::size_t grid_h);

/// One row per point: "x,y" with a header line.
void write_points_csv(const std::string& path, const Tensor& points);

std::string format_double(double v);

}  // namespace alphagan
