#include "alphagan/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace alphagan {

void write_ppm_grid(const std::string& path, const Tensor& images, std::size_t image_side,
                    std::size_t grid_w, std::size_t grid_h) {
    if (images.rank() != 2 || images.cols() != image_side * image_side) {
        throw ShapeError("write_ppm_grid: rows must be flattened " + std::to_string(image_side) +
                         "x" + std::to_string(image_side) + " images, got " +
                         shape_str(images.shape()));
    }
    if (images.rows() < grid_w * grid_h) {
        throw ShapeError("write_ppm_grid: need " + std::to_string(grid_w * grid_h) +
                         " images, have " + std::to_string(images.rows()));
    }
    const std::size_t width = grid_w * image_side;
    const std::size_t height = grid_h * image_side;
    std::vector<unsigned char> pixels(width * height * 3);
    for (std::size_t tile = 0; tile < grid_w * grid_h; ++tile) {
        const std::size_t tr = tile / grid_w, tc = tile % grid_w;
        for (std::size_t r = 0; r < image_side; ++r) {
            for (std::size_t c = 0; c < image_side; ++c) {
                const double v = images.at(tile, r * image_side + c);
                const double scaled = std::round((v + 1.0) / 2.0 * 255.0);
                const unsigned char byte =
                    static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
                const std::size_t px = (tr * image_side + r) * width + tc * image_side + c;
                pixels[px * 3] = byte;
                pixels[px * 3 + 1] = byte;
                pixels[px * 3 + 2] = byte;
            }
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P6\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<long>(pixels.size()));
    if (!out) throw IoError("write failed for " + path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_points_csv(const std::string& path, const Tensor& points) {
    if (points.rank() != 2 || points.cols() != 2) {
        throw ShapeError("write_points_csv: expected [n,2] points, got " +
                         shape_str(points.shape()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "x,y\n";
    for (std::size_t i = 0; i < points.rows(); ++i) {
        out << format_double(points.at(i, 0)) << ',' << format_double(points.at(i, 1)) << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace alphagan
