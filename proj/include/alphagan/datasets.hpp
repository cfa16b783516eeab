#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "alphagan/rng.hpp"
#include "alphagan/tensor.hpp"

namespace alphagan {

enum class DatasetKind { points2d, images };
enum class Provenance { real, reconstruction, sample };

/// A matrix of data points or latent codes, one row per example, tagged with
/// where the rows came from.
struct Batch {
    Tensor data;
    Provenance provenance = Provenance::real;

    std::size_t size() const { return data.rows(); }
    std::size_t dim() const { return data.cols(); }
};

struct GaussianMixtureSpec {
    std::vector<std::array<double, 2>> means;
    double sigma = 0.05;
    std::vector<double> weights;  // simplex; uniform when empty

    void validate() const;
    std::size_t mode_count() const { return means.size(); }
};

struct Dataset {
    DatasetKind kind = DatasetKind::points2d;
    Tensor train, valid, test;  // [n, dim], rows in [-1,1] for images
    std::vector<std::size_t> train_labels, valid_labels, test_labels;
    std::size_t image_side = 0;  // images only
    std::size_t n_classes = 0;   // labeled sets only
    bool has_mixture = false;
    GaussianMixtureSpec mixture;

    std::size_t dim() const { return train.cols(); }
    bool labeled() const { return n_classes > 0; }
};

/// n_modes isotropic Gaussians equally spaced on a circle.
Dataset ring_of_gaussians(std::size_t n_modes, double radius, double sigma,
                          std::size_t n_per_split, std::uint64_t seed);

/// side x side grid of isotropic Gaussians centered on the origin.
Dataset grid_of_gaussians(std::size_t side, double spacing, double sigma, std::size_t n_per_split,
                          std::uint64_t seed);

/// Labeled raster shapes (bars, disc, diagonal stripe) with seeded jitter;
/// n_per_split must divide evenly over the classes.
Dataset procedural_shapes(std::size_t n_classes, std::size_t image_side, std::size_t n_per_split,
                          std::uint64_t seed);

struct IdxError : std::runtime_error {
    enum class Kind { bad_magic, truncated, count_mismatch };
    IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
    Kind kind;
};

/// Loads big-endian IDX image (magic 0x00000803) and optional label
/// (0x00000801) files; pixels map to [-1,1]; 80/10/10 seeded-shuffle split.
Dataset idx_load(const std::string& images_path, const std::string& labels_path = "",
                 std::uint64_t seed = 0);

// sampling helpers
Tensor sample_mixture(const GaussianMixtureSpec& spec, std::size_t n, Rng& rng);
Tensor sample_rows(const Tensor& split, std::size_t n, Rng& rng);
Tensor sample_rows(const Tensor& split, const std::vector<std::size_t>& labels, std::size_t n,
                   Rng& rng, std::vector<std::size_t>& out_labels);
Tensor sample_normal_prior(std::size_t n, std::size_t dim, Rng& rng);
Tensor sample_unit_ball_prior(std::size_t n, std::size_t dim, Rng& rng);

}  // namespace alphagan
