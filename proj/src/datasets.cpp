#include "alphagan/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace alphagan {

void GaussianMixtureSpec::validate() const {
    if (means.size() < 1) throw std::invalid_argument("mixture: need at least one mode");
    if (!(sigma > 0.0)) throw std::invalid_argument("mixture: sigma must be positive");
    if (!weights.empty()) {
        if (weights.size() != means.size()) {
            throw std::invalid_argument("mixture: weights do not match modes");
        }
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("mixture: negative weight");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("mixture: weights must sum to 1");
        }
    }
}

Tensor sample_mixture(const GaussianMixtureSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    std::vector<double> rows(n * 2);
    const std::size_t k = spec.means.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t mode;
        if (spec.weights.empty()) {
            mode = rng.index(k);
        } else {
            double u = rng.uniform();
            mode = k - 1;
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                acc += spec.weights[j];
                if (u < acc) {
                    mode = j;
                    break;
                }
            }
        }
        rows[i * 2] = spec.means[mode][0] + spec.sigma * rng.normal();
        rows[i * 2 + 1] = spec.means[mode][1] + spec.sigma * rng.normal();
    }
    return Tensor({n, 2}, std::move(rows));
}

static Dataset mixture_dataset(GaussianMixtureSpec spec, std::size_t n_per_split,
                               std::uint64_t seed) {
    if (n_per_split < 2) throw std::invalid_argument("dataset: n_per_split must be >= 2");
    Rng rng(seed);
    Dataset ds;
    ds.kind = DatasetKind::points2d;
    ds.train = sample_mixture(spec, n_per_split, rng);
    ds.valid = sample_mixture(spec, n_per_split, rng);
    ds.test = sample_mixture(spec, n_per_split, rng);
    ds.has_mixture = true;
    ds.mixture = std::move(spec);
    return ds;
}

Dataset ring_of_gaussians(std::size_t n_modes, double radius, double sigma,
                          std::size_t n_per_split, std::uint64_t seed) {
    if (n_modes < 2) throw std::invalid_argument("ring_of_gaussians: need at least 2 modes");
    GaussianMixtureSpec spec;
    spec.sigma = sigma;
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double angle = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_modes);
        spec.means.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    return mixture_dataset(std::move(spec), n_per_split, seed);
}

Dataset grid_of_gaussians(std::size_t side, double spacing, double sigma, std::size_t n_per_split,
                          std::uint64_t seed) {
    if (side < 1) throw std::invalid_argument("grid_of_gaussians: side must be >= 1");
    GaussianMixtureSpec spec;
    spec.sigma = sigma;
    const double offset = spacing * (static_cast<double>(side) - 1.0) / 2.0;
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            spec.means.push_back({spacing * static_cast<double>(c) - offset,
                                  spacing * static_cast<double>(r) - offset});
        }
    }
    return mixture_dataset(std::move(spec), n_per_split, seed);
}

namespace {

// One 16x16-ish raster per class: horizontal bar, vertical bar, filled disc,
// diagonal stripe. Jitter keeps classes apart while varying every image.
void draw_shape(std::vector<double>& img, std::size_t side, std::size_t cls, Rng& rng) {
    std::fill(img.begin(), img.end(), -1.0);
    const double fg = rng.uniform(0.35, 1.0);
    const auto set = [&](std::size_t r, std::size_t c) {
        if (r < side && c < side) img[r * side + c] = fg;
    };
    const std::size_t margin = 2;
    const std::size_t span = side - 2 * margin;
    switch (cls % 4) {
        case 0: {  // horizontal bar
            const std::size_t r0 = margin + rng.index(span - 2);
            const std::size_t thick = 2 + rng.index(2);
            for (std::size_t r = r0; r < r0 + thick; ++r)
                for (std::size_t c = 1; c + 1 < side; ++c) set(r, c);
            break;
        }
        case 1: {  // vertical bar
            const std::size_t c0 = margin + rng.index(span - 2);
            const std::size_t thick = 2 + rng.index(2);
            for (std::size_t c = c0; c < c0 + thick; ++c)
                for (std::size_t r = 1; r + 1 < side; ++r) set(r, c);
            break;
        }
        case 2: {  // filled disc
            const double rad = 0.16 * static_cast<double>(side) + rng.uniform(0.0, 2.0);
            const double cr = static_cast<double>(margin) + rad +
                              rng.uniform() * (static_cast<double>(side - 2 * margin) - 2.0 * rad);
            const double cc = static_cast<double>(margin) + rad +
                              rng.uniform() * (static_cast<double>(side - 2 * margin) - 2.0 * rad);
            for (std::size_t r = 0; r < side; ++r)
                for (std::size_t c = 0; c < side; ++c) {
                    const double dr = static_cast<double>(r) - cr;
                    const double dc = static_cast<double>(c) - cc;
                    if (dr * dr + dc * dc <= rad * rad) set(r, c);
                }
            break;
        }
        case 3: {  // diagonal stripe
            const int offset = static_cast<int>(rng.index(2 * margin + 1)) - static_cast<int>(margin);
            const std::size_t thick = 2 + rng.index(2);
            for (std::size_t r = 0; r < side; ++r)
                for (std::size_t t = 0; t < thick; ++t) {
                    const int c = static_cast<int>(r) + offset + static_cast<int>(t);
                    if (c >= 0) set(r, static_cast<std::size_t>(c));
                }
            break;
        }
    }
}

void make_shape_split(std::size_t n, std::size_t n_classes, std::size_t side, Rng& rng,
                      Tensor& out, std::vector<std::size_t>& labels) {
    const std::size_t dim = side * side;
    std::vector<double> rows(n * dim);
    labels.resize(n);
    std::vector<double> img(dim);
    // round-robin classes, then shuffle rows for mixed batches
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cls = i % n_classes;
        draw_shape(img, side, cls, rng);
        std::copy(img.begin(), img.end(), rows.begin() + static_cast<long>(order[i] * dim));
        labels[order[i]] = cls;
    }
    out = Tensor({n, dim}, std::move(rows));
}

}  // namespace

Dataset procedural_shapes(std::size_t n_classes, std::size_t image_side, std::size_t n_per_split,
                          std::uint64_t seed) {
    if (n_classes < 2 || n_classes > 4) {
        throw std::invalid_argument("procedural_shapes: n_classes must be in [2,4]");
    }
    if (image_side < 8) throw std::invalid_argument("procedural_shapes: image_side must be >= 8");
    if (n_per_split % n_classes != 0) {
        throw std::invalid_argument("procedural_shapes: n_per_split must be a multiple of n_classes");
    }
    Rng rng(seed);
    Dataset ds;
    ds.kind = DatasetKind::images;
    ds.image_side = image_side;
    ds.n_classes = n_classes;
    make_shape_split(n_per_split, n_classes, image_side, rng, ds.train, ds.train_labels);
    make_shape_split(n_per_split, n_classes, image_side, rng, ds.valid, ds.valid_labels);
    make_shape_split(n_per_split, n_classes, image_side, rng, ds.test, ds.test_labels);
    return ds;
}

namespace {

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw IdxError(IdxError::Kind::truncated, "truncated file: " + path);
    }
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

}  // namespace

Dataset idx_load(const std::string& images_path, const std::string& labels_path,
                 std::uint64_t seed) {
    std::ifstream in(images_path, std::ios::binary);
    if (!in) throw IdxError(IdxError::Kind::truncated, "cannot open " + images_path);
    const std::uint32_t magic = read_u32_be(in, images_path);
    if (magic != 0x00000803u) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "bad magic 0x%08x", magic);
        throw IdxError(IdxError::Kind::bad_magic, std::string(buf) + " in " + images_path);
    }
    const std::uint32_t count = read_u32_be(in, images_path);
    const std::uint32_t rows = read_u32_be(in, images_path);
    const std::uint32_t cols = read_u32_be(in, images_path);
    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> raw(static_cast<std::size_t>(count) * dim);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<long>(raw.size()))) {
        throw IdxError(IdxError::Kind::truncated, "truncated file: " + images_path);
    }

    std::vector<std::size_t> labels;
    std::size_t n_classes = 0;
    if (!labels_path.empty()) {
        std::ifstream lin(labels_path, std::ios::binary);
        if (!lin) throw IdxError(IdxError::Kind::truncated, "cannot open " + labels_path);
        const std::uint32_t lmagic = read_u32_be(lin, labels_path);
        if (lmagic != 0x00000801u) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "bad magic 0x%08x", lmagic);
            throw IdxError(IdxError::Kind::bad_magic, std::string(buf) + " in " + labels_path);
        }
        const std::uint32_t lcount = read_u32_be(lin, labels_path);
        if (lcount != count) {
            throw IdxError(IdxError::Kind::count_mismatch,
                           "image/label count mismatch: " + std::to_string(count) + " images vs " +
                               std::to_string(lcount) + " labels");
        }
        std::vector<unsigned char> lraw(lcount);
        if (!lin.read(reinterpret_cast<char*>(lraw.data()), static_cast<long>(lraw.size()))) {
            throw IdxError(IdxError::Kind::truncated, "truncated file: " + labels_path);
        }
        labels.assign(lraw.begin(), lraw.end());
        for (std::size_t l : labels) n_classes = std::max(n_classes, l + 1);
    }

    // shuffle, then 80/10/10
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    const std::size_t n_train = count * 8 / 10;
    const std::size_t n_valid = count / 10;
    const std::size_t n_test = count - n_train - n_valid;
    auto take = [&](std::size_t begin, std::size_t n, Tensor& out, std::vector<std::size_t>& labs) {
        labs.clear();
        if (n == 0) {
            out = Tensor();  // tiny files can leave a split empty
            return;
        }
        std::vector<double> rows_out(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = order[begin + i];
            for (std::size_t j = 0; j < dim; ++j) {
                rows_out[i * dim + j] = static_cast<double>(raw[src * dim + j]) / 255.0 * 2.0 - 1.0;
            }
            if (!labels.empty()) labs.push_back(labels[src]);
        }
        out = Tensor({n, dim}, std::move(rows_out));
    };

    Dataset ds;
    ds.kind = DatasetKind::images;
    ds.image_side = rows;  // square images expected; rows kept as the side
    ds.n_classes = n_classes;
    take(0, n_train, ds.train, ds.train_labels);
    take(n_train, n_valid, ds.valid, ds.valid_labels);
    take(n_train + n_valid, n_test, ds.test, ds.test_labels);
    return ds;
}

Tensor sample_rows(const Tensor& split, std::size_t n, Rng& rng) {
    const std::size_t dim = split.cols();
    std::vector<double> rows(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = rng.index(split.rows());
        std::copy_n(split.values().begin() + static_cast<long>(src * dim), dim,
                    rows.begin() + static_cast<long>(i * dim));
    }
    return Tensor({n, dim}, std::move(rows));
}

Tensor sample_rows(const Tensor& split, const std::vector<std::size_t>& labels, std::size_t n,
                   Rng& rng, std::vector<std::size_t>& out_labels) {
    const std::size_t dim = split.cols();
    std::vector<double> rows(n * dim);
    out_labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = rng.index(split.rows());
        std::copy_n(split.values().begin() + static_cast<long>(src * dim), dim,
                    rows.begin() + static_cast<long>(i * dim));
        out_labels[i] = labels[src];
    }
    return Tensor({n, dim}, std::move(rows));
}

Tensor sample_normal_prior(std::size_t n, std::size_t dim, Rng& rng) {
    return rng.normal_matrix(n, dim);
}

Tensor sample_unit_ball_prior(std::size_t n, std::size_t dim, Rng& rng) {
    std::vector<double> rows(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            rows[i * dim + j] = rng.normal();
            norm_sq += rows[i * dim + j] * rows[i * dim + j];
        }
        const double norm = std::sqrt(norm_sq);
        const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
        for (std::size_t j = 0; j < dim; ++j) rows[i * dim + j] *= radius / norm;
    }
    return Tensor({n, dim}, std::move(rows));
}

}  // namespace alphagan
