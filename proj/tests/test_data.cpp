#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "alphagan/datasets.hpp"

using namespace alphagan;

namespace {

std::set<std::string> row_set(const Tensor& t) {
    std::set<std::string> rows;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            const double v = t.at(i, j);
            key.append(reinterpret_cast<const char*>(&v), sizeof v);
        }
        rows.insert(key);
    }
    return rows;
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

}  // namespace

TEST_CASE("ring geometry and determinism") {
    Dataset ds = ring_of_gaussians(4, 1.0, 0.01, 64, 5);
    REQUIRE(ds.mixture.means.size() == 4);
    CHECK(ds.mixture.means[0][0] == doctest::Approx(1.0));
    CHECK(ds.mixture.means[0][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ds.mixture.means[1][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ds.mixture.means[1][1] == doctest::Approx(1.0));
    CHECK(ds.mixture.means[2][0] == doctest::Approx(-1.0));
    CHECK(ds.mixture.means[3][1] == doctest::Approx(-1.0));

    Dataset again = ring_of_gaussians(4, 1.0, 0.01, 64, 5);
    for (std::size_t i = 0; i < ds.train.numel(); ++i) CHECK(ds.train.at(i) == again.train.at(i));

    CHECK_THROWS(ring_of_gaussians(1, 1.0, 0.01, 64, 5));
}

TEST_CASE("ring sample mean concentrates at the origin") {
    Dataset ds = ring_of_gaussians(8, 2.0, 0.02, 100000, 9);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ds.train.rows(); ++i) {
        mx += ds.train.at(i, 0);
        my += ds.train.at(i, 1);
    }
    mx /= static_cast<double>(ds.train.rows());
    my /= static_cast<double>(ds.train.rows());
    CHECK(std::fabs(mx) < 0.02);
    CHECK(std::fabs(my) < 0.02);
}

TEST_CASE("grid geometry, determinism and per-mode covariance") {
    Dataset ds = grid_of_gaussians(5, 2.0, 0.05, 50000, 4);
    REQUIRE(ds.mixture.means.size() == 25);
    // centered: the mean of means is the origin
    double cx = 0.0, cy = 0.0;
    for (const auto& m : ds.mixture.means) {
        cx += m[0];
        cy += m[1];
    }
    CHECK(cx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cy == doctest::Approx(0.0).epsilon(1e-12));

    Dataset again = grid_of_gaussians(5, 2.0, 0.05, 50000, 4);
    CHECK(ds.train.at(0) == again.train.at(0));

    // assign samples to the nearest mode; empirical covariance ~ sigma^2 I
    double vxx = 0.0, vyy = 0.0, vxy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ds.train.rows(); ++i) {
        double best = 1e18;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < 25; ++k) {
            const double dx = ds.train.at(i, 0) - ds.mixture.means[k][0];
            const double dy = ds.train.at(i, 1) - ds.mixture.means[k][1];
            if (dx * dx + dy * dy < best) {
                best = dx * dx + dy * dy;
                arg = k;
            }
        }
        const double dx = ds.train.at(i, 0) - ds.mixture.means[arg][0];
        const double dy = ds.train.at(i, 1) - ds.mixture.means[arg][1];
        vxx += dx * dx;
        vyy += dy * dy;
        vxy += dx * dy;
        ++count;
    }
    vxx /= count;
    vyy /= count;
    vxy /= count;
    CHECK(vxx == doctest::Approx(0.0025).epsilon(0.05));
    CHECK(vyy == doctest::Approx(0.0025).epsilon(0.05));
    CHECK(std::fabs(vxy) < 1e-4);
}

TEST_CASE("procedural shapes: balance, range, determinism") {
    Dataset ds = procedural_shapes(4, 16, 128, 3);
    REQUIRE(ds.train_labels.size() == 128);
    std::vector<std::size_t> histogram(4, 0);
    for (std::size_t l : ds.train_labels) ++histogram[l];
    for (std::size_t c : histogram) CHECK(c == 32);

    for (double v : ds.train.values()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }

    Dataset again = procedural_shapes(4, 16, 128, 3);
    for (std::size_t i = 0; i < 64; ++i) CHECK(ds.train.at(i) == again.train.at(i));

    CHECK_THROWS(procedural_shapes(4, 16, 126, 3));  // not class-divisible
    CHECK_THROWS(procedural_shapes(7, 16, 128, 3));
}

TEST_CASE("dataset splits are pairwise disjoint") {
    Dataset ring = ring_of_gaussians(8, 2.0, 0.02, 4096, 1);
    std::set<std::string> train = row_set(ring.train), valid = row_set(ring.valid),
                          test = row_set(ring.test);
    for (const auto& r : valid) CHECK(train.count(r) == 0);
    for (const auto& r : test) {
        CHECK(train.count(r) == 0);
        CHECK(valid.count(r) == 0);
    }
}

TEST_CASE("idx golden file parses to exact tensors") {
    // 2 images of 4x4 pixels with authored bytes
    std::vector<unsigned char> img = {0x00, 0x00, 0x08, 0x03,  // magic
                                      0x00, 0x00, 0x00, 0x02,  // count
                                      0x00, 0x00, 0x00, 0x04,  // rows
                                      0x00, 0x00, 0x00, 0x04}; // cols
    for (int i = 0; i < 16; ++i) img.push_back(static_cast<unsigned char>(i * 17));  // 0..255
    for (int i = 0; i < 16; ++i) img.push_back(static_cast<unsigned char>(255 - i));
    std::vector<unsigned char> lab = {0x00, 0x00, 0x08, 0x01, 0x00, 0x00, 0x00, 0x02, 7, 3};
    write_bytes("/tmp/golden_images.idx", img);
    write_bytes("/tmp/golden_labels.idx", lab);

    Dataset ds = idx_load("/tmp/golden_images.idx", "/tmp/golden_labels.idx", 0);
    CHECK(ds.image_side == 4);
    auto rows_of = [](const Tensor& t) { return t.defined() ? t.rows() : 0; };
    CHECK(rows_of(ds.train) + rows_of(ds.valid) + rows_of(ds.test) == 2);
    // collect every parsed row and match against the authored pixels
    std::vector<std::vector<double>> rows;
    for (const Tensor* split : {&ds.train, &ds.valid, &ds.test}) {
        if (!split->defined()) continue;
        for (std::size_t i = 0; i < split->rows(); ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < 16; ++j) row.push_back(split->at(i, j));
            rows.push_back(row);
        }
    }
    REQUIRE(rows.size() == 2);
    bool found_first = false, found_second = false;
    for (const auto& row : rows) {
        if (row[0] == -1.0) {
            found_first = true;
            for (int j = 0; j < 16; ++j) {
                CHECK(row[j] == doctest::Approx(j * 17 / 255.0 * 2.0 - 1.0).epsilon(1e-12));
            }
            CHECK(row[15] == 1.0);  // byte 255 -> +1 exactly
        } else {
            found_second = true;
            CHECK(row[0] == 1.0);  // byte 255 -> +1
        }
    }
    CHECK(found_first);
    CHECK(found_second);
}

TEST_CASE("idx malformed files raise their designated errors") {
    std::vector<unsigned char> bad_magic = {0x00, 0x00, 0x08, 0x77, 0, 0, 0, 1,
                                            0,    0,    0,    1,    0, 0, 0, 1, 42};
    write_bytes("/tmp/bad_magic.idx", bad_magic);
    CHECK_THROWS_AS(idx_load("/tmp/bad_magic.idx"), IdxError);
    try {
        idx_load("/tmp/bad_magic.idx");
    } catch (const IdxError& e) {
        CHECK(e.kind == IdxError::Kind::bad_magic);
    }

    std::vector<unsigned char> truncated = {0x00, 0x00, 0x08, 0x03, 0x00, 0x00};
    write_bytes("/tmp/truncated.idx", truncated);
    try {
        idx_load("/tmp/truncated.idx");
        CHECK(false);
    } catch (const IdxError& e) {
        CHECK(e.kind == IdxError::Kind::truncated);
    }

    // short pixel payload also counts as truncation
    std::vector<unsigned char> short_pixels = {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 2,
                                               0,    0,    0,    2,    0, 0, 0, 2, 1, 2, 3};
    write_bytes("/tmp/short_pixels.idx", short_pixels);
    try {
        idx_load("/tmp/short_pixels.idx");
        CHECK(false);
    } catch (const IdxError& e) {
        CHECK(e.kind == IdxError::Kind::truncated);
    }

    std::vector<unsigned char> img = {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 2,
                                      0,    0,    0,    1,    0, 0, 0, 1, 9, 9};
    std::vector<unsigned char> labels_three = {0x00, 0x00, 0x08, 0x01, 0, 0, 0, 3, 1, 2, 3};
    write_bytes("/tmp/two_images.idx", img);
    write_bytes("/tmp/three_labels.idx", labels_three);
    try {
        idx_load("/tmp/two_images.idx", "/tmp/three_labels.idx");
        CHECK(false);
    } catch (const IdxError& e) {
        CHECK(e.kind == IdxError::Kind::count_mismatch);
    }
}

TEST_CASE("idx split proportions follow 80/10/10") {
    std::vector<unsigned char> img = {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 100,
                                      0,    0,    0,    2,    0, 0, 0, 2};
    for (int i = 0; i < 400; ++i) img.push_back(static_cast<unsigned char>(i % 256));
    write_bytes("/tmp/hundred.idx", img);
    Dataset ds = idx_load("/tmp/hundred.idx", "", 7);
    CHECK(ds.train.rows() == 80);
    CHECK(ds.valid.rows() == 10);
    CHECK(ds.test.rows() == 10);
    Dataset again = idx_load("/tmp/hundred.idx", "", 7);
    CHECK(ds.train.at(0) == again.train.at(0));
}

TEST_CASE("unit-ball prior samples stay inside the ball") {
    Rng rng(2);
    Tensor z = sample_unit_ball_prior(512, 5, rng);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
        double n = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) n += z.at(i, j) * z.at(i, j);
        max_norm = std::max(max_norm, std::sqrt(n));
    }
    CHECK(max_norm <= 1.0 + 1e-12);
    CHECK(max_norm > 0.5);  // not collapsed to the center
}
