#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "alphagan/tensor.hpp"

namespace alphagan {

/// Seeded random source. Distributions are implemented here (not via
/// std::*_distribution) so that streams are bit-identical across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes draws in pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    std::vector<double> normal_vector(std::size_t n, double mu = 0.0, double sigma = 1.0) {
        std::vector<double> v(n);
        for (double& x : v) x = normal(mu, sigma);
        return v;
    }

    Tensor normal_matrix(std::size_t rows, std::size_t cols, double mu = 0.0, double sigma = 1.0) {
        return Tensor({rows, cols}, normal_vector(rows * cols, mu, sigma));
    }

    /// Child generator with a decorrelated seed; used to give each consumer
    /// its own stream.
    Rng split() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace alphagan
