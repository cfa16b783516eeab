#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace alphagan {

// Exit codes shared by every subcommand: 0 success, 1 usage/config error,
// 2 numeric abort during training.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

struct TrainOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // highest-priority override
};

struct EvalOptions {
    std::string checkpoint_path;
    std::string dataset_path;  // optional: JSON file with a dataset object
    std::vector<std::string> metrics = {"all"};
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::size_t sample_count = 4096;
    std::optional<std::size_t> critic_steps;
};

struct SampleOptions {
    std::string checkpoint_path;
    std::string dataset_path;  // used by --recon
    std::size_t count = 64;
    std::size_t grid_w = 8;
    std::size_t grid_h = 8;
    bool reconstruction = false;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

int run_train(const TrainOptions& options, std::ostream& out = std::cout,
              std::ostream& err = std::cerr);
int run_eval(const EvalOptions& options, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);
int run_sample(const SampleOptions& options, std::ostream& out = std::cout,
               std::ostream& err = std::cerr);
int run_gradcheck(bool inject_fault = false, std::ostream& out = std::cout);

}  // namespace alphagan
