#include "alphagan/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace alphagan {

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw CheckpointError("checkpoint truncated");
    }
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_f64s(std::ofstream& out, const std::vector<double>& v) {
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(buf), 8);
    }
}

std::vector<double> read_f64s(std::ifstream& in, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char buf[8];
        if (!in.read(reinterpret_cast<char*>(buf), 8)) throw CheckpointError("checkpoint truncated");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        double d;
        std::memcpy(&d, &bits, 8);
        v[i] = d;
    }
    return v;
}

// The trainer builds every network with a fixed activation policy per role,
// so specs are recovered from role, tensor shapes and dataset kind.
MLPSpec infer_spec(const std::string& name, const std::vector<Tensor>& weights, bool images) {
    MLPSpec spec;
    spec.layer_sizes.push_back(weights.front().rows());
    for (const Tensor& w : weights) spec.layer_sizes.push_back(w.cols());
    if (name == "generator") {
        spec.hidden_activation = generator_hidden_activation(images);
        spec.output_activation = generator_output_activation(images);
    } else {
        spec.hidden_activation = Activation::leaky_relu;
        spec.output_activation = Activation::identity;
    }
    return spec;
}

Role role_from_name(const std::string& name) {
    if (name == "generator") return Role::generator;
    if (name == "encoder") return Role::encoder;
    if (name == "discriminator") return Role::discriminator;
    if (name == "code_discriminator") return Role::code_discriminator;
    if (name == "critic") return Role::critic;
    return Role::classifier;
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainedModel& model,
                     const std::string& config_json) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + path + " for writing");
    out.write("AGAN", 4);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(config_json.size()));
    out.write(config_json.data(), static_cast<long>(config_json.size()));
    for (const auto& [name, params] : model.networks) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<long>(name.size()));
        write_u32(out, static_cast<std::uint32_t>(params.weights.size() + params.biases.size()));
        auto write_tensor = [&](const Tensor& t) {
            write_u32(out, static_cast<std::uint32_t>(t.rank()));
            for (std::size_t d : t.shape()) write_u32(out, static_cast<std::uint32_t>(d));
            write_f64s(out, t.values());
        };
        // interleaved w0, b0, w1, b1, ... matching the watch order
        for (std::size_t i = 0; i < params.weights.size(); ++i) {
            write_tensor(params.weights[i]);
            write_tensor(params.biases[i]);
        }
    }
    if (!out) throw CheckpointError("write failed for " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "AGAN", 4) != 0) {
        throw CheckpointError("bad checkpoint magic in " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t json_len = read_u32(in);
    std::string config_json(json_len, '\0');
    if (!in.read(config_json.data(), json_len)) throw CheckpointError("checkpoint truncated");

    nlohmann::json cfg = nlohmann::json::parse(config_json, nullptr, false);
    if (cfg.is_discarded()) throw CheckpointError("checkpoint config JSON is invalid");
    const bool images = cfg.contains("dataset") && cfg["dataset"].contains("kind") &&
                        (cfg["dataset"]["kind"] == "shapes" || cfg["dataset"]["kind"] == "idx");

    LoadedCheckpoint loaded;
    loaded.config_json = config_json;
    loaded.model.algorithm = algorithm_from_name(cfg.value("algorithm", "alpha_gan"));
    loaded.model.iterations = cfg.value("iterations", 0ull);

    while (true) {
        in.peek();
        if (in.eof()) break;
        const std::uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw CheckpointError("checkpoint truncated");
        const std::uint32_t tensor_count = read_u32(in);
        std::vector<Tensor> tensors;
        for (std::uint32_t t = 0; t < tensor_count; ++t) {
            const std::uint32_t rank = read_u32(in);
            Shape shape;
            std::size_t numel = 1;
            for (std::uint32_t d = 0; d < rank; ++d) {
                shape.push_back(read_u32(in));
                numel *= shape.back();
            }
            tensors.emplace_back(shape, read_f64s(in, numel));
        }
        if (tensor_count % 2 != 0) {
            throw CheckpointError("network " + name + " has an odd tensor count");
        }
        NetworkParams params;
        params.role = role_from_name(name);
        for (std::size_t i = 0; i < tensors.size(); i += 2) {
            params.weights.push_back(tensors[i]);
            params.biases.push_back(tensors[i + 1]);
        }
        params.spec = infer_spec(name, params.weights, images);
        loaded.model.networks.emplace_back(name, std::move(params));
    }
    return loaded;
}

}  // namespace alphagan
