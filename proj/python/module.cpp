#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alphagan/checkpoint.hpp"
#include "alphagan/gradcheck_suite.hpp"
#include "alphagan/metrics.hpp"
#include "alphagan/run_config.hpp"
#include "alphagan/trainers.hpp"

namespace py = pybind11;
using namespace alphagan;

namespace {

Tensor tensor_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    Shape shape;
    for (py::ssize_t d = 0; d < arr.ndim(); ++d) {
        shape.push_back(static_cast<std::size_t>(arr.shape(d)));
    }
    std::vector<double> values(arr.data(), arr.data() + arr.size());
    return Tensor(std::move(shape), std::move(values));
}

py::array_t<double> numpy_from_tensor(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    py::array_t<double> arr(shape);
    std::copy(t.values().begin(), t.values().end(), arr.mutable_data());
    return arr;
}

GaussianMixtureSpec mixture_from(const py::array_t<double>& means, double sigma) {
    auto m = means.unchecked<2>();
    GaussianMixtureSpec spec;
    spec.sigma = sigma;
    for (py::ssize_t i = 0; i < m.shape(0); ++i) spec.means.push_back({m(i, 0), m(i, 1)});
    return spec;
}

struct PyModel {
    TrainedModel model;
    std::string config_json;

    py::array_t<double> sample(std::size_t n, std::uint64_t seed) const {
        Rng rng(seed);
        return numpy_from_tensor(sample_from_model(model, n, rng));
    }
    py::array_t<double> reconstruct(const py::array_t<double>& x, std::uint64_t seed) const {
        Rng rng(seed);
        return numpy_from_tensor(reconstruct_with_model(model, tensor_from_numpy(x), rng));
    }
    py::array_t<double> encode(const py::array_t<double>& x, std::uint64_t seed) const {
        Rng rng(seed);
        return numpy_from_tensor(encode_with_model(model, tensor_from_numpy(x), rng));
    }
    void save(const std::string& path) const { save_checkpoint(path, model, config_json); }
};

PyModel train_from_json(const std::string& config_json) {
    RunConfig rc = parse_run_config(config_json);
    Dataset dataset = rc.dataset.build();
    PyModel result;
    result.model = train(rc.training, dataset);
    result.config_json = run_config_to_json(rc, result.model.iterations, dataset.dim());
    return result;
}

PyModel load_model(const std::string& path) {
    LoadedCheckpoint loaded = load_checkpoint(path);
    RunConfig rc = parse_checkpoint_config(loaded.config_json);
    loaded.model.config = rc.training;
    return PyModel{std::move(loaded.model), std::move(loaded.config_json)};
}

}  // namespace

PYBIND11_MODULE(alphagan, m) {
    m.doc() = "alpha-GAN training laboratory: training loops, losses and the metric battery";

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("train", [](const Dataset& d) { return numpy_from_tensor(d.train); })
        .def_property_readonly("valid", [](const Dataset& d) { return numpy_from_tensor(d.valid); })
        .def_property_readonly("test", [](const Dataset& d) { return numpy_from_tensor(d.test); })
        .def_property_readonly("train_labels", [](const Dataset& d) { return d.train_labels; })
        .def_property_readonly("test_labels", [](const Dataset& d) { return d.test_labels; })
        .def_property_readonly("image_side", [](const Dataset& d) { return d.image_side; })
        .def_property_readonly("mixture_means",
                               [](const Dataset& d) {
                                   py::array_t<double> arr(
                                       {static_cast<py::ssize_t>(d.mixture.means.size()),
                                        static_cast<py::ssize_t>(2)});
                                   auto out = arr.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < d.mixture.means.size(); ++i) {
                                       out(i, 0) = d.mixture.means[i][0];
                                       out(i, 1) = d.mixture.means[i][1];
                                   }
                                   return arr;
                               })
        .def_property_readonly("mixture_sigma", [](const Dataset& d) { return d.mixture.sigma; });

    m.def("ring_dataset", &ring_of_gaussians, py::arg("n_modes") = 8, py::arg("radius") = 2.0,
          py::arg("sigma") = 0.02, py::arg("n_per_split") = 8192, py::arg("seed") = 0);
    m.def("grid_dataset", &grid_of_gaussians, py::arg("side") = 5, py::arg("spacing") = 2.0,
          py::arg("sigma") = 0.05, py::arg("n_per_split") = 8192, py::arg("seed") = 0);
    m.def("shapes_dataset", &procedural_shapes, py::arg("n_classes") = 4,
          py::arg("image_side") = 16, py::arg("n_per_split") = 512, py::arg("seed") = 0);
    m.def("load_idx", &idx_load, py::arg("images_path"), py::arg("labels_path") = "",
          py::arg("seed") = 0);

    py::class_<PyModel>(m, "TrainedModel")
        .def("sample", &PyModel::sample, py::arg("n"), py::arg("seed") = 0)
        .def("reconstruct", &PyModel::reconstruct, py::arg("x"), py::arg("seed") = 0)
        .def("encode", &PyModel::encode, py::arg("x"), py::arg("seed") = 0)
        .def("save", &PyModel::save, py::arg("path"))
        .def_property_readonly("algorithm",
                               [](const PyModel& p) { return algorithm_name(p.model.algorithm); })
        .def_property_readonly("iterations", [](const PyModel& p) { return p.model.iterations; })
        .def_property_readonly("config_json", [](const PyModel& p) { return p.config_json; });

    m.def("train", &train_from_json, py::arg("config_json"),
          "Runs a full training loop from a run-config JSON string.");
    m.def("load_checkpoint", &load_model, py::arg("path"));

    m.def(
        "ms_ssim",
        [](const py::array_t<double>& a, const py::array_t<double>& b, std::size_t scales) {
            return ms_ssim(tensor_from_numpy(a), tensor_from_numpy(b), scales);
        },
        py::arg("img_a"), py::arg("img_b"), py::arg("scales") = 5);
    m.def(
        "sample_diversity",
        [](const py::array_t<double>& images, std::size_t side, std::size_t pairs,
           std::uint64_t seed) {
            return sample_diversity(tensor_from_numpy(images), side, pairs, seed);
        },
        py::arg("images"), py::arg("image_side"), py::arg("pair_count") = 2000,
        py::arg("seed") = 0);
    m.def(
        "inception_score",
        [](const py::array_t<double>& probs) {
            return inception_score_from_probs(tensor_from_numpy(probs));
        },
        py::arg("probs"));
    m.def(
        "mode_coverage",
        [](const py::array_t<double>& samples, const py::array_t<double>& means, double sigma,
           double sigma_radius) {
            ModeCoverage mc = mode_coverage(tensor_from_numpy(samples),
                                            mixture_from(means, sigma), sigma_radius);
            return py::make_tuple(mc.modes_covered, mc.high_quality_fraction);
        },
        py::arg("samples"), py::arg("means"), py::arg("sigma"), py::arg("sigma_radius") = 3.0);
    m.def(
        "empirical_kl",
        [](const py::array_t<double>& codes, bool corrected, bool normalize_by_dim) {
            return empirical_kl(tensor_from_numpy(codes), corrected, normalize_by_dim).value();
        },
        py::arg("codes"), py::arg("corrected") = true, py::arg("normalize_by_dim") = false);
    m.def(
        "independent_critic_distance",
        [](const py::array_t<double>& samples, const py::array_t<double>& held_out,
           std::size_t steps, std::uint64_t seed) {
            CriticConfig cc;
            cc.steps = steps;
            cc.seed = seed;
            return independent_critic_distance(tensor_from_numpy(samples),
                                               tensor_from_numpy(held_out), cc)
                .neg_wasserstein;
        },
        py::arg("samples"), py::arg("held_out"), py::arg("steps") = 5000, py::arg("seed") = 0);
    m.def(
        "gradcheck",
        [](std::uint64_t seed, int points) {
            py::list out;
            for (const GradCheckResult& r : run_gradcheck_suite(seed, points)) {
                out.append(py::make_tuple(r.name, r.max_rel_err, r.threshold));
            }
            return out;
        },
        py::arg("seed") = 42, py::arg("points") = 20);
}
