#include "qfiae/artifacts.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qfiae::artifacts {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open artifact file: " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write artifact file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

void save_model(const vqc::QnnModel& model, const TrainingMeta& meta, const std::string& path) {
    model.ansatz.validate();
    model.params.check_shape(model.ansatz);
    json j;
    j["format"] = "qfiae-model-v1";
    j["ansatz"] = {{"n_qubits", model.ansatz.n_qubits},
                   {"n_layers", model.ansatz.n_layers},
                   {"encodings_per_variable", model.ansatz.encodings_per_variable},
                   {"n_variables", model.ansatz.n_variables},
                   {"measured_qubit", model.ansatz.measured_qubit}};
    j["input_scale"] = model.input_scale;
    j["output_scale"] = model.output_scale;
    j["output_offset"] = model.output_offset;
    j["params"] = model.params.angles;
    j["training"] = {{"seed", meta.seed},
                     {"final_mse", meta.final_mse},
                     {"steps", meta.steps},
                     {"restarts", meta.restarts}};
    write_json(j, path);
}

vqc::QnnModel load_model(const std::string& path, TrainingMeta* meta) {
    const json j = read_json(path);
    if (j.value("format", "") != "qfiae-model-v1") {
        throw std::runtime_error("unrecognized model artifact format in " + path);
    }
    vqc::QnnModel model;
    const json& a = j.at("ansatz");
    model.ansatz.n_qubits = a.at("n_qubits").get<int>();
    model.ansatz.n_layers = a.at("n_layers").get<int>();
    model.ansatz.encodings_per_variable = a.at("encodings_per_variable").get<int>();
    model.ansatz.n_variables = a.at("n_variables").get<int>();
    model.ansatz.measured_qubit = a.at("measured_qubit").get<int>();
    model.ansatz.validate();
    j.at("input_scale").get_to(model.input_scale);
    model.output_scale = j.at("output_scale").get<double>();
    model.output_offset = j.at("output_offset").get<double>();
    j.at("params").get_to(model.params.angles);
    model.params.check_shape(model.ansatz);
    if (meta != nullptr && j.contains("training")) {
        const json& t = j.at("training");
        meta->seed = t.value("seed", std::uint64_t{0});
        meta->final_mse = t.value("final_mse", 0.0);
        meta->steps = t.value("steps", 0LL);
        meta->restarts = t.value("restarts", 1);
    }
    return model;
}

void save_series(const fourier::FourierSeries2D& series, const std::string& path) {
    json terms = json::array();
    for (int w1 = -series.n_max; w1 <= series.n_max; ++w1) {
        for (int w2 = -series.n_max; w2 <= series.n_max; ++w2) {
            const auto c = series.at(w1, w2);
            if (std::abs(c) > 1e-12) {
                terms.push_back({w1, w2, c.real(), c.imag()});
            }
        }
    }
    json j;
    j["format"] = "qfiae-series-v1";
    j["n_max"] = series.n_max;
    j["terms"] = std::move(terms);
    write_json(j, path);
}

fourier::FourierSeries2D load_series(const std::string& path) {
    const json j = read_json(path);
    if (j.value("format", "") != "qfiae-series-v1") {
        throw std::runtime_error("unrecognized series artifact format in " + path);
    }
    auto series = fourier::FourierSeries2D::zero(j.at("n_max").get<int>());
    for (const auto& t : j.at("terms")) {
        const int w1 = t.at(0).get<int>();
        const int w2 = t.at(1).get<int>();
        series.at(w1, w2) = {t.at(2).get<double>(), t.at(3).get<double>()};
    }
    const double asym = fourier::hermitian_asymmetry(series);
    if (asym > 1e-8) {
        throw std::runtime_error("series artifact " + path +
                                 " violates Hermitian symmetry by " + std::to_string(asym));
    }
    return series;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace qfiae::artifacts
