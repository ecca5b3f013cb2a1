#pragma once

#include <string>

#include "qfiae/fourier.hpp"
#include "qfiae/vqc.hpp"

namespace qfiae::artifacts {

struct TrainingMeta {
    std::uint64_t seed = 0;
    double final_mse = 0.0;
    long long steps = 0;
    int restarts = 1;
};

// JSON model artifact; doubles round-trip losslessly.
void save_model(const vqc::QnnModel& model, const TrainingMeta& meta, const std::string& path);
vqc::QnnModel load_model(const std::string& path, TrainingMeta* meta = nullptr);

// JSON series artifact: n_max plus the sparse (w1, w2, Re c, Im c) list of
// terms with |c| > 1e-12.
void save_series(const fourier::FourierSeries2D& series, const std::string& path);
// Validates Hermitian symmetry on load; throws on a corrupted artifact.
fourier::FourierSeries2D load_series(const std::string& path);

// Stable content hash for artifact caching.
std::uint64_t fnv1a(const std::string& text);

}  // namespace qfiae::artifacts
