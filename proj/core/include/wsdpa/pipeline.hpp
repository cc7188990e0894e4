// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsdpa/analysis.hpp"
#include "wsdpa/dataio.hpp"
#include "wsdpa/factors_io.hpp"
#include "wsdpa/hogsvd.hpp"
#include "wsdpa/selection.hpp"
#include "wsdpa/wavelet.hpp"

namespace wsdpa {

struct RunConfig {
    std::vector<std::string> dataset_paths;
    std::string format;  // idx | cifar | dir
    std::string basis = "db2";
    std::string method = "hogsvd"; // the only supported decomposition
    int levels = 1;
    double tau = 1e6;
    std::int64_t m_override = 0;
    bool pixel_mode = false; // identity transform instead of wavelets
    double shuffle_fraction = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> class_filter;
    std::string out_dir = "wsdpa_run";
    int downscale = 1;
};

struct AnalysisRun {
    RunConfig config;
    WaveletBasis basis;
    CoeffLayout layout;
    DatasetTensor tensor;
    HogsvdFactors factors;
    std::vector<Eigen::MatrixXd> raw_stacks; // pre-scaling, n_i x m_full
    double runtime_seconds = 0.0;
};

/// Load the configured dataset (idx / cifar / dir).
LabeledDataset load_dataset(const RunConfig& cfg);

/// Keep only the named classes; the filter order defines the new indices.
LabeledDataset filter_classes(const LabeledDataset& dataset,
                              const std::vector<std::string>& keep);

/// Decompose every image; deterministic, parallel across images.
std::vector<CoeffVector> decompose_all(const LabeledDataset& dataset,
                                       const WaveletBasis& basis, int levels);

/// The full pipeline on an in-memory dataset: optional label shuffle,
/// decomposition, row scaling, pivot ordering, selection, joint factorization.
AnalysisRun analyze_dataset(const LabeledDataset& dataset, const RunConfig& cfg);

/// Write singular_values.csv, association.csv, angular_<a>_<b>.csv per class
/// pair, report.json, and factors.bin into out_dir.
std::vector<std::string> write_run_artifacts(const AnalysisRun& run,
                                             const std::string& out_dir);

/// JSON run summary (format version, configuration, m, dominant patterns).
void write_json_report(const AnalysisRun& run, const std::string& path);

/// load + analyze + write artifacts.
AnalysisRun cmd_analyze(const RunConfig& cfg);

/// Pattern images for the top dominant patterns of one class; returns the
/// files written.
std::vector<std::string> cmd_patterns(const std::string& run_dir,
                                      const std::string& class_name,
                                      std::int64_t count);

/// Cumulative rank-1 reconstructions of one image at the given checkpoints
/// (empty = default grid), plus residual.csv.
std::vector<std::string> cmd_reconstruct(const std::string& run_dir,
                                         const std::string& class_name,
                                         std::int64_t row,
                                         std::vector<std::int64_t> checkpoints);

/// similarity.csv and isolation.csv for one class; bandwidth defaults to the
/// median off-diagonal distance.
std::vector<std::string> cmd_similarity(const std::string& run_dir,
                                        const std::string& class_name,
                                        std::optional<double> bandwidth);

} // namespace wsdpa
