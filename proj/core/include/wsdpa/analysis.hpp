// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wsdpa/dataio.hpp"
#include "wsdpa/hogsvd.hpp"
#include "wsdpa/selection.hpp"

namespace wsdpa {

/// Per-pattern, per-class singular values and dominance ratios
/// r(i,k) = sigma_i[k] / max_{i' != i} sigma_i'[k]. For each pattern at most
/// one class can have r > 1.
struct AssociationTable {
    Eigen::MatrixXd sigma; // class x pattern
    Eigen::MatrixXd ratio; // class x pattern
    std::vector<std::string> class_names;

    int class_count() const { return static_cast<int>(sigma.rows()); }
    std::int64_t pattern_count() const { return sigma.cols(); }
};

AssociationTable association_table(const HogsvdFactors& factors);

/// A pattern counts as dominant for a class when its ratio reaches this.
inline constexpr double kDefaultDominanceThreshold = 2.0;

/// theta_k = |arctan(sigma_a[k] / sigma_b[k]) - pi/4|, in [0, pi/4).
/// Zero for shared patterns, near pi/4 for class-exclusive ones.
Eigen::VectorXd angular_distance(const HogsvdFactors& factors, int class_a,
                                 int class_b);

/// Pattern indices of a class sorted by descending dominance ratio.
std::vector<std::int64_t> dominant_patterns_top(const AssociationTable& table,
                                                int class_index,
                                                std::int64_t count);

/// All pattern indices with ratio >= threshold, sorted by descending ratio.
std::vector<std::int64_t> dominant_patterns_threshold(const AssociationTable& table,
                                                      int class_index,
                                                      double threshold);

/// Column k of V brought back to pixel space: unselected coefficients zero.
struct PatternImage {
    std::int64_t k = 0;
    ImageTensor image;       // raw, unclamped values
    int dominant_class = 0;  // argmax_i sigma_i[k]
    double dominance_ratio = 0.0;
};

PatternImage pattern_image(const HogsvdFactors& factors, const DatasetTensor& tensor,
                           const WaveletBasis& basis, std::int64_t k);

/// Cumulative rank-1 reconstruction of one dataset image: the first k terms
/// of the image's coefficient row, unscaled, scattered over the selection
/// permutation with the image's own unselected coefficients as fill, then
/// inverted to pixels. residual = ||original - reconstruction||_F.
struct LowrankResult {
    ImageTensor image;
    double residual = 0.0;
};

LowrankResult lowrank_image(const HogsvdFactors& factors, const DatasetTensor& tensor,
                            const Eigen::MatrixXd& raw_class_stack,
                            const WaveletBasis& basis, int class_index,
                            std::int64_t row, std::int64_t k);

/// lowrank_image at each checkpoint; checkpoints must be strictly increasing
/// and within [0, m].
std::vector<std::pair<std::int64_t, double>> residual_curve(
    const HogsvdFactors& factors, const DatasetTensor& tensor,
    const Eigen::MatrixXd& raw_class_stack, const WaveletBasis& basis,
    int class_index, std::int64_t row, const std::vector<std::int64_t>& checkpoints);

/// The reconstruction checkpoints used in the reports: {100, 200, 300, 500,
/// 1000, 1500, 2000, 3000} clipped to m, always ending at m.
std::vector<std::int64_t> default_checkpoints(std::int64_t m);

/// Per-image contribution of pattern p vs pattern q:
/// x = sigma_i[p] * U_i(j,p), y = sigma_i[q] * U_i(j,q).
struct ContributionPoint {
    int class_index = 0;
    std::int64_t row = 0;
    double x = 0.0;
    double y = 0.0;
};

std::vector<ContributionPoint> contribution_coords(const HogsvdFactors& factors,
                                                   std::int64_t p, std::int64_t q);

/// Rows of a class ordered by ascending ||row of U_i Sigma_i||_2; small norm
/// means the image is built from few patterns.
std::vector<std::pair<std::int64_t, double>> complexity_ranking(
    const HogsvdFactors& factors, int class_index);

/// Gaussian-kernel similarity of the rows of U_i Sigma_i:
/// W(a,b) = exp(-d(a,b)^2 / (2 bandwidth^2)), unit diagonal.
struct SimilarityMatrix {
    Eigen::MatrixXd w;
    double bandwidth = 0.0;
};

SimilarityMatrix similarity_matrix(const HogsvdFactors& factors, int class_index,
                                   double bandwidth);

/// Median off-diagonal row distance of U_i Sigma_i (1.0 when degenerate).
double default_bandwidth(const HogsvdFactors& factors, int class_index);

/// Off-diagonal row sums of W; the lowest score is the most isolated image.
std::vector<double> isolation_scores(const SimilarityMatrix& w);

/// Image indices sorted ascending by isolation score (most isolated first).
std::vector<std::int64_t> isolation_ranking(const SimilarityMatrix& w);

/// Relabel a uniformly chosen floor(p * size) subset with labels drawn
/// uniformly over all classes (possibly unchanged). Deterministic in seed.
LabeledDataset randomize_labels(const LabeledDataset& dataset, double fraction,
                                std::uint64_t seed);

} // namespace wsdpa
