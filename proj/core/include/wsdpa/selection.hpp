// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wsdpa/wavelet.hpp"

namespace wsdpa {

/// Record of the per-image coefficient-sum normalization, sufficient to
/// invert it exactly: row j of class i was multiplied by alpha / row_sums[i][j].
struct ScalingRecord {
    double alpha = 0.0;
    std::vector<Eigen::VectorXd> row_sums; // pre-scaling row sums per class
};

/// Column order produced by rank-revealing QR: perm lists original column
/// indices by decreasing rank influence, rdiag the |R| diagonal.
struct PivotOrder {
    std::vector<std::int64_t> perm;
    std::vector<double> rdiag;
};

struct SelectionConfig {
    double tau = 1e6;            // condition-number cap, > 1
    std::int64_t m_override = 0; // 0 = derive m from tau
};

/// The selected coefficient stacks: one n_i x m matrix per class, all sharing
/// the same m columns (the first m entries of perm), each with condition
/// number <= tau.
struct DatasetTensor {
    std::vector<Eigen::MatrixXd> classes;
    std::vector<std::string> class_names;
    PivotOrder perm;
    std::int64_t m = 0;
    CoeffLayout layout;
    ScalingRecord scaling;
    std::vector<std::string> warnings;

    int class_count() const { return static_cast<int>(classes.size()); }
};

/// Normalize every image row so its coefficient sum equals the grand mean
/// alpha of all entries. Throws on a near-zero row sum (degenerate image).
std::vector<Eigen::MatrixXd> scale_rows(const std::vector<Eigen::MatrixXd>& stacks,
                                        ScalingRecord& record);

/// Greedy column-pivoted Householder QR of the vertically stacked classes.
/// Ties in pivot selection resolve to the lowest column index.
PivotOrder rrqr_order(const Eigen::MatrixXd& stacked);

/// 2-norm condition number sigma_max / sigma_min; +inf when sigma_min
/// underflows, error on an all-zero matrix.
double condition_number(const Eigen::MatrixXd& m);

/// Algorithm lines 13-17: per class find the largest pivot-order prefix whose
/// condition number stays within cfg.tau, truncate every class to the common
/// prefix length m, and package the result.
DatasetTensor select_coefficients(const std::vector<Eigen::MatrixXd>& scaled_stacks,
                                  const std::vector<std::string>& class_names,
                                  const PivotOrder& order,
                                  const SelectionConfig& cfg,
                                  const CoeffLayout& layout,
                                  const ScalingRecord& scaling);

} // namespace wsdpa
