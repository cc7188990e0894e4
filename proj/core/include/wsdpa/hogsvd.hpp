// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wsdpa/selection.hpp"

namespace wsdpa {

/// Joint decomposition D_i = U_i diag(sigma_i) V^T with one right basis V
/// shared by every class. Columns of V are the patterns; V and all U_i have
/// unit-norm columns, all sigma entries are positive.
struct HogsvdFactors {
    Eigen::MatrixXd V;                  // m x m
    std::vector<Eigen::MatrixXd> U;     // n_i x m per class
    std::vector<Eigen::VectorXd> sigma; // length m per class
    std::vector<std::string> class_names;
    Eigen::VectorXd eigvals;            // balance-matrix spectrum, descending
    double v_orthogonality = 0.0;       // ||V^T V - I||_max, diagnostic only

    int class_count() const { return static_cast<int>(U.size()); }
    std::int64_t pattern_count() const { return V.cols(); }
    std::int64_t rows(int i) const { return U[static_cast<std::size_t>(i)].rows(); }
};

/// Decompose full-column-rank stacks sharing a column count. The right basis
/// comes from the eigenvectors of the pairwise balance matrix
///   T = 1/(c(c-1)) * sum_{i<j} (A_i A_j^-1 + A_j A_i^-1),  A_i = D_i^T D_i,
/// sorted by descending eigenvalue, each column signed so its
/// largest-magnitude entry is positive.
HogsvdFactors hogsvd(const std::vector<Eigen::MatrixXd>& stacks,
                     const std::vector<std::string>& class_names);

/// Convenience overload for a selected dataset.
HogsvdFactors hogsvd(const DatasetTensor& tensor);

/// Sum of the leading k rank-1 terms sigma_i[j] * U_i(:,j) * V(:,j)^T.
Eigen::MatrixXd rank1_partial(const HogsvdFactors& factors, int class_index,
                              std::int64_t k);

} // namespace wsdpa
