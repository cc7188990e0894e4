// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/hogsvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wsdpa {

HogsvdFactors hogsvd(const std::vector<Eigen::MatrixXd>& stacks,
                     const std::vector<std::string>& class_names) {
    const std::size_t c = stacks.size();
    if (c < 2) throw std::invalid_argument("hogsvd: at least 2 classes required");
    if (class_names.size() != c)
        throw std::invalid_argument("hogsvd: class name count mismatch");

    const Eigen::Index m = stacks.front().cols();
    for (const auto& s : stacks) {
        if (s.cols() != m)
            throw std::invalid_argument("hogsvd: stacks disagree on column count");
        if (s.rows() < s.cols())
            throw std::invalid_argument("hogsvd: stack has fewer rows than columns");
    }

    // Gram matrices and their factorizations. A failure here means a stack
    // lost full column rank, which the selection stage is meant to prevent.
    std::vector<Eigen::MatrixXd> gram(c);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt(c);
    for (std::size_t i = 0; i < c; ++i) {
        gram[i] = stacks[i].transpose() * stacks[i];
        llt[i].compute(gram[i]);
        if (llt[i].info() != Eigen::Success)
            throw std::runtime_error(
                "hogsvd: Gram matrix of class '" + class_names[i] +
                "' is numerically singular; lower tau to select fewer coefficients");
    }

    Eigen::MatrixXd balance = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = i + 1; j < c; ++j) {
            // A_i A_j^-1 = (A_j^-1 A_i)^T by symmetry of both factors.
            balance += llt[j].solve(gram[i]).transpose();
            balance += llt[i].solve(gram[j]).transpose();
        }
    }
    balance *= 1.0 / (static_cast<double>(c) * static_cast<double>(c - 1));

    Eigen::EigenSolver<Eigen::MatrixXd> es(balance);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hogsvd: balance-matrix eigendecomposition failed");

    const Eigen::VectorXcd lambda = es.eigenvalues();
    for (Eigen::Index k = 0; k < m; ++k) {
        if (std::abs(lambda(k).imag()) > 1e-8 * std::abs(lambda(k)))
            throw std::runtime_error(
                "hogsvd: balance matrix has a complex eigenvalue; the stacks "
                "violate the full-column-rank preconditions");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return lambda(a).real() > lambda(b).real();
    });

    HogsvdFactors f;
    f.class_names = class_names;
    f.eigvals.resize(m);
    f.V.resize(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        f.eigvals(k) = lambda(src).real();
        Eigen::VectorXd col = es.eigenvectors().col(src).real();
        const double norm = col.norm();
        if (!(norm > 0.0))
            throw std::runtime_error("hogsvd: degenerate eigenvector in right basis");
        col /= norm;
        Eigen::Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col(imax) < 0.0) col = -col;
        f.V.col(k) = col;
    }
    f.v_orthogonality =
        (f.V.transpose() * f.V - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();

    // B_i = D_i V^-T = (V^-1 D_i^T)^T, then split into unit columns and
    // singular values.
    Eigen::PartialPivLU<Eigen::MatrixXd> v_lu(f.V);
    f.U.resize(c);
    f.sigma.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
        Eigen::MatrixXd b = v_lu.solve(stacks[i].transpose()).transpose();
        Eigen::VectorXd sig(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double s = b.col(k).norm();
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::runtime_error(
                    "hogsvd: vanishing singular value for class '" + class_names[i] +
                    "'; lower tau to select fewer coefficients");
            b.col(k) /= s;
            sig(k) = s;
        }
        f.U[i] = std::move(b);
        f.sigma[i] = std::move(sig);
    }
    return f;
}

HogsvdFactors hogsvd(const DatasetTensor& tensor) {
    return hogsvd(tensor.classes, tensor.class_names);
}

Eigen::MatrixXd rank1_partial(const HogsvdFactors& factors, int class_index,
                              std::int64_t k) {
    if (class_index < 0 || class_index >= factors.class_count())
        throw std::invalid_argument("rank1_partial: class index out of range");
    const std::int64_t m = factors.pattern_count();
    if (k < 0 || k > m)
        throw std::invalid_argument("rank1_partial: term count out of range [0, m]");

    const auto& u = factors.U[static_cast<std::size_t>(class_index)];
    const auto& s = factors.sigma[static_cast<std::size_t>(class_index)];
    if (k == 0) return Eigen::MatrixXd::Zero(u.rows(), m);
    return u.leftCols(k) * s.head(k).asDiagonal() * factors.V.leftCols(k).transpose();
}

} // namespace wsdpa
