// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsdpa {
namespace {

void check_stacks(const std::vector<Eigen::MatrixXd>& stacks) {
    if (stacks.empty()) throw std::invalid_argument("selection: no class stacks");
    const Eigen::Index cols = stacks.front().cols();
    for (const auto& s : stacks) {
        if (s.rows() < 1 || s.cols() < 1)
            throw std::invalid_argument("selection: empty class stack");
        if (s.cols() != cols)
            throw std::invalid_argument("selection: class stacks disagree on column count");
    }
}

// Condition number of the leading gamma x gamma block of an upper-triangular
// factor; equals the condition number of the corresponding column prefix.
double prefix_condition(const Eigen::MatrixXd& r, std::int64_t gamma) {
    const Eigen::MatrixXd block = r.topLeftCorner(gamma, gamma);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(block);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smax <= 0.0) return std::numeric_limits<double>::infinity();
    if (smin < 1e-300) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

} // namespace

std::vector<Eigen::MatrixXd> scale_rows(const std::vector<Eigen::MatrixXd>& stacks,
                                        ScalingRecord& record) {
    check_stacks(stacks);

    double sum = 0.0, abs_sum = 0.0;
    std::int64_t count = 0;
    for (const auto& s : stacks) {
        sum += s.sum();
        abs_sum += s.cwiseAbs().sum();
        count += s.size();
    }
    const double alpha = sum / static_cast<double>(count);
    const double mean_abs = abs_sum / static_cast<double>(count);
    const double m_full = static_cast<double>(stacks.front().cols());
    const double floor = 1e-12 * mean_abs * m_full;

    record.alpha = alpha;
    record.row_sums.clear();
    std::vector<Eigen::MatrixXd> scaled;
    scaled.reserve(stacks.size());
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        const Eigen::MatrixXd& s = stacks[i];
        Eigen::VectorXd sums = s.rowwise().sum();
        for (Eigen::Index j = 0; j < sums.size(); ++j) {
            if (std::abs(sums(j)) <= floor)
                throw std::invalid_argument(
                    "scale_rows: near-zero coefficient sum for class " +
                    std::to_string(i) + ", row " + std::to_string(j) +
                    " (degenerate image)");
        }
        scaled.push_back((alpha * sums.cwiseInverse()).asDiagonal() * s);
        record.row_sums.push_back(std::move(sums));
    }
    return scaled;
}

PivotOrder rrqr_order(const Eigen::MatrixXd& stacked) {
    if (stacked.rows() < 1 || stacked.cols() < 1)
        throw std::invalid_argument("rrqr_order: matrix must have at least one row and column");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
    PivotOrder order;
    const auto& indices = qr.colsPermutation().indices();
    order.perm.resize(static_cast<std::size_t>(indices.size()));
    for (Eigen::Index j = 0; j < indices.size(); ++j)
        order.perm[static_cast<std::size_t>(j)] = indices(j);

    const Eigen::Index diag = std::min(stacked.rows(), stacked.cols());
    order.rdiag.resize(static_cast<std::size_t>(diag));
    for (Eigen::Index j = 0; j < diag; ++j)
        order.rdiag[static_cast<std::size_t>(j)] = std::abs(qr.matrixQR()(j, j));
    return order;
}

double condition_number(const Eigen::MatrixXd& m) {
    if (m.rows() < 1 || m.cols() < 1)
        throw std::invalid_argument("condition_number: empty matrix");
    if (m.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("condition_number: zero matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin < 1e-300) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

DatasetTensor select_coefficients(const std::vector<Eigen::MatrixXd>& scaled_stacks,
                                  const std::vector<std::string>& class_names,
                                  const PivotOrder& order,
                                  const SelectionConfig& cfg,
                                  const CoeffLayout& layout,
                                  const ScalingRecord& scaling) {
    check_stacks(scaled_stacks);
    if (scaled_stacks.size() < 2)
        throw std::invalid_argument("select_coefficients: at least 2 classes required");
    if (class_names.size() != scaled_stacks.size())
        throw std::invalid_argument("select_coefficients: class name count mismatch");
    if (!(cfg.tau > 1.0))
        throw std::invalid_argument("select_coefficients: tau must exceed 1");

    const std::int64_t m_full = scaled_stacks.front().cols();
    if (static_cast<std::int64_t>(order.perm.size()) != m_full)
        throw std::invalid_argument("select_coefficients: pivot order length mismatch");

    std::int64_t total_rows = 0;
    for (const auto& s : scaled_stacks) total_rows += s.rows();
    if (total_rows < 2)
        throw std::invalid_argument("select_coefficients: need at least 2 images");

    DatasetTensor out;
    out.class_names = class_names;
    out.perm = order;
    out.layout = layout;
    out.scaling = scaling;
    if (total_rows < m_full)
        out.warnings.push_back("Samples are fewer than features.");

    // Permute columns into pivot order once, and factor each class so that
    // prefix condition numbers come from triangular blocks.
    const std::size_t c = scaled_stacks.size();
    std::vector<Eigen::MatrixXd> permuted(c);
    std::vector<Eigen::MatrixXd> rfactors(c);
    std::vector<std::int64_t> gamma_max(c);
    for (std::size_t i = 0; i < c; ++i) {
        const Eigen::MatrixXd& s = scaled_stacks[i];
        gamma_max[i] = std::min<std::int64_t>(s.rows(), m_full);
        Eigen::MatrixXd p(s.rows(), m_full);
        for (std::int64_t j = 0; j < m_full; ++j)
            p.col(j) = s.col(order.perm[static_cast<std::size_t>(j)]);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(p.leftCols(gamma_max[i]));
        rfactors[i] = qr.matrixQR()
                          .topLeftCorner(gamma_max[i], gamma_max[i])
                          .triangularView<Eigen::Upper>();
        permuted[i] = std::move(p);
    }

    auto kappa = [&](std::size_t i, std::int64_t gamma) {
        return prefix_condition(rfactors[i], gamma);
    };

    std::int64_t m = 0;
    if (cfg.m_override > 0) {
        m = cfg.m_override;
        if (m > m_full)
            throw std::invalid_argument("select_coefficients: m override exceeds coefficient count");
        for (std::size_t i = 0; i < c; ++i) {
            if (m > gamma_max[i])
                throw std::invalid_argument(
                    "select_coefficients: m override exceeds image count of class '" +
                    class_names[i] + "'");
            if (!(kappa(i, m) <= cfg.tau))
                throw std::invalid_argument(
                    "select_coefficients: m override violates the tau bound for class '" +
                    class_names[i] + "'");
        }
    } else {
        // Per class: largest prefix with kappa <= tau, located by a
        // powers-of-two bracket, bisection, then a short linear scan.
        for (std::size_t i = 0; i < c; ++i) {
            const std::int64_t gmax = gamma_max[i];
            if (!(kappa(i, 1) <= cfg.tau))
                throw std::invalid_argument(
                    "select_coefficients: even a single column violates tau for class '" +
                    class_names[i] + "'");

            std::int64_t lo = 1; // largest known passing gamma
            std::int64_t hi = 0; // smallest known failing gamma, 0 = none
            for (std::int64_t g = 2; g < gmax; g *= 2) {
                if (kappa(i, g) <= cfg.tau) {
                    lo = g;
                } else {
                    hi = g;
                    break;
                }
            }
            if (hi == 0) {
                if (kappa(i, gmax) <= cfg.tau) {
                    lo = gmax;
                } else {
                    hi = gmax;
                }
            }
            std::int64_t gamma_i = lo;
            if (hi > 0) {
                while (hi - lo > 64) {
                    const std::int64_t mid = lo + (hi - lo) / 2;
                    if (kappa(i, mid) <= cfg.tau)
                        lo = mid;
                    else
                        hi = mid;
                }
                gamma_i = lo;
                // kappa is not guaranteed monotone; take the largest passing
                // gamma in the final bracket.
                for (std::int64_t g = hi - 1; g > lo; --g) {
                    if (kappa(i, g) <= cfg.tau) {
                        gamma_i = g;
                        break;
                    }
                }
            }
            m = (i == 0) ? gamma_i : std::min(m, gamma_i);
        }
        // Verify the common truncation; shrink on a non-monotone dip.
        while (m > 1) {
            bool ok = true;
            for (std::size_t i = 0; i < c && ok; ++i)
                ok = kappa(i, m) <= cfg.tau;
            if (ok) break;
            --m;
        }
        if (m < 1)
            throw std::invalid_argument("select_coefficients: no feasible coefficient count");
    }

    out.m = m;
    out.classes.reserve(c);
    for (std::size_t i = 0; i < c; ++i)
        out.classes.push_back(permuted[i].leftCols(m));
    return out;
}

} // namespace wsdpa
