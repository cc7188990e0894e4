// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wsdpa {
namespace {

constexpr double kQuarterPi = 0.78539816339744830961;

void check_class(const HogsvdFactors& f, int i) {
    if (i < 0 || i >= f.class_count())
        throw std::invalid_argument("analysis: class index out of range");
}

Eigen::MatrixXd weighted_rows(const HogsvdFactors& f, int i) {
    return f.U[static_cast<std::size_t>(i)] *
           f.sigma[static_cast<std::size_t>(i)].asDiagonal();
}

// Deterministic bounded draw; avoids the implementation-defined distributions.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

} // namespace

AssociationTable association_table(const HogsvdFactors& factors) {
    const int c = factors.class_count();
    const std::int64_t m = factors.pattern_count();
    AssociationTable t;
    t.class_names = factors.class_names;
    t.sigma.resize(c, m);
    t.ratio.resize(c, m);
    for (int i = 0; i < c; ++i)
        t.sigma.row(i) = factors.sigma[static_cast<std::size_t>(i)].transpose();
    for (std::int64_t k = 0; k < m; ++k) {
        for (int i = 0; i < c; ++i) {
            double other = 0.0;
            for (int j = 0; j < c; ++j)
                if (j != i) other = std::max(other, t.sigma(j, k));
            t.ratio(i, k) = t.sigma(i, k) / other;
        }
    }
    return t;
}

Eigen::VectorXd angular_distance(const HogsvdFactors& factors, int class_a,
                                 int class_b) {
    check_class(factors, class_a);
    check_class(factors, class_b);
    if (class_a == class_b)
        throw std::invalid_argument("angular_distance: classes must differ");
    const auto& sa = factors.sigma[static_cast<std::size_t>(class_a)];
    const auto& sb = factors.sigma[static_cast<std::size_t>(class_b)];
    Eigen::VectorXd theta(sa.size());
    for (Eigen::Index k = 0; k < sa.size(); ++k)
        theta(k) = std::abs(std::atan(sa(k) / sb(k)) - kQuarterPi);
    return theta;
}

namespace {

std::vector<std::int64_t> patterns_by_ratio(const AssociationTable& table,
                                            int class_index) {
    if (class_index < 0 || class_index >= table.class_count())
        throw std::invalid_argument("dominant_patterns: class index out of range");
    std::vector<std::int64_t> idx(static_cast<std::size_t>(table.pattern_count()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
        return table.ratio(class_index, a) > table.ratio(class_index, b);
    });
    return idx;
}

} // namespace

std::vector<std::int64_t> dominant_patterns_top(const AssociationTable& table,
                                                int class_index,
                                                std::int64_t count) {
    if (count < 0) throw std::invalid_argument("dominant_patterns: negative count");
    auto idx = patterns_by_ratio(table, class_index);
    if (count < static_cast<std::int64_t>(idx.size()))
        idx.resize(static_cast<std::size_t>(count));
    return idx;
}

std::vector<std::int64_t> dominant_patterns_threshold(const AssociationTable& table,
                                                      int class_index,
                                                      double threshold) {
    auto idx = patterns_by_ratio(table, class_index);
    std::vector<std::int64_t> out;
    for (std::int64_t k : idx)
        if (table.ratio(class_index, k) >= threshold) out.push_back(k);
    return out;
}

PatternImage pattern_image(const HogsvdFactors& factors, const DatasetTensor& tensor,
                           const WaveletBasis& basis, std::int64_t k) {
    const std::int64_t m = factors.pattern_count();
    if (k < 0 || k >= m)
        throw std::invalid_argument("pattern_image: pattern index out of range");

    std::vector<double> column(static_cast<std::size_t>(m));
    Eigen::VectorXd::Map(column.data(), m) = factors.V.col(k);
    const CoeffVector coeffs =
        scatter(column, tensor.perm.perm, m, zero_coeffs(tensor.layout));

    PatternImage p;
    p.k = k;
    p.image = waverec(coeffs, basis);
    Eigen::Index argmax = 0;
    double best = -1.0;
    for (int i = 0; i < factors.class_count(); ++i) {
        const double s = factors.sigma[static_cast<std::size_t>(i)](k);
        if (s > best) {
            best = s;
            argmax = i;
        }
    }
    p.dominant_class = static_cast<int>(argmax);
    double other = 0.0;
    for (int i = 0; i < factors.class_count(); ++i)
        if (i != p.dominant_class)
            other = std::max(other, factors.sigma[static_cast<std::size_t>(i)](k));
    p.dominance_ratio = best / other;
    return p;
}

LowrankResult lowrank_image(const HogsvdFactors& factors, const DatasetTensor& tensor,
                            const Eigen::MatrixXd& raw_class_stack,
                            const WaveletBasis& basis, int class_index,
                            std::int64_t row, std::int64_t k) {
    check_class(factors, class_index);
    const std::int64_t m = factors.pattern_count();
    if (k < 0 || k > m)
        throw std::invalid_argument("lowrank_image: term count out of range [0, m]");
    if (row < 0 || row >= factors.rows(class_index))
        throw std::invalid_argument("lowrank_image: row index out of range");
    if (raw_class_stack.rows() != factors.rows(class_index) ||
        raw_class_stack.cols() != tensor.layout.total())
        throw std::invalid_argument("lowrank_image: raw stack shape mismatch");

    const auto& u = factors.U[static_cast<std::size_t>(class_index)];
    const auto& sig = factors.sigma[static_cast<std::size_t>(class_index)];

    // Row of the k-term sum, without forming the full matrix.
    Eigen::VectorXd partial = Eigen::VectorXd::Zero(m);
    if (k > 0) {
        const Eigen::VectorXd w =
            sig.head(k).cwiseProduct(u.row(row).head(k).transpose());
        partial = factors.V.leftCols(k) * w;
    }

    // Undo the row normalization, then fill unselected entries from the
    // image's own coefficients.
    const double s =
        tensor.scaling.row_sums[static_cast<std::size_t>(class_index)](row);
    partial *= s / tensor.scaling.alpha;

    CoeffVector fill;
    fill.layout = tensor.layout;
    fill.values.assign(raw_class_stack.row(row).begin(),
                       raw_class_stack.row(row).end());
    std::vector<double> selected(partial.data(), partial.data() + m);
    const CoeffVector coeffs = scatter(selected, tensor.perm.perm, m, fill);

    LowrankResult r;
    r.image = waverec(coeffs, basis);
    const ImageTensor original = waverec(fill, basis);
    double acc = 0.0;
    for (std::size_t i = 0; i < original.values.size(); ++i) {
        const double d = original.values[i] - r.image.values[i];
        acc += d * d;
    }
    r.residual = std::sqrt(acc);
    return r;
}

std::vector<std::pair<std::int64_t, double>> residual_curve(
    const HogsvdFactors& factors, const DatasetTensor& tensor,
    const Eigen::MatrixXd& raw_class_stack, const WaveletBasis& basis,
    int class_index, std::int64_t row,
    const std::vector<std::int64_t>& checkpoints) {
    const std::int64_t m = factors.pattern_count();
    std::int64_t prev = -1;
    for (std::int64_t k : checkpoints) {
        if (k <= prev)
            throw std::invalid_argument("residual_curve: checkpoints must be strictly increasing");
        if (k < 0 || k > m)
            throw std::invalid_argument("residual_curve: checkpoint out of range [0, m]");
        prev = k;
    }
    std::vector<std::pair<std::int64_t, double>> curve;
    curve.reserve(checkpoints.size());
    for (std::int64_t k : checkpoints)
        curve.emplace_back(
            k, lowrank_image(factors, tensor, raw_class_stack, basis, class_index,
                             row, k)
                   .residual);
    return curve;
}

std::vector<std::int64_t> default_checkpoints(std::int64_t m) {
    static const std::int64_t grid[] = {100, 200, 300, 500, 1000, 1500, 2000, 3000};
    std::vector<std::int64_t> out;
    for (std::int64_t g : grid)
        if (g < m) out.push_back(g);
    out.push_back(m);
    return out;
}

std::vector<ContributionPoint> contribution_coords(const HogsvdFactors& factors,
                                                   std::int64_t p, std::int64_t q) {
    const std::int64_t m = factors.pattern_count();
    if (p < 0 || p >= m || q < 0 || q >= m)
        throw std::invalid_argument("contribution_coords: pattern index out of range");
    if (p == q)
        throw std::invalid_argument("contribution_coords: patterns must differ");

    std::vector<ContributionPoint> pts;
    for (int i = 0; i < factors.class_count(); ++i) {
        const auto& u = factors.U[static_cast<std::size_t>(i)];
        const auto& s = factors.sigma[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < u.rows(); ++j)
            pts.push_back({i, j, s(p) * u(j, p), s(q) * u(j, q)});
    }
    return pts;
}

std::vector<std::pair<std::int64_t, double>> complexity_ranking(
    const HogsvdFactors& factors, int class_index) {
    check_class(factors, class_index);
    const Eigen::MatrixXd rows = weighted_rows(factors, class_index);
    std::vector<std::pair<std::int64_t, double>> ranked;
    ranked.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index j = 0; j < rows.rows(); ++j)
        ranked.emplace_back(j, rows.row(j).norm());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return ranked;
}

SimilarityMatrix similarity_matrix(const HogsvdFactors& factors, int class_index,
                                   double bandwidth) {
    check_class(factors, class_index);
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("similarity_matrix: bandwidth must be positive");

    const Eigen::MatrixXd rows = weighted_rows(factors, class_index);
    const Eigen::Index n = rows.rows();
    SimilarityMatrix sm;
    sm.bandwidth = bandwidth;
    sm.w.resize(n, n);
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    for (Eigen::Index a = 0; a < n; ++a) {
        sm.w(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double d2 = (rows.row(a) - rows.row(b)).squaredNorm();
            const double w = std::exp(-d2 * inv);
            sm.w(a, b) = w;
            sm.w(b, a) = w;
        }
    }
    return sm;
}

double default_bandwidth(const HogsvdFactors& factors, int class_index) {
    check_class(factors, class_index);
    const Eigen::MatrixXd rows = weighted_rows(factors, class_index);
    const Eigen::Index n = rows.rows();
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b)
            dist.push_back((rows.row(a) - rows.row(b)).norm());
    if (dist.empty()) return 1.0;
    std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
    const double med = dist[dist.size() / 2];
    return med > 0.0 ? med : 1.0;
}

std::vector<double> isolation_scores(const SimilarityMatrix& w) {
    const Eigen::Index n = w.w.rows();
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a)
        scores[static_cast<std::size_t>(a)] = w.w.row(a).sum() - w.w(a, a);
    return scores;
}

std::vector<std::int64_t> isolation_ranking(const SimilarityMatrix& w) {
    const auto scores = isolation_scores(w);
    std::vector<std::int64_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
        return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
    });
    return idx;
}

LabeledDataset randomize_labels(const LabeledDataset& dataset, double fraction,
                                std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("randomize_labels: fraction must lie in [0, 1]");
    LabeledDataset out = dataset;
    const std::size_t n = dataset.size();
    const std::size_t pick = static_cast<std::size_t>(fraction * static_cast<double>(n));
    if (pick == 0 || dataset.class_count() == 0) return out;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first `pick` entries form the uniform subset.
    for (std::size_t i = 0; i < pick; ++i) {
        const std::size_t j = i + bounded(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    const std::uint64_t c = static_cast<std::uint64_t>(dataset.class_count());
    for (std::size_t i = 0; i < pick; ++i)
        out.labels[idx[i]] = static_cast<int>(bounded(rng, c));
    return out;
}

} // namespace wsdpa
