// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "wsdpa/wavelet.hpp"

using namespace wsdpa;
using namespace wsdpa::testing;

namespace {

const char* kOrthogonalBases[] = {"haar", "db1", "db2", "db3", "db4", "db5"};

CoeffLayout flat_layout(int n) {
    return CoeffLayout::compute(1, n, 1, WaveletBasis::from_name("identity"), 0);
}

} // namespace

TEST_CASE("filters are orthonormal quadrature-mirror pairs") {
    for (const char* name : kOrthogonalBases) {
        const WaveletBasis b = WaveletBasis::from_name(name);
        CAPTURE(name);
        double norm2 = 0.0, sum = 0.0, hsum = 0.0;
        for (double v : b.dec_lowpass) {
            norm2 += v * v;
            sum += v;
        }
        for (double v : b.dec_highpass) hsum += v;
        CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-12);
        CHECK(std::abs(sum - std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(hsum) < 1e-12);
        CHECK(b.rec_lowpass.size() == b.dec_lowpass.size());
    }
    CHECK(WaveletBasis::from_name("identity").is_identity());
    CHECK_THROWS_AS(WaveletBasis::from_name("sym4"), std::invalid_argument);
}

TEST_CASE("coefficient counts follow floor((n + f - 1)/2) per axis per level") {
    const ImageTensor rgb(32, 32, 3);
    const CoeffVector cv = wavedec(rgb, WaveletBasis::from_name("db2"), 1);
    CHECK(cv.values.size() == 3468);           // 3 x 4 x 17 x 17
    CHECK(cv.layout.per_channel() == 1156);

    for (const char* name : kOrthogonalBases) {
        const WaveletBasis b = WaveletBasis::from_name(name);
        const int f = b.filter_length();
        for (int n : {7, 12, 16, 33}) {
            const CoeffLayout lay = CoeffLayout::compute(n, n, 1, b, 2);
            const int l1 = (n + f - 1) / 2;
            const int l2 = (l1 + f - 1) / 2;
            CHECK(lay.band_rows[0] == l1);
            CHECK(lay.band_rows[1] == l2);
            CHECK(lay.total() == 3 * l1 * l1 + 4 * l2 * l2);
        }
    }
}

TEST_CASE("zero image decomposes to exactly zero coefficients") {
    const ImageTensor zero(8, 8, 1);
    for (const char* name : kOrthogonalBases) {
        const CoeffVector cv = wavedec(zero, WaveletBasis::from_name(name), 2);
        for (double v : cv.values) CHECK(v == 0.0);
    }
}

TEST_CASE("haar matches the dense transform matrix, which is orthogonal") {
    for (const char* name : {"haar", "db1"}) {
        const WaveletBasis b = WaveletBasis::from_name(name);
        const Eigen::MatrixXd t = dense_transform_matrix(8, 8, b, 1);
        REQUIRE(t.rows() == 64);
        REQUIRE(t.cols() == 64);
        const double orth =
            (t.transpose() * t - Eigen::MatrixXd::Identity(64, 64))
                .cwiseAbs()
                .maxCoeff();
        CHECK(orth < 1e-10);

        const ImageTensor img = seeded_image(8, 8, 1, 99);
        const CoeffVector cv = wavedec(img, b, 1);
        const Eigen::VectorXd direct =
            t * Eigen::Map<const Eigen::VectorXd>(img.values.data(), 64);
        for (int i = 0; i < 64; ++i)
            CHECK(std::abs(cv.values[static_cast<std::size_t>(i)] - direct(i)) <
                  1e-12);
    }
}

TEST_CASE("single-coefficient inversion matches the transpose of the dense matrix") {
    // For an orthogonal transform the inverse is the transpose, so
    // waverec(e_j) must reproduce row j of the forward matrix.
    const WaveletBasis b = WaveletBasis::from_name("haar");
    const Eigen::MatrixXd t = dense_transform_matrix(4, 4, b, 1);
    CoeffVector unit = zero_coeffs(CoeffLayout::compute(4, 4, 1, b, 1));
    const std::int64_t detail_slot = unit.layout.band_offset(0, 1, 3) + 1;
    unit.values[static_cast<std::size_t>(detail_slot)] = 1.0;
    const ImageTensor img = waverec(unit, b);
    for (int p = 0; p < 16; ++p)
        CHECK(std::abs(img.values[static_cast<std::size_t>(p)] -
                       t(detail_slot, p)) < 1e-12);
}

TEST_CASE("round-trip reconstruction is exact to 1e-10") {
    std::uint64_t seed = 7;
    for (const char* name : kOrthogonalBases) {
        const WaveletBasis b = WaveletBasis::from_name(name);
        for (int levels = 1; levels <= 3; ++levels) {
            for (int trial = 0; trial < 5; ++trial) {
                const int h = 9 + static_cast<int>(seed % 24);
                const int w = 9 + static_cast<int>((seed / 3) % 24);
                const int c = (trial % 2) ? 3 : 1;
                const ImageTensor img = seeded_image(h, w, c, seed++);
                const ImageTensor rec = waverec(wavedec(img, b, levels), b);
                CAPTURE(name);
                CAPTURE(levels);
                CHECK(rel_image_error(rec, img) < 1e-10);
            }
        }
    }
}

TEST_CASE("wavedec is linear") {
    const WaveletBasis b = WaveletBasis::from_name("db3");
    const ImageTensor x = seeded_image(13, 17, 1, 5);
    const ImageTensor y = seeded_image(13, 17, 1, 6);
    const double a = 1.75, c = -0.4;
    ImageTensor mix(13, 17, 1);
    for (std::size_t i = 0; i < mix.values.size(); ++i)
        mix.values[i] = a * x.values[i] + c * y.values[i];

    const CoeffVector cx = wavedec(x, b, 2);
    const CoeffVector cy = wavedec(y, b, 2);
    const CoeffVector cm = wavedec(mix, b, 2);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < cm.values.size(); ++i) {
        const double want = a * cx.values[i] + c * cy.values[i];
        num += (cm.values[i] - want) * (cm.values[i] - want);
        den += want * want;
    }
    CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("identity basis is the exact identity") {
    const WaveletBasis id = WaveletBasis::from_name("identity");
    const ImageTensor img = seeded_image(6, 10, 3, 11);
    const CoeffVector cv = wavedec(img, id, 4); // level count ignored
    CHECK(cv.values == img.values);
    CHECK(cv.layout.levels == 0);
    CHECK(waverec(cv, id).values == img.values);
}

TEST_CASE("all-zero coefficients invert to the all-zero image") {
    const WaveletBasis b = WaveletBasis::from_name("db2");
    const ImageTensor img = waverec(zero_coeffs(CoeffLayout::compute(12, 9, 1, b, 2)), b);
    for (double v : img.values) CHECK(v == 0.0);
}

TEST_CASE("errors name the offending level and reject mismatches") {
    const WaveletBasis haar = WaveletBasis::from_name("haar");
    CHECK_THROWS_WITH_AS(wavedec(ImageTensor(2, 2, 1), haar, 2),
                         doctest::Contains("level 2"), std::invalid_argument);
    CHECK_THROWS_AS(wavedec(ImageTensor(4, 4, 1), haar, 0), std::invalid_argument);

    // layout/basis mismatch: identity coefficients fed to a wavelet basis
    const CoeffVector flat = wavedec(ImageTensor(4, 4, 1),
                                     WaveletBasis::from_name("identity"), 1);
    CHECK_THROWS_AS(waverec(flat, haar), std::invalid_argument);

    CoeffVector short_cv = wavedec(ImageTensor(4, 4, 1), haar, 1);
    short_cv.values.pop_back();
    CHECK_THROWS_AS(waverec(short_cv, haar), std::invalid_argument);
}

TEST_CASE("scatter places selected values and copies the fill") {
    SUBCASE("hand example: values [5], perm [2,0,1], m=1, zero fill") {
        const CoeffVector out =
            scatter({5.0}, {2, 0, 1}, 1, zero_coeffs(flat_layout(3)));
        CHECK(out.values == std::vector<double>{0.0, 0.0, 5.0});
    }
    SUBCASE("m equal to the full length with identity perm reproduces values") {
        const CoeffVector out =
            scatter({1.0, 2.0, 3.0}, {0, 1, 2}, 3, zero_coeffs(flat_layout(3)));
        CHECK(out.values == std::vector<double>{1.0, 2.0, 3.0});
    }
    SUBCASE("m = 0 returns the fill") {
        CoeffVector fill = zero_coeffs(flat_layout(3));
        fill.values = {7.0, 8.0, 9.0};
        const CoeffVector out = scatter({}, {2, 0, 1}, 0, fill);
        CHECK(out.values == fill.values);
    }
    SUBCASE("length mismatch is an error") {
        CHECK_THROWS_AS(scatter({1.0, 2.0}, {0, 1, 2}, 1, zero_coeffs(flat_layout(3))),
                        std::invalid_argument);
    }
}
