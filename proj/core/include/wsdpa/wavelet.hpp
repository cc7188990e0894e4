// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsdpa/image.hpp"

namespace wsdpa {

/// Orthogonal two-channel filter bank, or the identity ("pixel") transform.
///
/// Filters follow the usual quadrature-mirror construction from the scaling
/// filter h (which sums to sqrt(2) and has unit 2-norm):
///   rec_lowpass  = h
///   dec_lowpass  = reverse(h)
///   dec_highpass[k] = (-1)^k * h[k]
///   rec_highpass    = reverse(dec_highpass)
struct WaveletBasis {
    std::string name;
    std::vector<double> dec_lowpass;
    std::vector<double> dec_highpass;
    std::vector<double> rec_lowpass;
    std::vector<double> rec_highpass;

    bool is_identity() const { return dec_lowpass.empty(); }
    int filter_length() const { return static_cast<int>(dec_lowpass.size()); }

    /// Look up a basis by name: haar, db1..db5, or identity.
    static WaveletBasis from_name(const std::string& name);
    static const std::vector<std::string>& known_names();
};

/// Book-keeping for one decomposition: subband dimensions per level, needed
/// to invert the transform. Identical for all images of the same size at the
/// same level count.
struct CoeffLayout {
    int height = 0;
    int width = 0;
    int channels = 0;
    int levels = 0; // 0 for the identity transform

    // band_rows[l], band_cols[l] are the subband dimensions after l+1
    // filtering passes; index levels-1 is the coarsest.
    std::vector<int> band_rows;
    std::vector<int> band_cols;

    /// Coefficients per channel: coarsest approximation + 3 details per level.
    std::int64_t per_channel() const;
    std::int64_t total() const { return per_channel() * channels; }

    /// Offset of a subband in the flat vector. band: 0=A (coarsest only),
    /// 1=H, 2=V, 3=D. level is 1-based, 1 = finest.
    std::int64_t band_offset(int channel, int level, int band) const;

    bool operator==(const CoeffLayout&) const = default;

    static CoeffLayout compute(int height, int width, int channels,
                               const WaveletBasis& basis, int levels);
};

/// Flat coefficient vector plus the layout that decodes it.
struct CoeffVector {
    std::vector<double> values;
    CoeffLayout layout;
};

/// Multi-level separable 2D decomposition with half-point symmetric boundary
/// extension. Each filtering pass maps an axis of length n to
/// floor((n + f - 1)/2) samples, f = filter length. Ordering of the output is
/// channel-major, then coarsest approximation, then (H, V, D) per level from
/// coarsest to finest, row-major within a subband. For the identity basis the
/// output is the flattened image and levels is ignored.
CoeffVector wavedec(const ImageTensor& image, const WaveletBasis& basis, int levels);

/// Exact inverse of wavedec. Pixel values are not clamped.
ImageTensor waverec(const CoeffVector& coeffs, const WaveletBasis& basis);

/// All-zero coefficient vector for a layout.
CoeffVector zero_coeffs(const CoeffLayout& layout);

/// Place values[j] at position perm[j] for j < m; remaining positions are
/// copied from fill (zeros when reconstructing patterns, the original
/// coefficients when reconstructing dataset images).
CoeffVector scatter(const std::vector<double>& values,
                    const std::vector<std::int64_t>& perm, std::int64_t m,
                    const CoeffVector& fill);

} // namespace wsdpa
