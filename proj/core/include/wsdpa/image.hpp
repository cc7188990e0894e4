// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsdpa {

/// One image as a height x width x channels grid of real pixel values,
/// nominal range [0,1]. Storage is channel-major: plane c is a row-major
/// height x width block starting at c*height*width.
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * w * c, fill) {
        if (h < 1 || w < 1 || c < 1)
            throw std::invalid_argument("ImageTensor: dimensions must be positive");
    }

    std::size_t size() const { return values.size(); }

    double& at(int y, int x, int c) {
        return values[static_cast<std::size_t>(c) * height * width +
                      static_cast<std::size_t>(y) * width + x];
    }
    double at(int y, int x, int c) const {
        return values[static_cast<std::size_t>(c) * height * width +
                      static_cast<std::size_t>(y) * width + x];
    }

    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

} // namespace wsdpa
