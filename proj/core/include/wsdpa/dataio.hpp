// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsdpa/image.hpp"

namespace wsdpa {

/// Labeled images of identical dimensions. Every label indexes class_names
/// and every class has at least one image.
struct LabeledDataset {
    std::vector<ImageTensor> images;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t size() const { return images.size(); }
    int class_count() const { return static_cast<int>(class_names.size()); }
};

/// IDX ingestion (big-endian): image magic 0x00000803 then count/rows/cols
/// and unsigned bytes row-major; label magic 0x00000801 then count and bytes.
/// Pixels are mapped to [0,1] by /255. Class indices are the observed label
/// values compacted in ascending order.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path);

/// CIFAR-10 binary records: 1 label byte + 3072 pixel bytes (1024 R, 1024 G,
/// 1024 B, each 32x32 row-major). Files concatenate in the given order.
LabeledDataset load_cifar_bin(const std::vector<std::string>& paths);

/// Manifest-driven directory of PGM (P5) / PPM (P6) images, maxval 255.
/// Manifest lines are "<relative path>\t<class name>"; ordering follows the
/// manifest and class indices follow first appearance. downscale > 1 reduces
/// every image by an integer box filter before dimension checks.
LabeledDataset load_image_dir(const std::string& root,
                              const std::string& manifest_path,
                              int downscale = 1);

/// Min-max normalize to 0..255 (constant image becomes mid-gray 128) and
/// write binary P5; a 3-channel image produces _r/_g/_b suffixed files.
void write_pgm(const ImageTensor& image, const std::string& path);

/// RFC-4180-style CSV: header row, '.' decimal separator, 17 significant
/// digits for doubles.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(double value);
std::string csv_cell(std::int64_t value);
void write_csv(const CsvTable& table, const std::string& path);

/// Serialize pre-rendered JSON text (the report builder keys it stably).
void write_text_file(const std::string& text, const std::string& path);

} // namespace wsdpa
