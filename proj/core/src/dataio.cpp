// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wsdpa {
namespace {

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off,
                        const std::string& path) {
    if (off + 4 > b.size())
        throw std::runtime_error("truncated file '" + path + "'");
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

// Compact observed label values into contiguous class indices, names taken
// from a callback on the original value.
template <typename NameFn>
void compact_labels(const std::vector<int>& raw, LabeledDataset& ds, NameFn name) {
    std::map<int, int> remap;
    for (int v : raw) remap.emplace(v, 0);
    int next = 0;
    for (auto& [value, index] : remap) index = next++;
    ds.labels.reserve(raw.size());
    for (int v : raw) ds.labels.push_back(remap[v]);
    ds.class_names.resize(remap.size());
    for (const auto& [value, index] : remap) ds.class_names[index] = name(value);
}

ImageTensor box_downscale(const ImageTensor& img, int factor,
                          const std::string& path) {
    if (factor == 1) return img;
    if (img.height % factor != 0 || img.width % factor != 0)
        throw std::runtime_error("downscale factor " + std::to_string(factor) +
                                 " does not divide dimensions of '" + path + "'");
    ImageTensor out(img.height / factor, img.width / factor, img.channels);
    const double inv = 1.0 / (factor * factor);
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        acc += img.at(y * factor + dy, x * factor + dx, c);
                out.at(y, x, c) = acc * inv;
            }
    return out;
}

// PGM/PPM header token: skips whitespace and '#' comment lines.
std::string next_token(const std::vector<unsigned char>& b, std::size_t& off,
                       const std::string& path) {
    while (off < b.size()) {
        if (std::isspace(b[off])) {
            ++off;
        } else if (b[off] == '#') {
            while (off < b.size() && b[off] != '\n') ++off;
        } else {
            break;
        }
    }
    std::string tok;
    while (off < b.size() && !std::isspace(b[off]) && b[off] != '#')
        tok.push_back(static_cast<char>(b[off++]));
    if (tok.empty()) throw std::runtime_error("truncated header in '" + path + "'");
    return tok;
}

ImageTensor load_pnm(const std::string& path) {
    const auto bytes = read_all(path);
    std::size_t off = 0;
    const std::string magic = next_token(bytes, off, path);
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw std::runtime_error("unsupported image format '" + magic + "' in '" +
                                 path + "' (want binary PGM P5 or PPM P6)");

    const int width = std::stoi(next_token(bytes, off, path));
    const int height = std::stoi(next_token(bytes, off, path));
    const int maxval = std::stoi(next_token(bytes, off, path));
    if (width < 1 || height < 1)
        throw std::runtime_error("bad dimensions in '" + path + "'");
    if (maxval != 255)
        throw std::runtime_error("unsupported maxval " + std::to_string(maxval) +
                                 " in '" + path + "' (want 255)");
    ++off; // single whitespace after maxval

    const std::size_t need = static_cast<std::size_t>(width) * height * channels;
    if (off + need > bytes.size())
        throw std::runtime_error("truncated pixel data in '" + path + "'");

    ImageTensor img(height, width, channels);
    if (channels == 1) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                img.at(y, x, 0) = bytes[off++] / 255.0;
    } else {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(y, x, c) = bytes[off++] / 255.0;
    }
    return img;
}

void check_uniform(const LabeledDataset& ds) {
    for (std::size_t i = 1; i < ds.images.size(); ++i)
        if (!ds.images[i].same_shape(ds.images.front()))
            throw std::runtime_error(
                "dataset images disagree on dimensions or channel count "
                "(image " +
                std::to_string(i) + ")");
}

} // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path) {
    const auto img_bytes = read_all(images_path);
    const auto lbl_bytes = read_all(labels_path);

    const std::uint32_t img_magic = read_be32(img_bytes, 0, images_path);
    if (img_magic != 0x00000803u) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", img_magic);
        throw std::runtime_error("bad IDX image magic " + std::string(buf) +
                                 " in '" + images_path + "' (want 0x00000803)");
    }
    const std::uint32_t lbl_magic = read_be32(lbl_bytes, 0, labels_path);
    if (lbl_magic != 0x00000801u) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", lbl_magic);
        throw std::runtime_error("bad IDX label magic " + std::string(buf) +
                                 " in '" + labels_path + "' (want 0x00000801)");
    }

    const std::uint32_t count = read_be32(img_bytes, 4, images_path);
    const std::uint32_t rows = read_be32(img_bytes, 8, images_path);
    const std::uint32_t cols = read_be32(img_bytes, 12, images_path);
    const std::uint32_t lbl_count = read_be32(lbl_bytes, 4, labels_path);
    if (count != lbl_count)
        throw std::runtime_error("IDX image/label count mismatch: " +
                                 std::to_string(count) + " images vs " +
                                 std::to_string(lbl_count) + " labels");

    const std::size_t need = 16 + static_cast<std::size_t>(count) * rows * cols;
    if (img_bytes.size() < need)
        throw std::runtime_error("truncated file '" + images_path + "'");
    if (lbl_bytes.size() < 8 + count)
        throw std::runtime_error("truncated file '" + labels_path + "'");

    LabeledDataset ds;
    std::vector<int> raw_labels;
    raw_labels.reserve(count);
    std::size_t off = 16;
    for (std::uint32_t i = 0; i < count; ++i) {
        ImageTensor img(static_cast<int>(rows), static_cast<int>(cols), 1);
        for (std::size_t p = 0; p < static_cast<std::size_t>(rows) * cols; ++p)
            img.values[p] = img_bytes[off++] / 255.0;
        ds.images.push_back(std::move(img));
        raw_labels.push_back(lbl_bytes[8 + i]);
    }
    compact_labels(raw_labels, ds, [](int v) { return std::to_string(v); });
    check_uniform(ds);
    return ds;
}

LabeledDataset load_cifar_bin(const std::vector<std::string>& paths) {
    static const char* kCifarNames[10] = {
        "airplane", "automobile", "bird", "cat",  "deer",
        "dog",      "frog",       "horse", "ship", "truck"};
    constexpr std::size_t kRecord = 3073;

    if (paths.empty()) throw std::runtime_error("load_cifar_bin: no files given");
    LabeledDataset ds;
    ds.class_names.assign(kCifarNames, kCifarNames + 10);
    for (const auto& path : paths) {
        const auto bytes = read_all(path);
        if (bytes.empty() || bytes.size() % kRecord != 0)
            throw std::runtime_error("'" + path + "' is not a CIFAR-10 binary: size " +
                                     std::to_string(bytes.size()) +
                                     " is not a positive multiple of 3073");
        for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
            const int label = bytes[off];
            if (label > 9)
                throw std::runtime_error("label byte " + std::to_string(label) +
                                         " out of range in '" + path + "'");
            ImageTensor img(32, 32, 3);
            // File stores the R, G, B planes row-major, matching our layout.
            for (std::size_t p = 0; p < 3072; ++p)
                img.values[p] = bytes[off + 1 + p] / 255.0;
            ds.images.push_back(std::move(img));
            ds.labels.push_back(label);
        }
    }
    return ds;
}

LabeledDataset load_image_dir(const std::string& root,
                              const std::string& manifest_path, int downscale) {
    if (downscale < 1)
        throw std::runtime_error("load_image_dir: downscale factor must be >= 1");
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");

    LabeledDataset ds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                     ": expected <path>\\t<class>");
        const std::string rel = line.substr(0, tab);
        const std::string cls = line.substr(tab + 1);
        if (rel.empty() || cls.empty())
            throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                     ": empty path or class name");

        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), cls);
        int label;
        if (it == ds.class_names.end()) {
            label = static_cast<int>(ds.class_names.size());
            ds.class_names.push_back(cls);
        } else {
            label = static_cast<int>(it - ds.class_names.begin());
        }

        const std::string path = root.empty() ? rel : root + "/" + rel;
        ImageTensor img = box_downscale(load_pnm(path), downscale, path);
        if (!ds.images.empty() && !img.same_shape(ds.images.front()))
            throw std::runtime_error(
                "'" + path + "' has different dimensions than the first image; "
                "use a uniform dataset or a downscale factor");
        ds.images.push_back(std::move(img));
        ds.labels.push_back(label);
    }
    if (ds.images.empty())
        throw std::runtime_error("manifest '" + manifest_path + "' lists no images");
    return ds;
}

namespace {

void write_p5(const std::vector<unsigned char>& bytes, int height, int width,
              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace

void write_pgm(const ImageTensor& image, const std::string& path) {
    const double lo = *std::min_element(image.values.begin(), image.values.end());
    const double hi = *std::max_element(image.values.begin(), image.values.end());
    const bool flat = !(hi > lo);
    const double scale = flat ? 0.0 : 255.0 / (hi - lo);

    auto channel_bytes = [&](int c) {
        std::vector<unsigned char> bytes(static_cast<std::size_t>(image.height) *
                                         image.width);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                const double v = image.at(y, x, c);
                bytes[static_cast<std::size_t>(y) * image.width + x] =
                    flat ? 128
                         : static_cast<unsigned char>(
                               std::lround((v - lo) * scale));
            }
        return bytes;
    };

    if (image.channels == 1) {
        write_p5(channel_bytes(0), image.height, image.width, path);
        return;
    }
    static const char* suffix[3] = {"_r", "_g", "_b"};
    const auto dot = path.rfind('.');
    const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    for (int c = 0; c < image.channels && c < 3; ++c)
        write_p5(channel_bytes(c), image.height, image.width,
                 stem + suffix[c] + ext);
}

std::string csv_cell(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string csv_cell(std::int64_t value) { return std::to_string(value); }

namespace {

void write_csv_field(std::ostream& out, const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        out << cell;
        return;
    }
    out << '"';
    for (char ch : cell) {
        if (ch == '"') out << '"';
        out << ch;
    }
    out << '"';
}

} // namespace

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        write_csv_field(out, table.header[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            write_csv_field(out, row[i]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace wsdpa
