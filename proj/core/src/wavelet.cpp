// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/wavelet.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace wsdpa {
namespace {

// Daubechies scaling filters (sum sqrt(2), unit 2-norm). db1 == haar.
const std::vector<double>& scaling_filter(const std::string& name) {
    static const std::vector<double> haar = {
        0.7071067811865475244, 0.7071067811865475244};
    static const std::vector<double> db2 = {
        0.48296291314453414337, 0.83651630373780790558,
        0.22414386804201338103, -0.12940952255126038117};
    static const std::vector<double> db3 = {
        0.33267055295008261600, 0.80689150931109257649, 0.45987750211849157010,
        -0.13501102001025458870, -0.08544127388202666169, 0.03522629188570953660};
    static const std::vector<double> db4 = {
        0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
        -0.02798376941685985421, -0.18703481171909308408, 0.03084138183556076363,
        0.03288301166688519974, -0.01059740178506903210};
    static const std::vector<double> db5 = {
        0.16010239797419291448, 0.60382926979718967054, 0.72430852843777292773,
        0.13842814590132073151, -0.24229488706638203186, -0.03224486958463837465,
        0.07757149384004571352, -0.00624149021279827427, -0.01258075199908199947,
        0.00333572528547377128};

    if (name == "haar" || name == "db1") return haar;
    if (name == "db2") return db2;
    if (name == "db3") return db3;
    if (name == "db4") return db4;
    if (name == "db5") return db5;
    throw std::invalid_argument("unknown wavelet basis '" + name +
                                "' (known: haar, db1, db2, db3, db4, db5, identity)");
}

// Half-point symmetric index fold: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} ...
inline int sym_index(long s, int n) {
    const long period = 2L * n;
    long p = s % period;
    if (p < 0) p += period;
    if (p >= n) p = period - 1 - p;
    return static_cast<int>(p);
}

inline int half_length(int n, int f) { return (n + f - 1) / 2; }

// One analysis pass along a contiguous axis: out[i] = sum_j ext[2i+1-j]*g[j].
// x is addressed as x[k*stride], k = 0..n-1; same for the outputs.
void analyze_axis(const double* x, int n, long stride,
                  const std::vector<double>& dec_lo,
                  const std::vector<double>& dec_hi,
                  double* lo, double* hi, long out_stride) {
    const int f = static_cast<int>(dec_lo.size());
    const int out_n = half_length(n, f);
    for (int i = 0; i < out_n; ++i) {
        double acc_lo = 0.0, acc_hi = 0.0;
        const long base = 2L * i + 1;
        for (int j = 0; j < f; ++j) {
            const double v = x[sym_index(base - j, n) * stride];
            acc_lo += v * dec_lo[j];
            acc_hi += v * dec_hi[j];
        }
        lo[i * out_stride] = acc_lo;
        hi[i * out_stride] = acc_hi;
    }
}

// One synthesis pass: x[t] = sum_i lo[i]*rec_lo[t+f-2-2i] + hi[i]*rec_hi[...],
// keeping the central n samples. Exact inverse of analyze_axis.
void synthesize_axis(const double* lo, const double* hi, int coeff_n,
                     long in_stride, const std::vector<double>& rec_lo,
                     const std::vector<double>& rec_hi, double* x, int n,
                     long out_stride) {
    const int f = static_cast<int>(rec_lo.size());
    for (int t = 0; t < n; ++t) {
        const int i_lo = std::max(0, t / 2);
        const int i_hi = std::min(coeff_n - 1, (t + f - 2) / 2);
        double acc = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            const int j = t + f - 2 - 2 * i;
            acc += lo[i * in_stride] * rec_lo[j] + hi[i * in_stride] * rec_hi[j];
        }
        x[t * out_stride] = acc;
    }
}

struct Plane {
    int rows = 0, cols = 0;
    std::vector<double> v; // row-major
    Plane() = default;
    Plane(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c) {}
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
};

// Separable 2D analysis: width axis first, then height.
void analyze_2d(const Plane& in, const WaveletBasis& b, Plane& a, Plane& h,
                Plane& v, Plane& d) {
    const int f = b.filter_length();
    const int oc = half_length(in.cols, f);
    const int orr = half_length(in.rows, f);

    Plane xlo(in.rows, oc), xhi(in.rows, oc);
    for (int r = 0; r < in.rows; ++r)
        analyze_axis(in.row(r), in.cols, 1, b.dec_lowpass, b.dec_highpass,
                     xlo.row(r), xhi.row(r), 1);

    a = Plane(orr, oc);
    h = Plane(orr, oc);
    v = Plane(orr, oc);
    d = Plane(orr, oc);
    for (int c = 0; c < oc; ++c) {
        analyze_axis(xlo.v.data() + c, in.rows, oc, b.dec_lowpass, b.dec_highpass,
                     a.v.data() + c, h.v.data() + c, oc);
        analyze_axis(xhi.v.data() + c, in.rows, oc, b.dec_lowpass, b.dec_highpass,
                     v.v.data() + c, d.v.data() + c, oc);
    }
}

Plane synthesize_2d(const Plane& a, const Plane& h, const Plane& v,
                    const Plane& d, const WaveletBasis& b, int out_rows,
                    int out_cols) {
    const int bc = a.cols;
    Plane xlo(out_rows, bc), xhi(out_rows, bc);
    for (int c = 0; c < bc; ++c) {
        synthesize_axis(a.v.data() + c, h.v.data() + c, a.rows, bc,
                        b.rec_lowpass, b.rec_highpass, xlo.v.data() + c,
                        out_rows, bc);
        synthesize_axis(v.v.data() + c, d.v.data() + c, v.rows, bc,
                        b.rec_lowpass, b.rec_highpass, xhi.v.data() + c,
                        out_rows, bc);
    }
    Plane out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r)
        synthesize_axis(xlo.row(r), xhi.row(r), bc, 1, b.rec_lowpass,
                        b.rec_highpass, out.row(r), out_cols, 1);
    return out;
}

void copy_into(const Plane& p, std::vector<double>& flat, std::int64_t offset) {
    std::copy(p.v.begin(), p.v.end(), flat.begin() + offset);
}

Plane copy_from(const std::vector<double>& flat, std::int64_t offset, int rows,
                int cols) {
    Plane p(rows, cols);
    std::copy(flat.begin() + offset,
              flat.begin() + offset + static_cast<std::int64_t>(rows) * cols,
              p.v.begin());
    return p;
}

} // namespace

WaveletBasis WaveletBasis::from_name(const std::string& name) {
    WaveletBasis b;
    b.name = name;
    if (name == "identity") return b;

    const auto& h = scaling_filter(name); // validates the name
    const int f = static_cast<int>(h.size());
    b.rec_lowpass = h;
    b.dec_lowpass.assign(h.rbegin(), h.rend());
    b.dec_highpass.resize(f);
    for (int k = 0; k < f; ++k)
        b.dec_highpass[k] = (k % 2 == 0 ? h[k] : -h[k]);
    b.rec_highpass.assign(b.dec_highpass.rbegin(), b.dec_highpass.rend());
    return b;
}

const std::vector<std::string>& WaveletBasis::known_names() {
    static const std::vector<std::string> names = {
        "haar", "db1", "db2", "db3", "db4", "db5", "identity"};
    return names;
}

std::int64_t CoeffLayout::per_channel() const {
    if (levels == 0) return static_cast<std::int64_t>(height) * width;
    std::int64_t n = static_cast<std::int64_t>(band_rows[levels - 1]) *
                     band_cols[levels - 1]; // coarsest approximation
    for (int l = 0; l < levels; ++l)
        n += 3LL * band_rows[l] * band_cols[l];
    return n;
}

std::int64_t CoeffLayout::band_offset(int channel, int level, int band) const {
    std::int64_t off = static_cast<std::int64_t>(channel) * per_channel();
    const std::int64_t a_size =
        static_cast<std::int64_t>(band_rows[levels - 1]) * band_cols[levels - 1];
    if (band == 0) return off; // approximation lives at the front
    off += a_size;
    for (int lv = levels; lv > level; --lv)
        off += 3LL * band_rows[lv - 1] * band_cols[lv - 1];
    off += static_cast<std::int64_t>(band - 1) * band_rows[level - 1] *
           band_cols[level - 1];
    return off;
}

CoeffLayout CoeffLayout::compute(int height, int width, int channels,
                                 const WaveletBasis& basis, int levels) {
    CoeffLayout lay;
    lay.height = height;
    lay.width = width;
    lay.channels = channels;
    if (basis.is_identity()) {
        lay.levels = 0;
        return lay;
    }
    if (levels < 1) throw std::invalid_argument("wavedec: level count must be >= 1");
    lay.levels = levels;
    const int f = basis.filter_length();
    int r = height, c = width;
    for (int l = 1; l <= levels; ++l) {
        if (r < 2 || c < 2)
            throw std::invalid_argument(
                "wavedec: image dimension too small for filter length " +
                std::to_string(f) + " at level " + std::to_string(l));
        r = half_length(r, f);
        c = half_length(c, f);
        lay.band_rows.push_back(r);
        lay.band_cols.push_back(c);
    }
    return lay;
}

CoeffVector wavedec(const ImageTensor& image, const WaveletBasis& basis,
                    int levels) {
    if (image.height < 1 || image.width < 1 || image.channels < 1 ||
        image.values.size() != image.size())
        throw std::invalid_argument("wavedec: malformed image tensor");

    CoeffVector out;
    out.layout = CoeffLayout::compute(image.height, image.width, image.channels,
                                      basis, levels);
    if (basis.is_identity()) {
        out.values = image.values;
        return out;
    }

    out.values.assign(static_cast<std::size_t>(out.layout.total()), 0.0);
    const std::int64_t plane_size =
        static_cast<std::int64_t>(image.height) * image.width;
    for (int ch = 0; ch < image.channels; ++ch) {
        Plane cur(image.height, image.width);
        std::copy(image.values.begin() + ch * plane_size,
                  image.values.begin() + (ch + 1) * plane_size, cur.v.begin());
        for (int l = 1; l <= levels; ++l) {
            Plane a, h, v, d;
            analyze_2d(cur, basis, a, h, v, d);
            copy_into(h, out.values, out.layout.band_offset(ch, l, 1));
            copy_into(v, out.values, out.layout.band_offset(ch, l, 2));
            copy_into(d, out.values, out.layout.band_offset(ch, l, 3));
            cur = std::move(a);
        }
        copy_into(cur, out.values, out.layout.band_offset(ch, levels, 0));
    }
    return out;
}

ImageTensor waverec(const CoeffVector& coeffs, const WaveletBasis& basis) {
    const CoeffLayout& lay = coeffs.layout;
    if (coeffs.values.size() != static_cast<std::size_t>(lay.total()))
        throw std::invalid_argument("waverec: coefficient length does not match layout");
    if (basis.is_identity() != (lay.levels == 0))
        throw std::invalid_argument("waverec: layout/basis mismatch");

    ImageTensor img(lay.height, lay.width, lay.channels);
    if (basis.is_identity()) {
        img.values = coeffs.values;
        return img;
    }

    const std::int64_t plane_size =
        static_cast<std::int64_t>(lay.height) * lay.width;
    for (int ch = 0; ch < lay.channels; ++ch) {
        Plane cur = copy_from(coeffs.values, lay.band_offset(ch, lay.levels, 0),
                              lay.band_rows[lay.levels - 1],
                              lay.band_cols[lay.levels - 1]);
        for (int l = lay.levels; l >= 1; --l) {
            const int br = lay.band_rows[l - 1], bc = lay.band_cols[l - 1];
            Plane h = copy_from(coeffs.values, lay.band_offset(ch, l, 1), br, bc);
            Plane v = copy_from(coeffs.values, lay.band_offset(ch, l, 2), br, bc);
            Plane d = copy_from(coeffs.values, lay.band_offset(ch, l, 3), br, bc);
            const int tr = (l >= 2) ? lay.band_rows[l - 2] : lay.height;
            const int tc = (l >= 2) ? lay.band_cols[l - 2] : lay.width;
            cur = synthesize_2d(cur, h, v, d, basis, tr, tc);
        }
        std::copy(cur.v.begin(), cur.v.end(),
                  img.values.begin() + ch * plane_size);
    }
    return img;
}

CoeffVector zero_coeffs(const CoeffLayout& layout) {
    CoeffVector c;
    c.layout = layout;
    c.values.assign(static_cast<std::size_t>(layout.total()), 0.0);
    return c;
}

CoeffVector scatter(const std::vector<double>& values,
                    const std::vector<std::int64_t>& perm, std::int64_t m,
                    const CoeffVector& fill) {
    if (static_cast<std::int64_t>(values.size()) != m)
        throw std::invalid_argument("scatter: values length does not equal m");
    const std::int64_t full = fill.layout.total();
    if (fill.values.size() != static_cast<std::size_t>(full))
        throw std::invalid_argument("scatter: fill length does not match layout");
    if (m > static_cast<std::int64_t>(perm.size()))
        throw std::invalid_argument("scatter: m exceeds permutation length");

    CoeffVector out = fill;
    for (std::int64_t j = 0; j < m; ++j) {
        const std::int64_t p = perm[static_cast<std::size_t>(j)];
        if (p < 0 || p >= full)
            throw std::invalid_argument("scatter: permutation entry out of range");
        out.values[static_cast<std::size_t>(p)] = values[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace wsdpa
