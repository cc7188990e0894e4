// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/factors_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "the WSDPA1 container is little-endian");

namespace wsdpa {
namespace {

constexpr char kMagic[6] = {'W', 'S', 'D', 'P', 'A', '1'};

void put(std::ostream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void put_i64(std::ostream& out, std::int64_t v) { put(out, &v, 8); }
void put_f64(std::ostream& out, double v) { put(out, &v, 8); }

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

void put_string(std::ostream& out, const std::string& s) {
    put_i64(out, static_cast<std::int64_t>(s.size()));
    put(out, s.data(), s.size());
}

struct Reader {
    std::ifstream in;
    std::string path;

    void get(void* data, std::size_t bytes) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
        if (!in) throw std::runtime_error("truncated run container '" + path + "'");
    }
    std::int64_t get_i64() {
        std::int64_t v;
        get(&v, 8);
        return v;
    }
    double get_f64() {
        double v;
        get(&v, 8);
        return v;
    }
    Eigen::MatrixXd get_matrix(std::int64_t rows, std::int64_t cols) {
        Eigen::MatrixXd m(rows, cols);
        get(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
        return m;
    }
    Eigen::VectorXd get_vector(std::int64_t n) {
        Eigen::VectorXd v(n);
        get(v.data(), sizeof(double) * static_cast<std::size_t>(n));
        return v;
    }
    std::string get_string() {
        const std::int64_t n = get_i64();
        if (n < 0 || n > (1 << 20))
            throw std::runtime_error("corrupt string length in '" + path + "'");
        std::string s(static_cast<std::size_t>(n), '\0');
        get(s.data(), s.size());
        return s;
    }
};

} // namespace

void save_run(const StoredRun& run, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");

    const std::int64_t c = run.factors.class_count();
    const std::int64_t m = run.factors.pattern_count();
    const std::int64_t m_full = static_cast<std::int64_t>(run.tensor.perm.perm.size());

    put(out, kMagic, sizeof kMagic);
    put_i64(out, c);
    put_i64(out, m);
    put_i64(out, m_full);
    for (std::int64_t i = 0; i < c; ++i) put_i64(out, run.factors.rows(static_cast<int>(i)));

    put_matrix(out, run.factors.V);
    for (const auto& u : run.factors.U) put_matrix(out, u);
    for (const auto& s : run.factors.sigma)
        put(out, s.data(), sizeof(double) * static_cast<std::size_t>(s.size()));
    put(out, run.tensor.perm.perm.data(), 8 * run.tensor.perm.perm.size());

    put_i64(out, static_cast<std::int64_t>(run.tensor.perm.rdiag.size()));
    put(out, run.tensor.perm.rdiag.data(), 8 * run.tensor.perm.rdiag.size());
    put(out, run.factors.eigvals.data(),
        sizeof(double) * static_cast<std::size_t>(run.factors.eigvals.size()));
    put_f64(out, run.factors.v_orthogonality);

    put_f64(out, run.tensor.scaling.alpha);
    for (const auto& rs : run.tensor.scaling.row_sums)
        put(out, rs.data(), sizeof(double) * static_cast<std::size_t>(rs.size()));

    const CoeffLayout& lay = run.tensor.layout;
    put_i64(out, lay.height);
    put_i64(out, lay.width);
    put_i64(out, lay.channels);
    put_i64(out, lay.levels);
    for (int l = 0; l < lay.levels; ++l) {
        put_i64(out, lay.band_rows[static_cast<std::size_t>(l)]);
        put_i64(out, lay.band_cols[static_cast<std::size_t>(l)]);
    }
    put_string(out, run.basis_name);
    for (const auto& name : run.factors.class_names) put_string(out, name);
    for (const auto& raw : run.raw_stacks) put_matrix(out, raw);

    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

StoredRun load_run(const std::string& path) {
    Reader r;
    r.path = path;
    r.in.open(path, std::ios::binary);
    if (!r.in) throw std::runtime_error("cannot open run container '" + path + "'");

    char magic[6];
    r.get(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0)
        throw std::runtime_error("'" + path + "' is not a WSDPA1 run container");

    const std::int64_t c = r.get_i64();
    const std::int64_t m = r.get_i64();
    const std::int64_t m_full = r.get_i64();
    if (c < 2 || m < 1 || m_full < m)
        throw std::runtime_error("corrupt dimensions in '" + path + "'");

    std::vector<std::int64_t> n(static_cast<std::size_t>(c));
    for (auto& v : n) v = r.get_i64();

    StoredRun run;
    run.factors.V = r.get_matrix(m, m);
    for (std::int64_t i = 0; i < c; ++i)
        run.factors.U.push_back(r.get_matrix(n[static_cast<std::size_t>(i)], m));
    for (std::int64_t i = 0; i < c; ++i)
        run.factors.sigma.push_back(r.get_vector(m));

    run.tensor.perm.perm.resize(static_cast<std::size_t>(m_full));
    r.get(run.tensor.perm.perm.data(), 8 * run.tensor.perm.perm.size());
    const std::int64_t rdiag_len = r.get_i64();
    run.tensor.perm.rdiag.resize(static_cast<std::size_t>(rdiag_len));
    r.get(run.tensor.perm.rdiag.data(), 8 * run.tensor.perm.rdiag.size());

    run.factors.eigvals = r.get_vector(m);
    run.factors.v_orthogonality = r.get_f64();

    run.tensor.scaling.alpha = r.get_f64();
    for (std::int64_t i = 0; i < c; ++i)
        run.tensor.scaling.row_sums.push_back(
            r.get_vector(n[static_cast<std::size_t>(i)]));

    CoeffLayout lay;
    lay.height = static_cast<int>(r.get_i64());
    lay.width = static_cast<int>(r.get_i64());
    lay.channels = static_cast<int>(r.get_i64());
    lay.levels = static_cast<int>(r.get_i64());
    for (int l = 0; l < lay.levels; ++l) {
        lay.band_rows.push_back(static_cast<int>(r.get_i64()));
        lay.band_cols.push_back(static_cast<int>(r.get_i64()));
    }
    run.tensor.layout = lay;
    run.tensor.m = m;

    run.basis_name = r.get_string();
    for (std::int64_t i = 0; i < c; ++i) {
        run.factors.class_names.push_back(r.get_string());
    }
    run.tensor.class_names = run.factors.class_names;
    for (std::int64_t i = 0; i < c; ++i)
        run.raw_stacks.push_back(r.get_matrix(n[static_cast<std::size_t>(i)], m_full));

    return run;
}

} // namespace wsdpa
