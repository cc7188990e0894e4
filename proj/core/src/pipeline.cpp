// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include "wsdpa/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace fs = std::filesystem;

namespace wsdpa {
namespace {

std::string sanitize(const std::string& name) {
    std::string out;
    for (char ch : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
    return out;
}

int find_class(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw std::invalid_argument("unknown class '" + name + "'");
    return static_cast<int>(it - names.begin());
}

std::string join(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

} // namespace

LabeledDataset load_dataset(const RunConfig& cfg) {
    if (cfg.format == "idx") {
        if (cfg.dataset_paths.size() != 2)
            throw std::invalid_argument(
                "idx format needs exactly two paths: images file, labels file");
        return load_idx(cfg.dataset_paths[0], cfg.dataset_paths[1]);
    }
    if (cfg.format == "cifar") {
        if (cfg.dataset_paths.empty())
            throw std::invalid_argument("cifar format needs at least one batch file");
        return load_cifar_bin(cfg.dataset_paths);
    }
    if (cfg.format == "dir") {
        if (cfg.dataset_paths.empty() || cfg.dataset_paths.size() > 2)
            throw std::invalid_argument(
                "dir format needs a root directory and optionally a manifest path");
        const std::string root = cfg.dataset_paths[0];
        const std::string manifest = cfg.dataset_paths.size() == 2
                                         ? cfg.dataset_paths[1]
                                         : join(root, "manifest.tsv");
        return load_image_dir(root, manifest, cfg.downscale);
    }
    throw std::invalid_argument("unknown dataset format '" + cfg.format +
                                "' (want idx, cifar, or dir)");
}

LabeledDataset filter_classes(const LabeledDataset& dataset,
                              const std::vector<std::string>& keep) {
    if (keep.empty()) return dataset;
    std::vector<int> remap(dataset.class_names.size(), -1);
    LabeledDataset out;
    for (const auto& name : keep) {
        const int idx = find_class(dataset.class_names, name);
        if (remap[static_cast<std::size_t>(idx)] != -1)
            throw std::invalid_argument("class '" + name + "' listed twice");
        remap[static_cast<std::size_t>(idx)] =
            static_cast<int>(out.class_names.size());
        out.class_names.push_back(name);
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const int to = remap[static_cast<std::size_t>(dataset.labels[i])];
        if (to < 0) continue;
        out.images.push_back(dataset.images[i]);
        out.labels.push_back(to);
    }
    std::vector<std::int64_t> counts(out.class_names.size(), 0);
    for (int label : out.labels) ++counts[static_cast<std::size_t>(label)];
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] == 0)
            throw std::runtime_error("class '" + out.class_names[i] +
                                     "' has no images");
    return out;
}

namespace {

// Classes that arrive empty (a CIFAR subset, say) are dropped up front;
// labels are then uniform over the classes that actually have images.
LabeledDataset drop_empty_classes(const LabeledDataset& dataset,
                                  std::vector<std::string>& warnings) {
    std::vector<std::int64_t> counts(dataset.class_names.size(), 0);
    for (int label : dataset.labels) ++counts[static_cast<std::size_t>(label)];
    bool any_empty = false;
    for (std::int64_t c : counts) any_empty |= (c == 0);
    if (!any_empty) return dataset;

    LabeledDataset out;
    std::vector<int> remap(dataset.class_names.size(), -1);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) {
            warnings.push_back("dropped empty class '" + dataset.class_names[i] +
                               "'");
            continue;
        }
        remap[i] = static_cast<int>(out.class_names.size());
        out.class_names.push_back(dataset.class_names[i]);
    }
    out.images = dataset.images;
    out.labels.reserve(dataset.labels.size());
    for (int label : dataset.labels)
        out.labels.push_back(remap[static_cast<std::size_t>(label)]);
    return out;
}

} // namespace

std::vector<CoeffVector> decompose_all(const LabeledDataset& dataset,
                                       const WaveletBasis& basis, int levels) {
    std::vector<CoeffVector> coeffs(dataset.size());
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(dataset.size()));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < dataset.size(); i += workers)
                    coeffs[i] = wavedec(dataset.images[i], basis, levels);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return coeffs;
}

AnalysisRun analyze_dataset(const LabeledDataset& input, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    AnalysisRun run;
    run.config = cfg;
    if (cfg.method != "hogsvd")
        throw std::invalid_argument("unsupported decomposition method '" +
                                    cfg.method + "' (only hogsvd)");
    run.basis = WaveletBasis::from_name(cfg.pixel_mode ? "identity" : cfg.basis);

    std::vector<std::string> warnings;
    LabeledDataset dataset =
        drop_empty_classes(filter_classes(input, cfg.class_filter), warnings);
    if (dataset.class_count() < 2)
        throw std::invalid_argument("analysis needs at least 2 classes");
    if (cfg.shuffle_fraction > 0.0)
        dataset = randomize_labels(dataset, cfg.shuffle_fraction, cfg.seed);

    const std::vector<CoeffVector> coeffs =
        decompose_all(dataset, run.basis, cfg.levels);
    run.layout = coeffs.front().layout;
    const std::int64_t m_full = run.layout.total();

    // Group coefficient rows per class, dataset order within a class.
    const int c = dataset.class_count();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(c), 0);
    for (int label : dataset.labels) ++counts[static_cast<std::size_t>(label)];
    for (int i = 0; i < c; ++i)
        if (counts[static_cast<std::size_t>(i)] == 0)
            throw std::runtime_error("class '" + dataset.class_names[i] +
                                     "' has no images (after shuffling/filtering)");

    run.raw_stacks.assign(static_cast<std::size_t>(c), Eigen::MatrixXd());
    for (int i = 0; i < c; ++i)
        run.raw_stacks[static_cast<std::size_t>(i)].resize(
            counts[static_cast<std::size_t>(i)], m_full);
    std::vector<std::int64_t> cursor(static_cast<std::size_t>(c), 0);
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        const auto i = static_cast<std::size_t>(dataset.labels[j]);
        run.raw_stacks[i].row(cursor[i]++) =
            Eigen::Map<const Eigen::VectorXd>(coeffs[j].values.data(), m_full);
    }

    ScalingRecord scaling;
    const std::vector<Eigen::MatrixXd> scaled = scale_rows(run.raw_stacks, scaling);

    std::int64_t total = 0;
    for (const auto& s : scaled) total += s.rows();
    Eigen::MatrixXd stacked(total, m_full);
    std::int64_t at = 0;
    for (const auto& s : scaled) {
        stacked.middleRows(at, s.rows()) = s;
        at += s.rows();
    }
    const PivotOrder order = rrqr_order(stacked);

    SelectionConfig sel;
    sel.tau = cfg.tau;
    sel.m_override = cfg.m_override;
    run.tensor = select_coefficients(scaled, dataset.class_names, order, sel,
                                     run.layout, scaling);
    run.tensor.warnings.insert(run.tensor.warnings.begin(), warnings.begin(),
                               warnings.end());
    run.factors = hogsvd(run.tensor);

    run.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

void write_json_report(const AnalysisRun& run, const std::string& path) {
    using nlohmann::json;
    json report;
    report["format_version"] = 1;
    report["basis"] = run.basis.name;
    report["levels"] = run.layout.levels;
    report["tau"] = run.config.tau;
    report["m"] = run.tensor.m;
    report["m_full"] = run.layout.total();
    report["class_count"] = run.tensor.class_count();
    report["class_names"] = run.tensor.class_names;
    json n_i = json::array();
    for (const auto& u : run.factors.U) n_i.push_back(u.rows());
    report["n_i"] = n_i;
    report["alpha"] = run.tensor.scaling.alpha;
    report["runtime_seconds"] = run.runtime_seconds;
    report["pixel_mode"] = run.config.pixel_mode;
    report["shuffle"] = {{"fraction", run.config.shuffle_fraction},
                         {"seed", run.config.seed}};
    report["dataset"] = {{"format", run.config.format},
                         {"paths", run.config.dataset_paths},
                         {"downscale", run.config.downscale}};
    report["warnings"] = run.tensor.warnings;
    report["v_orthogonality"] = run.factors.v_orthogonality;

    const AssociationTable table = association_table(run.factors);
    json dominant = json::object();
    double overall = 0.0;
    json per_class_max = json::object();
    json dominant_counts = json::object();
    for (int i = 0; i < table.class_count(); ++i) {
        json list = json::array();
        const auto top = dominant_patterns_top(
            table, i, std::min<std::int64_t>(10, table.pattern_count()));
        for (std::int64_t k : top)
            list.push_back({{"pattern", k},
                            {"ratio", table.ratio(i, k)},
                            {"sigma", table.sigma(i, k)}});
        dominant[table.class_names[static_cast<std::size_t>(i)]] = list;
        dominant_counts[table.class_names[static_cast<std::size_t>(i)]] =
            dominant_patterns_threshold(table, i, kDefaultDominanceThreshold)
                .size();
        const double mx = table.ratio.row(i).maxCoeff();
        per_class_max[table.class_names[static_cast<std::size_t>(i)]] = mx;
        overall = std::max(overall, mx);
    }
    report["dominant_patterns"] = dominant;
    report["summary"] = {{"max_dominance_ratio", overall},
                         {"per_class_max_ratio", per_class_max},
                         {"dominance_threshold", kDefaultDominanceThreshold},
                         {"dominant_pattern_counts", dominant_counts}};

    write_text_file(report.dump(2) + "\n", path);
}

std::vector<std::string> write_run_artifacts(const AnalysisRun& run,
                                             const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    const AssociationTable table = association_table(run.factors);
    const int c = table.class_count();
    const std::int64_t m = table.pattern_count();

    CsvTable singulars;
    singulars.header = run.tensor.class_names;
    for (std::int64_t k = 0; k < m; ++k) {
        std::vector<std::string> row;
        for (int i = 0; i < c; ++i) row.push_back(csv_cell(table.sigma(i, k)));
        singulars.rows.push_back(std::move(row));
    }
    written.push_back(join(out_dir, "singular_values.csv"));
    write_csv(singulars, written.back());

    CsvTable ratios;
    ratios.header = run.tensor.class_names;
    for (std::int64_t k = 0; k < m; ++k) {
        std::vector<std::string> row;
        for (int i = 0; i < c; ++i) row.push_back(csv_cell(table.ratio(i, k)));
        ratios.rows.push_back(std::move(row));
    }
    written.push_back(join(out_dir, "association.csv"));
    write_csv(ratios, written.back());

    for (int a = 0; a < c; ++a) {
        for (int b = a + 1; b < c; ++b) {
            const Eigen::VectorXd theta = angular_distance(run.factors, a, b);
            CsvTable t;
            t.header = {"angular_distance"};
            for (std::int64_t k = 0; k < m; ++k)
                t.rows.push_back({csv_cell(theta(k))});
            written.push_back(join(out_dir,
                                   "angular_" + sanitize(run.tensor.class_names[a]) +
                                       "_" + sanitize(run.tensor.class_names[b]) +
                                       ".csv"));
            write_csv(t, written.back());
        }
    }

    written.push_back(join(out_dir, "report.json"));
    write_json_report(run, written.back());

    StoredRun stored;
    stored.factors = run.factors;
    stored.tensor = run.tensor;
    stored.raw_stacks = run.raw_stacks;
    stored.basis_name = run.basis.name;
    written.push_back(join(out_dir, "factors.bin"));
    save_run(stored, written.back());
    return written;
}

AnalysisRun cmd_analyze(const RunConfig& cfg) {
    AnalysisRun run = analyze_dataset(load_dataset(cfg), cfg);
    write_run_artifacts(run, cfg.out_dir);
    return run;
}

std::vector<std::string> cmd_patterns(const std::string& run_dir,
                                      const std::string& class_name,
                                      std::int64_t count) {
    if (count < 0) throw std::invalid_argument("pattern count must be >= 0");
    const StoredRun run = load_run(join(run_dir, "factors.bin"));
    const int cls = find_class(run.factors.class_names, class_name);
    const WaveletBasis basis = WaveletBasis::from_name(run.basis_name);

    const AssociationTable table = association_table(run.factors);
    const auto top = dominant_patterns_top(
        table, cls, std::min<std::int64_t>(count, table.pattern_count()));

    std::vector<std::string> written;
    for (std::size_t rank = 0; rank < top.size(); ++rank) {
        const PatternImage p =
            pattern_image(run.factors, run.tensor, basis, top[rank]);
        const std::string file =
            join(run_dir, "pattern_" + sanitize(class_name) + "_" +
                              std::to_string(rank) + "_k" +
                              std::to_string(p.k) + ".pgm");
        write_pgm(p.image, file);
        written.push_back(file);
    }
    return written;
}

std::vector<std::string> cmd_reconstruct(const std::string& run_dir,
                                         const std::string& class_name,
                                         std::int64_t row,
                                         std::vector<std::int64_t> checkpoints) {
    const StoredRun run = load_run(join(run_dir, "factors.bin"));
    const int cls = find_class(run.factors.class_names, class_name);
    const WaveletBasis basis = WaveletBasis::from_name(run.basis_name);
    if (row < 0 || row >= run.factors.rows(cls))
        throw std::invalid_argument("row " + std::to_string(row) +
                                    " out of range for class '" + class_name + "'");
    if (checkpoints.empty())
        checkpoints = default_checkpoints(run.factors.pattern_count());
    std::int64_t prev = -1;
    for (std::int64_t k : checkpoints) {
        if (k <= prev)
            throw std::invalid_argument("checkpoints must be strictly increasing");
        if (k < 0 || k > run.factors.pattern_count())
            throw std::invalid_argument("checkpoint " + std::to_string(k) +
                                        " out of range [0, m]");
        prev = k;
    }

    std::vector<std::string> written;
    CsvTable residuals;
    residuals.header = {"k", "residual"};
    for (std::int64_t k : checkpoints) {
        const LowrankResult r = lowrank_image(
            run.factors, run.tensor, run.raw_stacks[static_cast<std::size_t>(cls)],
            basis, cls, row, k);
        const std::string file =
            join(run_dir, "recon_" + sanitize(class_name) + "_row" +
                              std::to_string(row) + "_k" + std::to_string(k) +
                              ".pgm");
        write_pgm(r.image, file);
        written.push_back(file);
        residuals.rows.push_back({csv_cell(k), csv_cell(r.residual)});
    }
    const std::string csv = join(run_dir, "residual.csv");
    write_csv(residuals, csv);
    written.push_back(csv);
    return written;
}

std::vector<std::string> cmd_similarity(const std::string& run_dir,
                                        const std::string& class_name,
                                        std::optional<double> bandwidth) {
    const StoredRun run = load_run(join(run_dir, "factors.bin"));
    const int cls = find_class(run.factors.class_names, class_name);
    const double bw = bandwidth ? *bandwidth : default_bandwidth(run.factors, cls);
    const SimilarityMatrix sm = similarity_matrix(run.factors, cls, bw);

    const Eigen::Index n = sm.w.rows();
    CsvTable wtab;
    for (Eigen::Index j = 0; j < n; ++j)
        wtab.header.push_back("img_" + std::to_string(j));
    for (Eigen::Index a = 0; a < n; ++a) {
        std::vector<std::string> row;
        for (Eigen::Index b = 0; b < n; ++b) row.push_back(csv_cell(sm.w(a, b)));
        wtab.rows.push_back(std::move(row));
    }
    std::vector<std::string> written;
    written.push_back(join(run_dir, "similarity.csv"));
    write_csv(wtab, written.back());

    const auto scores = isolation_scores(sm);
    const auto ranking = isolation_ranking(sm);
    CsvTable iso;
    iso.header = {"image", "score"};
    for (std::int64_t idx : ranking)
        iso.rows.push_back(
            {csv_cell(idx), csv_cell(scores[static_cast<std::size_t>(idx)])});
    written.push_back(join(run_dir, "isolation.csv"));
    write_csv(iso, written.back());
    return written;
}

} // namespace wsdpa
