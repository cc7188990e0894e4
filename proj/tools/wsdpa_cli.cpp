// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsdpa/pipeline.hpp"

namespace {

void print_files(const std::vector<std::string>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet spectral decomposition for pattern-class association"};
    app.require_subcommand(1);

    wsdpa::RunConfig cfg;

    auto* analyze = app.add_subcommand(
        "analyze", "Run the full pipeline and write report tables and factors");
    analyze->add_option("--dataset", cfg.dataset_paths,
                        "Dataset path(s): idx wants <images> <labels>, cifar one "
                        "or more .bin batches, dir a root (and optional manifest)")
        ->required()
        ->expected(1, 8);
    analyze->add_option("--format", cfg.format, "Dataset format: idx | cifar | dir")
        ->required();
    auto* basis_opt =
        analyze->add_option("--basis", cfg.basis,
                            "Wavelet basis: haar, db1..db5 (default db2)");
    analyze->add_option("--levels", cfg.levels, "Decomposition level count")
        ->capture_default_str();
    analyze->add_option("--tau", cfg.tau,
                        "Condition-number cap for coefficient selection")
        ->capture_default_str();
    analyze->add_option("--m", cfg.m_override,
                        "Explicit coefficient count (overrides the tau search)");
    auto* pixel_opt = analyze->add_flag(
        "--pixel-mode", cfg.pixel_mode,
        "Use the identity transform on pixels instead of wavelets");
    analyze->add_option("--classes", cfg.class_filter,
                        "Keep only these classes (comma separated)")
        ->delimiter(',');
    analyze->add_option("--shuffle", cfg.shuffle_fraction,
                        "Fraction of images given random labels")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--seed", cfg.seed, "PRNG seed for --shuffle")
        ->capture_default_str();
    analyze->add_option("--out", cfg.out_dir, "Run directory to create")
        ->capture_default_str();
    analyze->add_option("--downscale", cfg.downscale,
                        "Integer box-filter downscale for dir datasets")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    std::string run_dir, class_name;
    std::int64_t count = 5, row = 0;
    std::vector<std::int64_t> checkpoints;
    std::optional<double> bandwidth;

    auto* patterns = app.add_subcommand(
        "patterns", "Write pixel-space images of the top dominant patterns");
    patterns->add_option("run_dir", run_dir, "Directory written by analyze")
        ->required();
    patterns->add_option("--class", class_name, "Class name")->required();
    patterns->add_option("--count", count, "How many patterns")
        ->capture_default_str();

    auto* reconstruct = app.add_subcommand(
        "reconstruct", "Cumulative rank-1 reconstruction of one image");
    reconstruct->add_option("run_dir", run_dir, "Directory written by analyze")
        ->required();
    reconstruct->add_option("--class", class_name, "Class name")->required();
    reconstruct->add_option("--row", row, "Image row within the class")
        ->capture_default_str();
    reconstruct
        ->add_option("--checkpoints", checkpoints,
                     "Term counts to emit (comma separated, default "
                     "100,200,300,500,1000,1500,2000,3000 clipped to m)")
        ->delimiter(',');

    auto* similarity = app.add_subcommand(
        "similarity", "Within-class similarity matrix and isolation scores");
    similarity->add_option("run_dir", run_dir, "Directory written by analyze")
        ->required();
    similarity->add_option("--class", class_name, "Class name")->required();
    double bw_value = 0.0;
    auto* bw_opt = similarity->add_option("--bandwidth", bw_value,
                                          "Gaussian kernel bandwidth (default: "
                                          "median off-diagonal distance)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            if (*pixel_opt && *basis_opt)
                throw std::invalid_argument(
                    "--pixel-mode and --basis are mutually exclusive");
            const wsdpa::AnalysisRun run = wsdpa::cmd_analyze(cfg);
            for (const auto& w : run.tensor.warnings)
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::printf("analyzed %d classes, m = %lld of %lld coefficients\n",
                        run.tensor.class_count(),
                        static_cast<long long>(run.tensor.m),
                        static_cast<long long>(run.layout.total()));
            std::printf("run directory: %s\n", cfg.out_dir.c_str());
        } else if (patterns->parsed()) {
            print_files(wsdpa::cmd_patterns(run_dir, class_name, count));
        } else if (reconstruct->parsed()) {
            print_files(wsdpa::cmd_reconstruct(run_dir, class_name, row, checkpoints));
        } else if (similarity->parsed()) {
            if (*bw_opt) bandwidth = bw_value;
            print_files(wsdpa::cmd_similarity(run_dir, class_name, bandwidth));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
