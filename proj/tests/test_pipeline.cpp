// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <unistd.h>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "wsdpa/pipeline.hpp"

using namespace wsdpa;
using namespace wsdpa::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("wsdpa_run_" + std::to_string(std::rand()) +
                std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string strip_runtime(std::string json) {
    return std::regex_replace(json,
                              std::regex("\"runtime_seconds\": [^,\n]+"),
                              "\"runtime_seconds\": 0");
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.basis = "db2";
    cfg.levels = 1;
    cfg.tau = 1e6;
    return cfg;
}

// Writes a small planted dataset to disk as PGM files plus a manifest.
void write_dir_dataset(const TempDir& dir, const PlantedSpec& spec) {
    const LabeledDataset ds = make_planted_dataset(spec);
    std::ofstream man(dir.file("manifest.tsv"));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string name = "img_" + std::to_string(i) + ".pgm";
        write_pgm(ds.images[i], dir.file(name));
        man << name << '\t' << ds.class_names[static_cast<std::size_t>(ds.labels[i])]
            << '\n';
    }
}

} // namespace

TEST_CASE("planted dataset flows through analyze with dominant patterns") {
    const PlantedSpec spec{.images_per_class = 40, .size = 16, .seed = 11};
    const LabeledDataset ds = make_planted_dataset(spec);
    const AnalysisRun run = analyze_dataset(ds, base_config());

    CHECK(run.tensor.class_count() == 2);
    CHECK(run.tensor.m >= 10);
    CHECK(run.layout.total() == 324); // 4 subbands of 9x9

    const AssociationTable table = association_table(run.factors);
    for (int i = 0; i < 2; ++i) {
        const auto dominant = dominant_patterns_threshold(table, i, 2.0);
        CHECK(!dominant.empty());
    }

    SUBCASE("artifacts land in the run directory") {
        TempDir out;
        const auto files = write_run_artifacts(run, out.path.string());
        CHECK(fs::exists(out.file("singular_values.csv")));
        CHECK(fs::exists(out.file("association.csv")));
        CHECK(fs::exists(out.file("angular_alpha_beta.csv")));
        CHECK(fs::exists(out.file("report.json")));
        CHECK(fs::exists(out.file("factors.bin")));
        CHECK(files.size() == 5);

        const std::string report = slurp(out.file("report.json"));
        CHECK(report.find("\"format_version\": 1") != std::string::npos);
        CHECK(report.find("\"alpha\"") != std::string::npos);
        CHECK(report.find("\"m\"") != std::string::npos);
        CHECK(report.find("\"tau\"") != std::string::npos);
        CHECK(report.find("\"n_i\"") != std::string::npos);
        CHECK(report.find("\"runtime_seconds\"") != std::string::npos);

        // singular_values.csv has m rows and c columns
        std::ifstream sv(out.file("singular_values.csv"));
        std::string line;
        std::getline(sv, line);
        CHECK(line == "alpha,beta");
        std::int64_t rows = 0;
        while (std::getline(sv, line)) ++rows;
        CHECK(rows == run.tensor.m);
    }

    SUBCASE("stored runs reload bit-equal") {
        TempDir out;
        StoredRun stored;
        stored.factors = run.factors;
        stored.tensor = run.tensor;
        stored.raw_stacks = run.raw_stacks;
        stored.basis_name = run.basis.name;
        save_run(stored, out.file("factors.bin"));
        const StoredRun loaded = load_run(out.file("factors.bin"));

        CHECK(loaded.basis_name == "db2");
        CHECK(loaded.factors.class_names == run.factors.class_names);
        CHECK(loaded.tensor.m == run.tensor.m);
        CHECK((loaded.factors.V - run.factors.V).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < 2; ++i) {
            CHECK((loaded.factors.U[i] - run.factors.U[i]).cwiseAbs().maxCoeff() ==
                  0.0);
            CHECK((loaded.factors.sigma[i] - run.factors.sigma[i])
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
            CHECK((loaded.raw_stacks[i] - run.raw_stacks[i]).cwiseAbs().maxCoeff() ==
                  0.0);
            CHECK(loaded.tensor.scaling.row_sums[i] ==
                  run.tensor.scaling.row_sums[i]);
        }
        CHECK(loaded.tensor.perm.perm == run.tensor.perm.perm);
        CHECK(loaded.tensor.layout == run.tensor.layout);
    }
}

TEST_CASE("pre-scaling one image does not change downstream rankings") {
    const PlantedSpec spec{.images_per_class = 24, .size = 8, .seed = 12};
    LabeledDataset ds = make_planted_dataset(spec);
    const AnalysisRun a = analyze_dataset(ds, base_config());

    for (double& v : ds.images[5].values) v *= 10.0;
    const AnalysisRun b = analyze_dataset(ds, base_config());

    // Row-sum scaling absorbs the factor; alpha moves, so the decomposition
    // agrees up to one global scale.
    CHECK((a.factors.V - b.factors.V).cwiseAbs().maxCoeff() < 1e-6);
    const double scale = b.tensor.scaling.alpha / a.tensor.scaling.alpha;
    CHECK((b.factors.sigma[0] - scale * a.factors.sigma[0]).cwiseAbs().maxCoeff() /
              a.factors.sigma[0].maxCoeff() <
          1e-6);

    const auto ra = complexity_ranking(a.factors, 0);
    const auto rb = complexity_ranking(b.factors, 0);
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].first == rb[i].first);

    const auto ta = association_table(a.factors);
    const auto tb = association_table(b.factors);
    CHECK(dominant_patterns_top(ta, 0, 3) == dominant_patterns_top(tb, 0, 3));

    SUBCASE("a uniformly scaled class leaves every ranking unchanged") {
        LabeledDataset scaled = make_planted_dataset(spec);
        for (std::size_t i = 0; i < scaled.size(); ++i)
            if (scaled.labels[i] == 1)
                for (double& v : scaled.images[i].values) v *= 3.0;
        const AnalysisRun c = analyze_dataset(scaled, base_config());
        const auto tc = association_table(c.factors);
        for (int cls = 0; cls < 2; ++cls) {
            CHECK(dominant_patterns_top(ta, cls, 3) ==
                  dominant_patterns_top(tc, cls, 3));
            for (std::int64_t k = 0; k < tc.pattern_count(); ++k) {
                const bool was = ta.ratio(cls, k) > 1.0;
                CHECK((tc.ratio(cls, k) > 1.0) == was);
            }
        }
    }

    SUBCASE("only the hogsvd method is accepted") {
        RunConfig bad = base_config();
        bad.method = "cpd";
        CHECK_THROWS_AS(analyze_dataset(ds, bad), std::invalid_argument);
    }
}

TEST_CASE("cmd_analyze is deterministic given a seed") {
    TempDir data;
    write_dir_dataset(data, PlantedSpec{.images_per_class = 20, .size = 16,
                                        .seed = 13});
    RunConfig cfg = base_config();
    cfg.format = "dir";
    cfg.dataset_paths = {data.path.string()};
    cfg.shuffle_fraction = 1.0;
    cfg.seed = 7;

    TempDir out1, out2;
    cfg.out_dir = out1.path.string();
    cmd_analyze(cfg);
    cfg.out_dir = out2.path.string();
    cmd_analyze(cfg);

    for (const char* name : {"singular_values.csv", "association.csv",
                             "angular_alpha_beta.csv", "factors.bin"}) {
        CAPTURE(name);
        CHECK(slurp(out1.file(name)) == slurp(out2.file(name)));
    }
    // report.json is byte-identical except for the measured runtime
    CHECK(strip_runtime(slurp(out1.file("report.json"))) ==
          strip_runtime(slurp(out2.file("report.json"))));
}

TEST_CASE("patterns subcommand writes dominant pattern images") {
    // Single exclusive pattern per class on a base-free dataset, enough
    // images that the square haar transform keeps every coefficient; the
    // reconstructed pattern then matches the planted one directly. (Built in
    // memory: byte quantization to [0,1] would clip the planted values.)
    const PlantedSpec spec{.images_per_class = 400, .size = 8,
                           .patterns_per_class = 1, .pattern_amp = 0.5,
                           .base_level = 0.0, .pattern_pixel_sum = 3.0,
                           .seed = 14};
    RunConfig cfg = base_config();
    cfg.basis = "haar";
    const AnalysisRun run = analyze_dataset(make_planted_dataset(spec), cfg);
    TempDir out;
    write_run_artifacts(run, out.path.string());

    SUBCASE("count zero writes nothing") {
        CHECK(cmd_patterns(out.path.string(), "alpha", 0).empty());
    }
    SUBCASE("unknown class is an error") {
        CHECK_THROWS_AS(cmd_patterns(out.path.string(), "gamma", 1),
                        std::invalid_argument);
    }
    SUBCASE("emitted pattern correlates with the planted one") {
        const auto planted = make_planted_patterns(spec);
        for (int cls = 0; cls < 2; ++cls) {
            const std::string name = cls == 0 ? "alpha" : "beta";
            const auto files = cmd_patterns(out.path.string(), name, 1);
            REQUIRE(files.size() == 1);

            // Read the emitted PGM body; rendering is affine, so compare by
            // centered correlation.
            const std::string all = slurp(files[0]);
            const auto pos = all.find("255\n");
            REQUIRE(pos != std::string::npos);
            std::vector<double> rendered;
            for (std::size_t q = pos + 4; q < all.size(); ++q)
                rendered.push_back(static_cast<unsigned char>(all[q]));
            REQUIRE(rendered.size() == 64);

            double mr = 0.0, mp = 0.0;
            for (std::size_t q = 0; q < 64; ++q) {
                mr += rendered[q] / 64.0;
                mp += planted[static_cast<std::size_t>(cls)][q] / 64.0;
            }
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t q = 0; q < 64; ++q) {
                const double a = rendered[q] - mr;
                const double b = planted[static_cast<std::size_t>(cls)][q] - mp;
                dot += a * b;
                na += a * a;
                nb += b * b;
            }
            CAPTURE(name);
            CHECK(std::abs(dot) / std::sqrt(na * nb) > (cls == 0 ? 0.9 : 0.85));
        }
    }
}

TEST_CASE("reconstruct subcommand fulfills the endpoint contract") {
    TempDir data;
    write_dir_dataset(data, PlantedSpec{.images_per_class = 20, .size = 16,
                                        .seed = 15});
    RunConfig cfg = base_config();
    cfg.format = "dir";
    cfg.dataset_paths = {data.path.string()};
    TempDir out;
    cfg.out_dir = out.path.string();
    const AnalysisRun run = cmd_analyze(cfg);
    const std::int64_t m = run.tensor.m;

    SUBCASE("k = m reproduces the original image") {
        const auto files =
            cmd_reconstruct(out.path.string(), "beta", 3, {m});
        REQUIRE(files.size() == 2); // one PGM + residual.csv
        const std::string csv = slurp(out.file("residual.csv"));
        CHECK(csv.find("k,residual") == 0);
        const double resid =
            std::strtod(csv.substr(csv.rfind(',') + 1).c_str(), nullptr);
        CHECK(resid < 1e-8);
    }
    SUBCASE("row out of range and bad checkpoints error") {
        CHECK_THROWS_AS(cmd_reconstruct(out.path.string(), "beta", 99, {1}),
                        std::invalid_argument);
        CHECK_THROWS_AS(cmd_reconstruct(out.path.string(), "beta", 0, {5, 2}),
                        std::invalid_argument);
    }
    SUBCASE("default checkpoints clip to m") {
        const auto files = cmd_reconstruct(out.path.string(), "alpha", 0, {});
        const std::string csv = slurp(out.file("residual.csv"));
        CHECK(csv.find("," ) != std::string::npos);
        CHECK(csv.find(std::to_string(m) + ",") != std::string::npos);
    }
}

TEST_CASE("similarity subcommand finds planted duplicates") {
    TempDir data;
    PlantedSpec spec{.images_per_class = 16, .size = 16, .seed = 16};
    LabeledDataset ds = make_planted_dataset(spec);
    ds.images[4] = ds.images[9]; // duplicate pair within class alpha
    std::ofstream man(data.file("manifest.tsv"));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string name = "img_" + std::to_string(i) + ".pgm";
        write_pgm(ds.images[i], data.file(name));
        man << name << '\t' << ds.class_names[static_cast<std::size_t>(ds.labels[i])]
            << '\n';
    }
    man.close();

    RunConfig cfg = base_config();
    cfg.format = "dir";
    cfg.dataset_paths = {data.path.string()};
    TempDir out;
    cfg.out_dir = out.path.string();
    cmd_analyze(cfg);

    const auto files = cmd_similarity(out.path.string(), "alpha", std::nullopt);
    REQUIRE(files.size() == 2);
    const StoredRun run = load_run(out.file("factors.bin"));
    const SimilarityMatrix sm =
        similarity_matrix(run.factors, 0, default_bandwidth(run.factors, 0));
    double best = -1.0;
    int ba = 0, bb = 0;
    for (int a = 0; a < sm.w.rows(); ++a)
        for (int b = a + 1; b < sm.w.cols(); ++b)
            if (sm.w(a, b) > best) {
                best = sm.w(a, b);
                ba = a;
                bb = b;
            }
    CHECK(ba == 4);
    CHECK(bb == 9);
    CHECK(best > 0.999);

    CHECK_THROWS_AS(cmd_similarity(out.path.string(), "alpha", -2.0),
                    std::invalid_argument);
}

TEST_CASE("empty CIFAR classes are dropped before analysis") {
    // A two-record CIFAR file holding only cats and dogs must analyze after
    // filtering, since the other eight classes are empty.
    TempDir dir;
    std::vector<unsigned char> recs;
    std::mt19937_64 rng(17);
    for (int r = 0; r < 8; ++r) {
        recs.push_back(r % 2 ? 5 : 3); // cat, dog alternating
        for (int p = 0; p < 3072; ++p)
            recs.push_back(static_cast<unsigned char>(rng() % 256));
    }
    std::ofstream out(dir.file("batch.bin"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(recs.data()),
              static_cast<std::streamsize>(recs.size()));
    out.close();

    RunConfig cfg = base_config();
    cfg.format = "cifar";
    cfg.dataset_paths = {dir.file("batch.bin")};
    cfg.tau = 1e10;
    const AnalysisRun run = analyze_dataset(load_dataset(cfg), cfg);
    CHECK(run.tensor.class_names == std::vector<std::string>{"cat", "dog"});

    RunConfig filtered = cfg;
    filtered.class_filter = {"dog", "cat"};
    const AnalysisRun run2 = analyze_dataset(load_dataset(filtered), filtered);
    CHECK(run2.tensor.class_names == std::vector<std::string>{"dog", "cat"});

    filtered.class_filter = {"dog", "ship"}; // ship has no images
    CHECK_THROWS_AS(analyze_dataset(load_dataset(filtered), filtered),
                    std::runtime_error);
}

TEST_CASE("the CLI binary runs end to end") {
    TempDir data;
    write_dir_dataset(data, PlantedSpec{.images_per_class = 16, .size = 16,
                                        .seed = 18});
    TempDir out;
    const std::string cli = WSDPA_CLI_PATH;
    const std::string run_dir = out.file("run");

    auto sh = [&](const std::string& cmd) { return std::system(cmd.c_str()); };
    CHECK(sh(cli + " analyze --dataset " + data.path.string() +
             " --format dir --basis db2 --tau 1e6 --out " + run_dir +
             " > /dev/null") == 0);
    CHECK(fs::exists(run_dir + "/report.json"));
    CHECK(sh(cli + " patterns " + run_dir +
             " --class alpha --count 1 > /dev/null") == 0);
    CHECK(sh(cli + " reconstruct " + run_dir +
             " --class beta --row 0 --checkpoints 1,5 > /dev/null") == 0);
    CHECK(sh(cli + " similarity " + run_dir + " --class alpha > /dev/null") == 0);
    CHECK(fs::exists(run_dir + "/similarity.csv"));
    CHECK(fs::exists(run_dir + "/isolation.csv"));

    // conflicting flags and unknown classes exit nonzero
    CHECK(sh(cli + " analyze --dataset " + data.path.string() +
             " --format dir --basis db2 --pixel-mode --out " + run_dir +
             " 2> /dev/null") != 0);
    CHECK(sh(cli + " patterns " + run_dir +
             " --class nope --count 1 2> /dev/null") != 0);
}
