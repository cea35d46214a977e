#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jigsaw/attack.hpp"
#include "jigsaw/datasets.hpp"
#include "jigsaw/error.hpp"
#include "jigsaw/experiment.hpp"
#include "jigsaw/fetch.hpp"
#include "jigsaw/image_io.hpp"
#include "jigsaw/jpeg.hpp"
#include "jigsaw/metrics.hpp"
#include "jigsaw/summary.hpp"

namespace fs = std::filesystem;
using namespace jigsaw;

namespace {

struct CipherArgs {
  fs::path in;
  fs::path out;
  fs::path key_file;
  int m = 16;
  double negpos_probability = 0.5;
  bool per_block_pattern = false;
  fs::path truth;

  CipherConfig config() const { return {m, negpos_probability, per_block_pattern}; }
};

const CLI::Validator kImageOut(
    [](std::string& path) {
      std::string ext = fs::path(path).extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      for (const char* ok : {".png", ".ppm", ".pnm", ".jpg", ".jpeg"}) {
        if (ext == ok) {
          return std::string();
        }
      }
      return "unsupported image extension '" + ext + "'";
    },
    "IMAGE");

void add_cipher_options(CLI::App* cmd, CipherArgs& a) {
  cmd->add_option("--in", a.in, "input image (png, ppm or jpeg)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "output image")->required()->check(kImageOut);
  cmd->add_option("--key-file", a.key_file, "key file written by keygen")->required()->check(CLI::ExistingFile);
  cmd->add_option("--m", a.m, "block size")->capture_default_str();
  cmd->add_option("--negpos-probability", a.negpos_probability)->capture_default_str();
  cmd->add_flag("--per-block-pattern", a.per_block_pattern, "fresh intra-block pattern for every block");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path.string());
  }
  f << text;
}

std::vector<fs::path> expand_photos(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> photos;
  for (const fs::path& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const std::string ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".ppm")) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      photos.insert(photos.end(), found.begin(), found.end());
    } else {
      photos.push_back(p);
    }
  }
  return photos;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-scrambling image encryption and jigsaw-puzzle attacks"};
  app.require_subcommand(1);

  // keygen
  fs::path keygen_out;
  std::optional<std::uint64_t> keygen_seed;
  auto* keygen = app.add_subcommand("keygen", "write a key file with five 64-bit seeds");
  keygen->add_option("--out", keygen_out)->required();
  keygen->add_option("--seed", keygen_seed, "derive the keys from this seed instead of the OS entropy source");

  // encrypt / decrypt
  CipherArgs enc_args;
  auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt an image");
  add_cipher_options(encrypt_cmd, enc_args);
  encrypt_cmd->add_option("--truth", enc_args.truth, "also write the ground-truth assembly CSV");
  CipherArgs dec_args;
  auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt an image");
  add_cipher_options(decrypt_cmd, dec_args);

  // jpeg
  fs::path jpeg_in;
  fs::path jpeg_out;
  int quality = 70;
  std::string subsampling = "420";
  auto* jpeg_cmd = app.add_subcommand("jpeg", "JPEG-compress an image");
  jpeg_cmd->add_option("--in", jpeg_in)->required()->check(CLI::ExistingFile);
  jpeg_cmd->add_option("--out", jpeg_out, ".jpg writes the stream, other extensions the decoded pixels")->required()->check(kImageOut);
  jpeg_cmd->add_option("--quality", quality)->capture_default_str()->check(CLI::Range(1, 100));
  jpeg_cmd->add_option("--subsampling", subsampling, "444 or 420")->capture_default_str();

  // attack
  fs::path attack_in;
  fs::path attack_out;
  fs::path attack_report;
  fs::path attack_assembly;
  fs::path attack_restored;
  fs::path attack_keys;
  fs::path attack_truth;
  int attack_m = 16;
  bool skip_restoration = false;
  bool skip_solver = false;
  GaParams ga;
  std::string metric = "ssd";
  double attack_timeout = 0;
  auto* attack_cmd = app.add_subcommand("attack", "sub-block restoration followed by the jigsaw solver");
  attack_cmd->add_option("--in", attack_in, "encrypted image")->required()->check(CLI::ExistingFile);
  attack_cmd->add_option("--out", attack_out, "reassembled image")->required()->check(kImageOut);
  attack_cmd->add_option("--m", attack_m)->capture_default_str();
  attack_cmd->add_flag("--skip-restoration", skip_restoration);
  attack_cmd->add_flag("--skip-solver", skip_solver);
  attack_cmd->add_option("--population", ga.population_size)->capture_default_str();
  attack_cmd->add_option("--generations", ga.generations)->capture_default_str();
  attack_cmd->add_option("--seed", ga.random_seed)->capture_default_str();
  attack_cmd->add_option("--metric", metric, "ssd or mgc")->capture_default_str();
  attack_cmd->add_option("--timeout", attack_timeout, "solver budget in seconds (0: none)");
  attack_cmd->add_option("--report", attack_report, "one-row CSV report");
  attack_cmd->add_option("--assembly", attack_assembly, "write the solved assembly CSV");
  attack_cmd->add_option("--restored", attack_restored, "write the image after sub-block restoration")
      ->check(kImageOut);
  attack_cmd->add_option("--key-file", attack_keys, "score against the true layout of these keys")
      ->check(CLI::ExistingFile);
  attack_cmd->add_option("--truth", attack_truth,
                         "with --key-file: write the true layout in the frame of the restored blocks")
      ->needs("--key-file");

  // metrics
  fs::path metrics_assembly;
  fs::path metrics_truth;
  auto* metrics_cmd = app.add_subcommand("metrics", "Dc, Nc and Lc of an assembly");
  metrics_cmd->add_option("--assembly", metrics_assembly)->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--truth", metrics_truth)->required()->check(CLI::ExistingFile);

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "CIFAR-10 / STL-10 handling");
  dataset_cmd->require_subcommand(1);
  std::string ds_name = "cifar10";
  std::string ds_split = "test";
  fs::path ds_root = "data";
  fs::path ds_manifest;
  auto* fetch_cmd = dataset_cmd->add_subcommand("fetch", "download, verify and extract an archive");
  fetch_cmd->add_option("--name", ds_name, "cifar10 or stl10")->capture_default_str();
  fetch_cmd->add_option("--root", ds_root)->capture_default_str();
  fetch_cmd->add_option("--manifest", ds_manifest, "JSON list overriding archive URLs and digests")
      ->check(CLI::ExistingFile);

  int sample_count = 20;
  std::uint64_t sample_seed = 7;
  fs::path sample_out;
  std::string sample_resize;
  auto* sample_cmd = dataset_cmd->add_subcommand("sample", "write a seeded subset as PNG plus index.csv");
  sample_cmd->add_option("--name", ds_name)->capture_default_str();
  sample_cmd->add_option("--split", ds_split)->capture_default_str();
  sample_cmd->add_option("--root", ds_root)->capture_default_str();
  sample_cmd->add_option("--count", sample_count)->capture_default_str();
  sample_cmd->add_option("--seed", sample_seed)->capture_default_str();
  sample_cmd->add_option("--out", sample_out)->required();
  sample_cmd->add_option("--resize", sample_resize, "bilinear, bicubic or nearest: write 224x224 images");

  std::vector<fs::path> standin_photos;
  int standin_records = 200;
  std::uint64_t standin_seed = 1;
  auto* standin_cmd =
      dataset_cmd->add_subcommand("standin", "build a dataset root in the official layout from local photos");
  standin_cmd->add_option("--name", ds_name)->capture_default_str();
  standin_cmd->add_option("--root", ds_root)->capture_default_str();
  standin_cmd->add_option("--records", standin_records, "images per split file")->capture_default_str();
  standin_cmd->add_option("--seed", standin_seed)->capture_default_str();
  standin_cmd->add_option("photos", standin_photos, "photo files or directories")->required();

  // experiment
  auto* experiment_cmd = app.add_subcommand("experiment", "the full encrypt / compress / attack sweep");
  experiment_cmd->require_subcommand(1);
  fs::path config_path;
  fs::path run_out;
  int run_workers = 0;
  bool run_full = false;
  auto* run_cmd = experiment_cmd->add_subcommand("run", "run a sweep described by a JSON config");
  run_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "output directory (overrides the config)");
  run_cmd->add_option("--workers", run_workers, "worker threads (overrides the config)");
  run_cmd->add_flag("--full", run_full, "1000 images per dataset");
  fs::path summarize_in;
  fs::path summarize_out;
  auto* summarize_cmd = experiment_cmd->add_subcommand("summarize", "boxplot summaries of a results CSV");
  summarize_cmd->add_option("--in", summarize_in)->required()->check(CLI::ExistingFile);
  summarize_cmd->add_option("--out", summarize_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (keygen->parsed()) {
      KeySet keys;
      if (keygen_seed) {
        keys = derive_keys(*keygen_seed);
      } else {
        std::random_device rd;
        const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        keys = derive_keys(seed);
      }
      write_key_file(keygen_out, keys);
    } else if (encrypt_cmd->parsed()) {
      const CipherConfig cfg = enc_args.config();
      const KeySet keys = read_key_file(enc_args.key_file);
      const Image img = read_image(enc_args.in);
      write_image(enc_args.out, encrypt(img, keys, cfg));
      if (!enc_args.truth.empty()) {
        const BlockGrid grid = split_blocks(img, cfg.m);
        const CipherPlan plan = generate_pattern(keys, cfg, static_cast<int>(grid.count()));
        write_assembly_csv(enc_args.truth, truth_assembly(plan, grid.rows, grid.cols));
      }
    } else if (decrypt_cmd->parsed()) {
      const KeySet keys = read_key_file(dec_args.key_file);
      write_image(dec_args.out, decrypt(read_image(dec_args.in), keys, dec_args.config()));
    } else if (jpeg_cmd->parsed()) {
      const JpegParams params{quality, parse_subsampling(subsampling)};
      const Image img = read_image(jpeg_in);
      const std::string ext = jpeg_out.extension().string();
      if (ext == ".jpg" || ext == ".jpeg") {
        const std::vector<std::uint8_t> bytes = jpeg_bytes(img, params);
        write_file(jpeg_out, bytes);
      } else {
        write_image(jpeg_out, jpeg_cycle(img, params));
      }
    } else if (attack_cmd->parsed()) {
      CipherConfig cfg;
      cfg.m = attack_m;
      AttackOptions options;
      options.restore = !skip_restoration;
      options.solve = !skip_solver;
      options.metric = parse_metric(metric);
      options.ga = ga;
      if (attack_timeout > 0) {
        options.ga.time_budget = std::chrono::milliseconds(static_cast<long long>(attack_timeout * 1000));
      }
      const Image encrypted = read_image(attack_in);
      const AttackResult result = attack(encrypted, cfg, options);
      write_image(attack_out, result.reassembled);
      if (!attack_restored.empty()) {
        write_image(attack_restored, result.restored);
      }
      if (!attack_assembly.empty()) {
        write_assembly_csv(attack_assembly, result.assembly);
      }
      std::string header = "restoration_score,tied_arrangements,solver_fitness,timed_out";
      char line[256];
      std::snprintf(line, sizeof(line), "%.6f,%d,%.6f,%d", result.hypothesis.score,
                    result.hypothesis.tied_arrangements, result.solver_fitness, result.timed_out ? 1 : 0);
      std::string values = line;
      if (!attack_keys.empty()) {
        const KeySet keys = read_key_file(attack_keys);
        const int rows = encrypted.height() / cfg.m;
        const int cols = encrypted.width() / cfg.m;
        const CipherPlan plan = generate_pattern(keys, cfg, rows * cols);
        const Assembly truth =
            options.restore ? aligned_truth(result, plan, rows, cols) : truth_assembly(plan, rows, cols);
        if (!attack_truth.empty()) {
          write_assembly_csv(attack_truth, truth);
        }
        const MetricsReport rep = evaluate(result.assembly, truth);
        std::snprintf(line, sizeof(line), ",%.6f,%.6f,%.6f", rep.dc, rep.nc, rep.lc);
        header += ",dc,nc,lc";
        values += line;
      }
      const std::string report = header + "\n" + values + "\n";
      if (attack_report.empty()) {
        std::cout << report;
      } else {
        write_text(attack_report, report);
      }
    } else if (metrics_cmd->parsed()) {
      const MetricsReport rep = evaluate(read_assembly_csv(metrics_assembly), read_assembly_csv(metrics_truth));
      std::printf("dc,nc,lc\n%.6f,%.6f,%.6f\n", rep.dc, rep.nc, rep.lc);
    } else if (fetch_cmd->parsed()) {
      const DatasetName name = parse_dataset_name(ds_name);
      ArchiveSource source = default_source(name);
      if (!ds_manifest.empty()) {
        for (const ArchiveSource& s : read_source_manifest(ds_manifest)) {
          if (s.name == name) {
            source = s;
          }
        }
      }
      fetch(source, ds_root);
    } else if (sample_cmd->parsed()) {
      const DatasetSpec spec{parse_dataset_name(ds_name), parse_split(ds_split), sample_count, sample_seed};
      const std::vector<DatasetSample> samples = load(spec, ds_root);
      fs::create_directories(sample_out);
      std::string index = "file,record,label\n";
      for (const DatasetSample& s : samples) {
        char file[64];
        std::snprintf(file, sizeof(file), "%s_%05d.png", ds_name.c_str(), s.index);
        const Image img =
            sample_resize.empty() ? s.image : resize_to_working(s.image, parse_resize_kernel(sample_resize));
        write_image(sample_out / file, img);
        index += std::string(file) + "," + std::to_string(s.index) + "," + std::to_string(s.label) + "\n";
      }
      write_text(sample_out / "index.csv", index);
    } else if (standin_cmd->parsed()) {
      const std::vector<fs::path> photos = expand_photos(standin_photos);
      build_standin(parse_dataset_name(ds_name), photos, ds_root, standin_records, standin_seed);
    } else if (run_cmd->parsed()) {
      ExperimentConfig cfg = read_experiment_config(config_path);
      if (!run_out.empty()) {
        cfg.output_dir = run_out;
      }
      if (run_workers > 0) {
        cfg.workers = run_workers;
      }
      if (run_full) {
        for (DatasetSpec& d : cfg.datasets) {
          d.count = 1000;
        }
      }
      if (cfg.output_dir.empty()) {
        cfg.output_dir = "results";
      }
      const ExperimentResult result = run_experiment(cfg, [](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\r%zu/%zu", done, total);
        if (done == total) {
          std::fprintf(stderr, "\n");
        }
      });
      std::printf("%zu rows, %zu errors, written to %s\n", result.rows.size(), result.errors.size(),
                  cfg.output_dir.string().c_str());
    } else if (summarize_cmd->parsed()) {
      const std::vector<ResultRow> rows = read_results_csv(summarize_in);
      for (const fs::path& p : render_summary(rows, summarize_out)) {
        std::printf("%s\n", p.string().c_str());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
