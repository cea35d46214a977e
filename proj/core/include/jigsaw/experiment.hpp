#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/attack.hpp"
#include "jigsaw/datasets.hpp"
#include "jigsaw/jpeg.hpp"

namespace jigsaw {

// A JPEG round trip, or the no-compression control when `jpeg` is empty.
struct JpegCondition {
  std::optional<JpegParams> jpeg;

  std::string qf_label() const;  // "70" or "none"
  std::string sr_label() const;  // "444", "420" or "none"
  friend bool operator==(const JpegCondition& a, const JpegCondition& b);
};

// The control plus Qf ∈ {70, 80, 90} × Sr ∈ {4:4:4, 4:2:0}.
std::vector<JpegCondition> default_conditions();

enum class Scramble { Full, BlocksOnly };

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets{{DatasetName::Cifar10, Split::Test, 20, 7},
                                    {DatasetName::Stl10, Split::Test, 20, 7}};
  std::filesystem::path data_root = "data";
  int key_count = 10;
  std::vector<JpegCondition> conditions = default_conditions();
  CipherConfig cipher;
  Scramble scramble = Scramble::Full;
  ResizeKernel resize = ResizeKernel::Bilinear;
  AttackOptions attack;
  // Per-puzzle solver budget; the best assembly so far is scored on expiry.
  std::chrono::milliseconds timeout = std::chrono::minutes(5);
  std::uint64_t master_seed = 2024;
  std::filesystem::path output_dir;  // empty: nothing written
  int workers = 0;                   // 0: JIGSAW_WORKERS, else hardware threads
};

void validate(const ExperimentConfig& cfg);

// JSON; see README for the schema. Missing fields keep their defaults.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::string dataset;
  int image_id = 0;
  int key_id = 0;
  std::string qf;
  std::string subsampling;
  double dc = 0;
  double nc = 0;
  double lc = 0;
  double solver_fitness = 0;
  double wall_time = 0;  // seconds

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ErrorRow {
  std::string dataset;
  int image_id = 0;
  int key_id = 0;
  std::string qf;
  std::string subsampling;
  std::string message;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<ErrorRow> errors;
};

// Keys for key_id k of record i of a dataset.
KeySet row_keys(std::uint64_t master_seed, DatasetName dataset, int image_index, int key_id);

// Worker count: explicit value, else JIGSAW_WORKERS, else hardware threads.
int resolve_workers(int requested);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

// Every (image, key, condition) tuple; a failing tuple becomes an ErrorRow
// and the sweep continues. Rows come back sorted by dataset order, image,
// key and condition order. With an output directory, writes results.csv,
// errors.csv and the summaries.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress = {});

// Schema: dataset,image_id,key_id,qf,subsampling,dc,nc,lc,solver_fitness,wall_time
std::string format_results_csv(std::span<const ResultRow> rows, bool with_wall_time = true);
std::vector<ResultRow> parse_results_csv(const std::string& text);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
void write_results_csv(const std::filesystem::path& path, std::span<const ResultRow> rows);
std::string format_errors_csv(std::span<const ErrorRow> rows);

}  // namespace jigsaw
