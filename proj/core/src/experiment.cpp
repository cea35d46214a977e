#include "jigsaw/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jigsaw/error.hpp"
#include "jigsaw/image_io.hpp"
#include "jigsaw/summary.hpp"

namespace jigsaw {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Task {
  std::size_t dataset;
  std::size_t image;
  int key;
  std::size_t condition;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (const char c : s) {
    out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

JpegCondition parse_condition(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") {
      return {};
    }
    throw ParameterError("unknown condition '" + j.get<std::string>() + "'");
  }
  JpegParams p;
  p.quality = j.at("qf").get<int>();
  p.subsampling = parse_subsampling(j.at("sr").is_string() ? j.at("sr").get<std::string>()
                                                           : std::to_string(j.at("sr").get<int>()));
  validate(p);
  return JpegCondition{p};
}

ResultRow run_task(const ExperimentConfig& cfg, const DatasetSpec& ds, const DatasetSample& sample,
                   const Image& working, int key_id, const JpegCondition& cond) {
  const auto start = std::chrono::steady_clock::now();
  const KeySet keys = row_keys(cfg.master_seed, ds.name, sample.index, key_id);
  const int m = cfg.cipher.m;
  const int rows = working.height() / m;
  const int cols = working.width() / m;
  const CipherPlan plan = cfg.scramble == Scramble::Full
                              ? generate_pattern(keys, cfg.cipher, rows * cols)
                              : scramble_only_plan(keys, cfg.cipher, rows * cols);
  Image encrypted = encrypt_with(working, plan, m);
  if (cond.jpeg) {
    encrypted = jpeg_cycle(encrypted, *cond.jpeg);
  }
  AttackOptions options = cfg.attack;
  options.ga.random_seed = hash_combine(cfg.attack.ga.random_seed, keys.k1);
  options.ga.time_budget = cfg.timeout;
  const AttackResult res = attack(encrypted, cfg.cipher, options);
  const MetricsReport report = score_attack(res, plan, rows, cols);

  ResultRow row;
  row.dataset = to_string(ds.name);
  row.image_id = sample.index;
  row.key_id = key_id;
  row.qf = cond.qf_label();
  row.subsampling = cond.sr_label();
  row.dc = report.dc;
  row.nc = report.nc;
  row.lc = report.lc;
  row.solver_fitness = res.solver_fitness;
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::string JpegCondition::qf_label() const { return jpeg ? std::to_string(jpeg->quality) : "none"; }
std::string JpegCondition::sr_label() const { return jpeg ? to_string(jpeg->subsampling) : "none"; }

bool operator==(const JpegCondition& a, const JpegCondition& b) {
  if (a.jpeg.has_value() != b.jpeg.has_value()) {
    return false;
  }
  return !a.jpeg || (a.jpeg->quality == b.jpeg->quality && a.jpeg->subsampling == b.jpeg->subsampling);
}

std::vector<JpegCondition> default_conditions() {
  std::vector<JpegCondition> out{JpegCondition{}};
  for (const int qf : {70, 80, 90}) {
    for (const Subsampling sr : {Subsampling::k444, Subsampling::k420}) {
      out.push_back(JpegCondition{JpegParams{qf, sr}});
    }
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.datasets.empty()) {
    throw ParameterError("experiment needs at least one dataset");
  }
  for (const DatasetSpec& d : cfg.datasets) {
    validate(d);
  }
  if (cfg.key_count < 1) {
    throw ParameterError("key_count must be at least 1");
  }
  if (cfg.conditions.empty()) {
    throw ParameterError("experiment needs at least one condition");
  }
  for (const JpegCondition& c : cfg.conditions) {
    if (c.jpeg) {
      validate(*c.jpeg);
    }
  }
  validate(cfg.cipher);
  validate(cfg.attack.ga);
  if (kWorkingSize % cfg.cipher.m != 0) {
    throw ParameterError("block size " + std::to_string(cfg.cipher.m) + " does not divide the " +
                         std::to_string(kWorkingSize) + "-pixel working size");
  }
  if (cfg.timeout.count() <= 0) {
    throw ParameterError("timeout must be positive");
  }
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("experiment config: ") + e.what());
  }
  try {
    if (j.contains("datasets")) {
      cfg.datasets.clear();
      for (const auto& d : j.at("datasets")) {
        DatasetSpec spec;
        spec.name = parse_dataset_name(d.at("name").get<std::string>());
        spec.split = parse_split(d.value("split", std::string("test")));
        spec.count = d.value("count", spec.count);
        spec.seed = d.value("seed", spec.seed);
        cfg.datasets.push_back(spec);
      }
    }
    cfg.data_root = j.value("data_root", cfg.data_root.string());
    cfg.key_count = j.value("keys_per_image", cfg.key_count);
    if (j.contains("conditions")) {
      cfg.conditions.clear();
      for (const auto& c : j.at("conditions")) {
        cfg.conditions.push_back(parse_condition(c));
      }
    }
    if (j.contains("cipher")) {
      const auto& c = j.at("cipher");
      cfg.cipher.m = c.value("m", cfg.cipher.m);
      cfg.cipher.negpos_probability = c.value("negpos_probability", cfg.cipher.negpos_probability);
      cfg.cipher.per_block_pattern = c.value("per_block_pattern", cfg.cipher.per_block_pattern);
    }
    if (j.contains("scramble")) {
      const std::string s = j.at("scramble").get<std::string>();
      if (s == "full") {
        cfg.scramble = Scramble::Full;
      } else if (s == "blocks_only") {
        cfg.scramble = Scramble::BlocksOnly;
      } else {
        throw ParameterError("scramble must be full or blocks_only");
      }
    }
    cfg.resize = parse_resize_kernel(j.value("resize", to_string(cfg.resize)));
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      cfg.attack.restore = a.value("restore", cfg.attack.restore);
      cfg.attack.solve = a.value("solve", cfg.attack.solve);
      cfg.attack.metric = parse_metric(a.value("metric", to_string(cfg.attack.metric)));
      cfg.attack.ga.population_size = a.value("population", cfg.attack.ga.population_size);
      cfg.attack.ga.generations = a.value("generations", cfg.attack.ga.generations);
      cfg.attack.ga.elite_fraction = a.value("elite_fraction", cfg.attack.ga.elite_fraction);
      cfg.attack.ga.mutation_rate = a.value("mutation_rate", cfg.attack.ga.mutation_rate);
      cfg.attack.ga.random_seed = a.value("seed", cfg.attack.ga.random_seed);
      if (a.contains("timeout_s")) {
        cfg.timeout = std::chrono::milliseconds(static_cast<long long>(a.at("timeout_s").get<double>() * 1000));
      }
    }
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir.string());
    cfg.workers = j.value("workers", cfg.workers);
  } catch (const json::exception& e) {
    throw FormatError(std::string("experiment config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig read_experiment_config(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse_experiment_config(std::string(bytes.begin(), bytes.end()));
}

KeySet row_keys(std::uint64_t master_seed, DatasetName dataset, int image_index, int key_id) {
  std::uint64_t h = hash_combine(master_seed, hash_string(to_string(dataset)));
  h = hash_combine(h, static_cast<std::uint64_t>(image_index));
  h = hash_combine(h, static_cast<std::uint64_t>(key_id));
  return derive_keys(h);
}

int resolve_workers(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("JIGSAW_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress) {
  validate(cfg);
  std::vector<std::vector<DatasetSample>> samples;
  std::vector<std::vector<Image>> working;
  for (const DatasetSpec& ds : cfg.datasets) {
    samples.push_back(load(ds, cfg.data_root));
    std::vector<Image> resized;
    for (const DatasetSample& s : samples.back()) {
      resized.push_back(resize_to_working(s.image, cfg.resize));
    }
    working.push_back(std::move(resized));
  }

  std::vector<Task> tasks;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    for (std::size_t i = 0; i < samples[d].size(); ++i) {
      for (int k = 0; k < cfg.key_count; ++k) {
        for (std::size_t c = 0; c < cfg.conditions.size(); ++c) {
          tasks.push_back({d, i, k, c});
        }
      }
    }
  }

  // Results land at their task index, which is already the sorted order.
  std::vector<std::optional<ResultRow>> results(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      try {
        results[t] = run_task(cfg, cfg.datasets[task.dataset], samples[task.dataset][task.image],
                              working[task.dataset][task.image], task.key, cfg.conditions[task.condition]);
      } catch (const std::exception& e) {
        failures[t] = e.what();
        if (failures[t].empty()) {
          failures[t] = "unknown error";
        }
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, tasks.size());
      }
    }
  };
  const int workers = std::min<int>(resolve_workers(cfg.workers), static_cast<int>(std::max<std::size_t>(1, tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& th : pool) {
    th.join();
  }

  ExperimentResult out;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (results[t]) {
      out.rows.push_back(*results[t]);
      continue;
    }
    const Task& task = tasks[t];
    const JpegCondition& cond = cfg.conditions[task.condition];
    out.errors.push_back({to_string(cfg.datasets[task.dataset].name), samples[task.dataset][task.image].index,
                          task.key, cond.qf_label(), cond.sr_label(), failures[t]});
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_results_csv(cfg.output_dir / "results.csv", out.rows);
    const std::string errors = format_errors_csv(out.errors);
    write_file(cfg.output_dir / "errors.csv",
               std::span(reinterpret_cast<const std::uint8_t*>(errors.data()), errors.size()));
    if (!out.rows.empty()) {
      render_summary(out.rows, cfg.output_dir);
    }
  }
  return out;
}

std::string format_results_csv(std::span<const ResultRow> rows, bool with_wall_time) {
  std::string out = "dataset,image_id,key_id,qf,subsampling,dc,nc,lc,solver_fitness";
  out += with_wall_time ? ",wall_time\n" : "\n";
  for (const ResultRow& r : rows) {
    out += r.dataset + "," + std::to_string(r.image_id) + "," + std::to_string(r.key_id) + "," + r.qf + "," +
           r.subsampling + "," + fixed(r.dc, 6) + "," + fixed(r.nc, 6) + "," + fixed(r.lc, 6) + "," +
           fixed(r.solver_fitness, 6);
    out += with_wall_time ? "," + fixed(r.wall_time, 3) + "\n" : "\n";
  }
  return out;
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("results CSV is empty");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 9 || header[0] != "dataset" || header[5] != "dc" || header[7] != "lc") {
    throw FormatError("results CSV has an unexpected header: " + line);
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw FormatError("results CSV line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    try {
      ResultRow r;
      r.dataset = f[0];
      r.image_id = std::stoi(f[1]);
      r.key_id = std::stoi(f[2]);
      r.qf = f[3];
      r.subsampling = f[4];
      r.dc = std::stod(f[5]);
      r.nc = std::stod(f[6]);
      r.lc = std::stod(f[7]);
      r.solver_fitness = std::stod(f[8]);
      r.wall_time = f.size() > 9 ? std::stod(f[9]) : 0.0;
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("results CSV line " + std::to_string(line_no) + " has a non-numeric field");
    }
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse_results_csv(std::string(bytes.begin(), bytes.end()));
}

void write_results_csv(const fs::path& path, std::span<const ResultRow> rows) {
  const std::string text = format_results_csv(rows);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string format_errors_csv(std::span<const ErrorRow> rows) {
  std::string out = "dataset,image_id,key_id,qf,subsampling,error\n";
  for (const ErrorRow& r : rows) {
    out += r.dataset + "," + std::to_string(r.image_id) + "," + std::to_string(r.key_id) + "," + r.qf + "," +
           r.subsampling + "," + csv_escape(r.message) + "\n";
  }
  return out;
}

}  // namespace jigsaw
