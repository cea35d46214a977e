#include "jigsaw/datasets.hpp"

#include <algorithm>
#include <fstream>

#include <opencv2/imgproc.hpp>

#include "jigsaw/error.hpp"
#include "jigsaw/fetch.hpp"
#include "jigsaw/image_io.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {
namespace fs = std::filesystem;

namespace {

constexpr int kCifarSide = 32;
constexpr int kStlSide = 96;

std::size_t record_bytes(DatasetName name) {
  return name == DatasetName::Cifar10 ? kCifarRecordBytes : kStlImageBytes;
}

Image cifar_image(const std::uint8_t* planes) {
  Image img(kCifarSide, kCifarSide);
  constexpr int plane = kCifarSide * kCifarSide;
  for (int y = 0; y < kCifarSide; ++y) {
    for (int x = 0; x < kCifarSide; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = planes[c * plane + y * kCifarSide + x];
      }
    }
  }
  return img;
}

Image stl_image(const std::uint8_t* planes) {
  Image img(kStlSide, kStlSide);
  constexpr int plane = kStlSide * kStlSide;
  for (int c = 0; c < 3; ++c) {
    for (int x = 0; x < kStlSide; ++x) {
      for (int y = 0; y < kStlSide; ++y) {
        img.at(x, y, c) = planes[c * plane + x * kStlSide + y];
      }
    }
  }
  return img;
}

void check_side(const Image& img, int side, const char* what) {
  if (img.width() != side || img.height() != side) {
    throw DimensionError(std::string(what) + " records must be " + std::to_string(side) + "x" +
                         std::to_string(side) + ", got " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()));
  }
}

std::uintmax_t checked_size(const fs::path& path, std::size_t record) {
  if (!fs::exists(path)) {
    throw FormatError("missing file: " + path.string());
  }
  const std::uintmax_t size = fs::file_size(path);
  if (size % record != 0) {
    throw FormatError("truncated record at byte offset " + std::to_string(size - size % record) +
                      " in " + path.string());
  }
  return size;
}

// Reads the given records (sorted global indices) across the split files.
std::vector<std::vector<std::uint8_t>> read_records(DatasetName name, Split split, const fs::path& root,
                                                    const std::vector<int>& indices) {
  const std::size_t rec = record_bytes(name);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(indices.size());
  std::size_t next = 0;
  long long first = 0;
  for (const fs::path& rel : image_files(name, split)) {
    const fs::path path = root / rel;
    const auto count = static_cast<long long>(checked_size(path, rec) / rec);
    std::ifstream in(path, std::ios::binary);
    while (next < indices.size() && indices[next] < first + count) {
      const long long local = indices[next] - first;
      in.seekg(static_cast<std::streamoff>(local * static_cast<long long>(rec)));
      std::vector<std::uint8_t> bytes(rec);
      in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(rec));
      if (!in) {
        throw FormatError("truncated record at byte offset " + std::to_string(local * rec) + " in " +
                          path.string());
      }
      out.push_back(std::move(bytes));
      ++next;
    }
    first += count;
  }
  if (next != indices.size()) {
    throw ParameterError("record index " + std::to_string(indices[next]) + " beyond the " +
                         std::to_string(first) + " records on disk");
  }
  return out;
}

std::vector<std::uint8_t> read_labels(DatasetName name, Split split, const fs::path& root) {
  const fs::path rel = label_file(name, split);
  if (rel.empty()) {
    return {};
  }
  if (!fs::exists(root / rel)) {
    throw FormatError("missing file: " + (root / rel).string());
  }
  return read_file(root / rel);
}

std::vector<DatasetSample> read_samples(DatasetName name, Split split, const fs::path& root,
                                        const std::vector<int>& indices) {
  const auto records = read_records(name, split, root, indices);
  const std::vector<std::uint8_t> labels = read_labels(name, split, root);
  std::vector<DatasetSample> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto index = static_cast<std::size_t>(indices[i]);
    out[i].index = indices[i];
    if (name == DatasetName::Cifar10) {
      out[i].label = records[i][0];
      out[i].image = cifar_image(records[i].data() + 1);
    } else {
      out[i].label = index < labels.size() ? labels[index] : 0;
      out[i].image = stl_image(records[i].data());
    }
  }
  return out;
}

}  // namespace

DatasetName parse_dataset_name(const std::string& s) {
  if (s == "cifar10") {
    return DatasetName::Cifar10;
  }
  if (s == "stl10") {
    return DatasetName::Stl10;
  }
  throw ParameterError("unknown dataset '" + s + "' (expected cifar10 or stl10)");
}

std::string to_string(DatasetName d) { return d == DatasetName::Cifar10 ? "cifar10" : "stl10"; }

Split parse_split(const std::string& s) {
  if (s == "train") {
    return Split::Train;
  }
  if (s == "test") {
    return Split::Test;
  }
  throw ParameterError("unknown split '" + s + "' (expected train or test)");
}

std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

int nominal_split_size(DatasetName name, Split split) {
  if (name == DatasetName::Cifar10) {
    return split == Split::Test ? 10000 : 50000;
  }
  return split == Split::Test ? 8000 : 5000;
}

void validate(const DatasetSpec& spec) {
  if (spec.count < 1) {
    throw ParameterError("dataset count must be at least 1");
  }
  if (spec.count > nominal_split_size(spec.name, spec.split)) {
    throw ParameterError("dataset count " + std::to_string(spec.count) + " exceeds the " +
                         std::to_string(nominal_split_size(spec.name, spec.split)) + " images of " +
                         to_string(spec.name) + " " + to_string(spec.split));
  }
}

std::vector<DatasetSample> parse_cifar10(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw FormatError("truncated record at byte offset " +
                      std::to_string(bytes.size() - bytes.size() % kCifarRecordBytes));
  }
  std::vector<DatasetSample> out(bytes.size() / kCifarRecordBytes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t* rec = bytes.data() + i * kCifarRecordBytes;
    out[i].index = static_cast<int>(i);
    out[i].label = rec[0];
    out[i].image = cifar_image(rec + 1);
  }
  return out;
}

std::vector<std::uint8_t> serialize_cifar10(std::span<const DatasetSample> samples) {
  std::vector<std::uint8_t> out;
  out.reserve(samples.size() * kCifarRecordBytes);
  for (const DatasetSample& s : samples) {
    check_side(s.image, kCifarSide, "CIFAR-10");
    out.push_back(static_cast<std::uint8_t>(s.label));
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < kCifarSide; ++y) {
        for (int x = 0; x < kCifarSide; ++x) {
          out.push_back(s.image.at(x, y, c));
        }
      }
    }
  }
  return out;
}

std::vector<Image> parse_stl10_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kStlImageBytes != 0) {
    throw FormatError("truncated record at byte offset " +
                      std::to_string(bytes.size() - bytes.size() % kStlImageBytes));
  }
  std::vector<Image> out;
  out.reserve(bytes.size() / kStlImageBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kStlImageBytes) {
    out.push_back(stl_image(bytes.data() + off));
  }
  return out;
}

std::vector<std::uint8_t> serialize_stl10_images(std::span<const Image> images) {
  std::vector<std::uint8_t> out;
  out.reserve(images.size() * kStlImageBytes);
  for (const Image& img : images) {
    check_side(img, kStlSide, "STL-10");
    for (int c = 0; c < 3; ++c) {
      for (int x = 0; x < kStlSide; ++x) {
        for (int y = 0; y < kStlSide; ++y) {
          out.push_back(img.at(x, y, c));
        }
      }
    }
  }
  return out;
}

std::vector<fs::path> image_files(DatasetName name, Split split) {
  if (name == DatasetName::Cifar10) {
    const fs::path dir = "cifar-10-batches-bin";
    if (split == Split::Test) {
      return {dir / "test_batch.bin"};
    }
    std::vector<fs::path> files;
    for (int i = 1; i <= 5; ++i) {
      files.push_back(dir / ("data_batch_" + std::to_string(i) + ".bin"));
    }
    return files;
  }
  return {fs::path("stl10_binary") / (split == Split::Test ? "test_X.bin" : "train_X.bin")};
}

fs::path label_file(DatasetName name, Split split) {
  if (name == DatasetName::Cifar10) {
    return {};
  }
  return fs::path("stl10_binary") / (split == Split::Test ? "test_y.bin" : "train_y.bin");
}

int available_records(DatasetName name, Split split, const fs::path& root) {
  std::uintmax_t total = 0;
  for (const fs::path& rel : image_files(name, split)) {
    total += checked_size(root / rel, record_bytes(name)) / record_bytes(name);
  }
  return static_cast<int>(total);
}

std::vector<int> select_indices(int population, int count, std::uint64_t seed) {
  if (count < 0 || count > population) {
    throw ParameterError("cannot select " + std::to_string(count) + " of " + std::to_string(population) +
                         " records");
  }
  RandomStream stream(seed);
  std::vector<int> perm = draw_permutation(stream, population);
  perm.resize(static_cast<std::size_t>(count));
  std::sort(perm.begin(), perm.end());
  return perm;
}

std::vector<DatasetSample> load(const DatasetSpec& spec, const fs::path& root) {
  validate(spec);
  verify_checksums(spec.name, spec.split, root);
  const int population = available_records(spec.name, spec.split, root);
  return read_samples(spec.name, spec.split, root, select_indices(population, spec.count, spec.seed));
}

std::vector<DatasetSample> load_all(DatasetName name, Split split, const fs::path& root) {
  verify_checksums(name, split, root);
  std::vector<int> all(static_cast<std::size_t>(available_records(name, split, root)));
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = static_cast<int>(i);
  }
  return read_samples(name, split, root, all);
}

ResizeKernel parse_resize_kernel(const std::string& s) {
  if (s == "bilinear") {
    return ResizeKernel::Bilinear;
  }
  if (s == "bicubic") {
    return ResizeKernel::Bicubic;
  }
  if (s == "nearest") {
    return ResizeKernel::Nearest;
  }
  throw ParameterError("unknown resize kernel '" + s + "'");
}

std::string to_string(ResizeKernel k) {
  switch (k) {
    case ResizeKernel::Bilinear:
      return "bilinear";
    case ResizeKernel::Bicubic:
      return "bicubic";
    case ResizeKernel::Nearest:
      break;
  }
  return "nearest";
}

Image resize(const Image& img, int width, int height, ResizeKernel kernel) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("resize target must be positive");
  }
  if (img.width() == width && img.height() == height) {
    return img;
  }
  if (img.empty()) {
    throw DimensionError("cannot resize an empty image");
  }
  int flag = cv::INTER_LINEAR;
  if (kernel == ResizeKernel::Bicubic) {
    flag = cv::INTER_CUBIC;
  } else if (kernel == ResizeKernel::Nearest) {
    flag = cv::INTER_NEAREST;
  }
  const cv::Mat src(img.height(), img.width(), CV_8UC3, const_cast<std::uint8_t*>(img.data().data()));
  Image out(width, height);
  cv::Mat dst(height, width, CV_8UC3, out.data().data());
  cv::resize(src, dst, dst.size(), 0, 0, flag);
  return out;
}

Image resize_to_working(const Image& img, ResizeKernel kernel) {
  return resize(img, kWorkingSize, kWorkingSize, kernel);
}

void build_standin(DatasetName name, std::span<const fs::path> photos, const fs::path& root, int records,
                   std::uint64_t seed) {
  if (photos.empty()) {
    throw ParameterError("stand-in corpus needs at least one source photo");
  }
  if (records < 1) {
    throw ParameterError("stand-in corpus needs at least one record");
  }
  std::vector<Image> sources;
  for (const fs::path& p : photos) {
    sources.push_back(read_image(p));
  }
  const int side = name == DatasetName::Cifar10 ? kCifarSide : kStlSide;
  // Crop side as a fraction of the shorter photo dimension.
  const double lo = name == DatasetName::Cifar10 ? 0.15 : 0.3;
  const double hi = name == DatasetName::Cifar10 ? 0.6 : 0.9;

  for (const Split split : {Split::Test, Split::Train}) {
    RandomStream stream(hash_combine(seed, hash_string(to_string(name) + "/" + to_string(split))));
    const auto files = image_files(name, split);
    for (std::size_t f = 0; f < files.size(); ++f) {
      std::vector<DatasetSample> samples(static_cast<std::size_t>(records));
      for (DatasetSample& s : samples) {
        const auto pick = static_cast<std::size_t>(stream.uniform(sources.size()));
        const Image& photo = sources[pick];
        const int shorter = std::min(photo.width(), photo.height());
        const int crop = std::max(side, static_cast<int>(shorter * (lo + (hi - lo) * stream.unit())));
        const int cx = static_cast<int>(stream.uniform(static_cast<std::uint64_t>(photo.width() - crop + 1)));
        const int cy = static_cast<int>(stream.uniform(static_cast<std::uint64_t>(photo.height() - crop + 1)));
        const Image region = photo.crop(cx, cy, crop, crop);
        const cv::Mat src(crop, crop, CV_8UC3, const_cast<std::uint8_t*>(region.data().data()));
        s.image = Image(side, side);
        cv::Mat dst(side, side, CV_8UC3, s.image.data().data());
        cv::resize(src, dst, dst.size(), 0, 0, cv::INTER_AREA);
        s.label = static_cast<int>(pick % 10) + (name == DatasetName::Stl10 ? 1 : 0);
      }
      std::vector<std::uint8_t> bytes;
      if (name == DatasetName::Cifar10) {
        bytes = serialize_cifar10(samples);
      } else {
        std::vector<Image> images;
        std::vector<std::uint8_t> labels;
        for (const DatasetSample& s : samples) {
          images.push_back(s.image);
          labels.push_back(static_cast<std::uint8_t>(s.label));
        }
        bytes = serialize_stl10_images(images);
        write_file(root / label_file(name, split), labels);
      }
      write_file(root / files[f], bytes);
    }
  }
  write_checksums(name, root);
}

}  // namespace jigsaw
