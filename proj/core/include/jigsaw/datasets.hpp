#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/image.hpp"

namespace jigsaw {

enum class DatasetName { Cifar10, Stl10 };
enum class Split { Train, Test };

DatasetName parse_dataset_name(const std::string& s);  // "cifar10" | "stl10"
std::string to_string(DatasetName d);
Split parse_split(const std::string& s);  // "train" | "test"
std::string to_string(Split s);

// Number of images in the published split (CIFAR-10 test: 10000, STL-10 test: 8000).
int nominal_split_size(DatasetName name, Split split);

struct DatasetSpec {
  DatasetName name = DatasetName::Cifar10;
  Split split = Split::Test;
  int count = 20;
  std::uint64_t seed = 7;
};

void validate(const DatasetSpec& spec);

struct DatasetSample {
  int index = 0;  // record index within the split
  int label = 0;
  Image image;
};

// Record layouts.
inline constexpr std::size_t kCifarRecordBytes = 1 + 32 * 32 * 3;
inline constexpr std::size_t kStlImageBytes = 3 * 96 * 96;

// One label byte then 1024 R, 1024 G, 1024 B samples, rows top to bottom.
std::vector<DatasetSample> parse_cifar10(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_cifar10(std::span<const DatasetSample> samples);

// 3 planes of 96×96, each stored column by column. Labels are a separate
// file of bytes 1..10.
std::vector<Image> parse_stl10_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_stl10_images(std::span<const Image> images);

// Paths of the split's files relative to the dataset root, as laid out by the
// official binary archives.
std::vector<std::filesystem::path> image_files(DatasetName name, Split split);
std::filesystem::path label_file(DatasetName name, Split split);  // empty for CIFAR-10

// Records present on disk for the split.
int available_records(DatasetName name, Split split, const std::filesystem::path& root);

// Sorted record indices: the first `count` entries of a permutation of
// [0, population) drawn from `seed`.
std::vector<int> select_indices(int population, int count, std::uint64_t seed);

// Reads only the selected records. Errors: missing file, truncated record
// (with byte offset), checksum mismatch against the manifest left by fetch.
std::vector<DatasetSample> load(const DatasetSpec& spec, const std::filesystem::path& root);

// Every record of the split.
std::vector<DatasetSample> load_all(DatasetName name, Split split, const std::filesystem::path& root);

enum class ResizeKernel { Bilinear, Bicubic, Nearest };
ResizeKernel parse_resize_kernel(const std::string& s);
std::string to_string(ResizeKernel k);

inline constexpr int kWorkingSize = 224;

Image resize(const Image& img, int width, int height, ResizeKernel kernel = ResizeKernel::Bilinear);
Image resize_to_working(const Image& img, ResizeKernel kernel = ResizeKernel::Bilinear);

// Writes a dataset root in the official binary layouts, filled with crops of
// the given photographs (for machines without access to the real archives).
// Every split file of `name` gets `records` images.
void build_standin(DatasetName name, std::span<const std::filesystem::path> photos,
                   const std::filesystem::path& root, int records, std::uint64_t seed);

}  // namespace jigsaw
