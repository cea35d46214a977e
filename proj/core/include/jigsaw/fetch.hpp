#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/datasets.hpp"

namespace jigsaw {

// Where an official archive lives and what it must hash to.
struct ArchiveSource {
  DatasetName name = DatasetName::Cifar10;
  std::string url;
  std::string md5;
  std::string archive_name;
};

ArchiveSource default_source(DatasetName name);

// JSON list of {"name", "url", "md5", "archive"} objects; entries override
// the built-in defaults.
std::vector<ArchiveSource> read_source_manifest(const std::filesystem::path& path);

std::string md5_hex(std::span<const std::uint8_t> bytes);
std::string md5_file(const std::filesystem::path& path);

// Any URL libcurl understands (http, https, file). Throws Error on failure.
void download(const std::string& url, const std::filesystem::path& dest);

// Extracts regular files from a gzip-compressed tar archive. When `wanted` is
// non-empty only members with those paths are written. Returns the written
// member paths.
std::vector<std::filesystem::path> extract_tar_gz(const std::filesystem::path& archive,
                                                  const std::filesystem::path& dest,
                                                  std::span<const std::filesystem::path> wanted = {});

// `<root>/<name>.md5`: one "digest  relative/path" line per split file.
std::filesystem::path checksum_file(DatasetName name, const std::filesystem::path& root);
void write_checksums(DatasetName name, const std::filesystem::path& root);
// No-op when no checksum file exists; FormatError on a mismatch.
void verify_checksums(DatasetName name, Split split, const std::filesystem::path& root);

// Downloads (unless a verified copy is cached in root), checks the archive
// digest, extracts the split files and records their checksums.
void fetch(const ArchiveSource& source, const std::filesystem::path& root);

}  // namespace jigsaw
