#include "jigsaw/fetch.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "jigsaw/error.hpp"

namespace jigsaw {
namespace fs = std::filesystem;

namespace {

std::string hex(const unsigned char* digest, unsigned len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kDigits[digest[i] >> 4]);
    out.push_back(kDigits[digest[i] & 15]);
  }
  return out;
}

class Md5 {
 public:
  Md5() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_md5(), nullptr) != 1) {
      throw Error("md5: cannot initialise digest");
    }
  }
  void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_.get(), data, len); }
  std::string finish() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &len);
    return hex(digest, len);
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::size_t write_to_stream(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
  auto* out = static_cast<std::ofstream*>(userdata);
  out->write(ptr, static_cast<std::streamsize>(size * nmemb));
  return *out ? size * nmemb : 0;
}

std::uint64_t parse_octal(const char* field, std::size_t len) {
  std::uint64_t v = 0;
  std::size_t i = 0;
  while (i < len && field[i] == ' ') {
    ++i;
  }
  for (; i < len && field[i] != '\0' && field[i] != ' '; ++i) {
    if (field[i] < '0' || field[i] > '7') {
      throw FormatError("tar: bad octal field");
    }
    v = v * 8 + static_cast<std::uint64_t>(field[i] - '0');
  }
  return v;
}

std::string field_string(const char* field, std::size_t len) {
  return std::string(field, strnlen(field, len));
}

class GzReader {
 public:
  explicit GzReader(const fs::path& path) : file_(gzopen(path.string().c_str(), "rb")) {
    if (file_ == nullptr) {
      throw FormatError("cannot open archive " + path.string());
    }
  }
  ~GzReader() { gzclose(file_); }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;

  // Reads exactly len bytes; false on a clean end of stream before any byte.
  bool read(char* dst, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
      const int n = gzread(file_, dst + got, static_cast<unsigned>(std::min<std::size_t>(len - got, 1 << 20)));
      if (n < 0) {
        int err = 0;
        throw FormatError(std::string("archive: ") + gzerror(file_, &err));
      }
      if (n == 0) {
        if (got == 0) {
          return false;
        }
        throw FormatError("archive: truncated member");
      }
      got += static_cast<std::size_t>(n);
    }
    return true;
  }

 private:
  gzFile file_;
};

std::vector<fs::path> split_files(DatasetName name) {
  std::vector<fs::path> files;
  for (const Split split : {Split::Test, Split::Train}) {
    for (const fs::path& p : image_files(name, split)) {
      files.push_back(p);
    }
    const fs::path labels = label_file(name, split);
    if (!labels.empty()) {
      files.push_back(labels);
    }
  }
  return files;
}

}  // namespace

ArchiveSource default_source(DatasetName name) {
  if (name == DatasetName::Cifar10) {
    return {name, "https://www.cs.toronto.edu/~kriz/cifar-10-binary.tar.gz",
            "c32a1d4ab5d03f1284b67883e8d87530", "cifar-10-binary.tar.gz"};
  }
  return {name, "http://ai.stanford.edu/~acoates/stl10/stl10_binary.tar.gz",
          "91f7769df0f17e558f3565bffb0c7dfb", "stl10_binary.tar.gz"};
}

std::vector<ArchiveSource> read_source_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot read manifest " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw FormatError("manifest " + path.string() + " must be a JSON list");
  }
  std::vector<ArchiveSource> out;
  for (const auto& entry : doc) {
    ArchiveSource src = default_source(parse_dataset_name(entry.at("name").get<std::string>()));
    src.url = entry.value("url", src.url);
    src.md5 = entry.value("md5", src.md5);
    src.archive_name = entry.value("archive", src.archive_name);
    out.push_back(src);
  }
  return out;
}

std::string md5_hex(std::span<const std::uint8_t> bytes) {
  Md5 md5;
  md5.update(bytes.data(), bytes.size());
  return md5.finish();
}

std::string md5_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("missing file: " + path.string());
  }
  Md5 md5;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    md5.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return md5.finish();
}

void download(const std::string& url, const fs::path& dest) {
  if (dest.has_parent_path()) {
    fs::create_directories(dest.parent_path());
  }
  const fs::path partial = dest.string() + ".part";
  {
    std::ofstream out(partial, std::ios::binary);
    if (!out) {
      throw Error("cannot write " + partial.string());
    }
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) {
      throw Error("curl: cannot initialise");
    }
    char errbuf[CURL_ERROR_SIZE] = {};
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, write_to_stream);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &out);
    const CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) {
      out.close();
      fs::remove(partial);
      throw Error("download " + url + " failed: " + (errbuf[0] ? errbuf : curl_easy_strerror(rc)));
    }
  }
  fs::rename(partial, dest);
}

std::vector<fs::path> extract_tar_gz(const fs::path& archive, const fs::path& dest,
                                     std::span<const fs::path> wanted) {
  GzReader gz(archive);
  std::vector<fs::path> written;
  std::array<char, 512> header{};
  std::string long_name;
  std::vector<char> buf(1 << 20);

  while (gz.read(header.data(), header.size())) {
    if (std::all_of(header.begin(), header.end(), [](char c) { return c == '\0'; })) {
      break;
    }
    const std::uint64_t size = parse_octal(&header[124], 12);
    const char type = header[156];
    std::string name = field_string(&header[0], 100);
    const std::string prefix = field_string(&header[345], 155);
    if (std::string_view(&header[257], 5) == "ustar" && !prefix.empty()) {
      name = prefix + "/" + name;
    }
    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    const std::uint64_t padded = (size + 511) / 512 * 512;

    if (type == 'L') {  // GNU long name for the next member
      std::string data(padded, '\0');
      gz.read(data.data(), padded);
      long_name = field_string(data.data(), size);
      continue;
    }
    const fs::path rel = fs::path(name).lexically_normal();
    const bool regular = type == '0' || type == '\0';
    const bool keep = regular && (wanted.empty() || std::find(wanted.begin(), wanted.end(), rel) != wanted.end());
    if (keep && (rel.is_absolute() || (!rel.empty() && *rel.begin() == ".."))) {
      throw FormatError("archive member escapes destination: " + name);
    }
    std::ofstream out;
    if (keep) {
      fs::create_directories((dest / rel).parent_path());
      out.open(dest / rel, std::ios::binary);
      if (!out) {
        throw Error("cannot write " + (dest / rel).string());
      }
    }
    std::uint64_t left = padded;
    std::uint64_t payload = size;
    while (left > 0) {
      const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(left, buf.size()));
      gz.read(buf.data(), chunk);
      if (keep) {
        const auto useful = static_cast<std::streamsize>(std::min<std::uint64_t>(chunk, payload));
        out.write(buf.data(), useful);
        payload -= static_cast<std::uint64_t>(useful);
      }
      left -= chunk;
    }
    if (keep) {
      written.push_back(rel);
    }
  }
  return written;
}

fs::path checksum_file(DatasetName name, const fs::path& root) { return root / (to_string(name) + ".md5"); }

void write_checksums(DatasetName name, const fs::path& root) {
  std::ostringstream text;
  for (const fs::path& rel : split_files(name)) {
    if (fs::exists(root / rel)) {
      text << md5_file(root / rel) << "  " << rel.generic_string() << "\n";
    }
  }
  std::ofstream out(checksum_file(name, root));
  out << text.str();
  if (!out) {
    throw Error("cannot write " + checksum_file(name, root).string());
  }
}

void verify_checksums(DatasetName name, Split split, const fs::path& root) {
  const fs::path sums = checksum_file(name, root);
  if (!fs::exists(sums)) {
    return;
  }
  std::vector<fs::path> needed = image_files(name, split);
  if (!label_file(name, split).empty()) {
    needed.push_back(label_file(name, split));
  }
  std::ifstream in(sums);
  std::string digest;
  std::string rel;
  while (in >> digest >> rel) {
    if (std::find(needed.begin(), needed.end(), fs::path(rel)) == needed.end()) {
      continue;
    }
    if (!fs::exists(root / rel)) {
      throw FormatError("missing file: " + (root / rel).string());
    }
    const std::string actual = md5_file(root / rel);
    if (actual != digest) {
      throw FormatError("checksum mismatch for " + (root / rel).string() + ": expected " + digest + ", got " +
                        actual);
    }
  }
}

void fetch(const ArchiveSource& source, const fs::path& root) {
  fs::create_directories(root);
  const fs::path archive = root / source.archive_name;
  if (!fs::exists(archive) || md5_file(archive) != source.md5) {
    download(source.url, archive);
  }
  const std::string actual = md5_file(archive);
  if (actual != source.md5) {
    throw FormatError("checksum mismatch for " + archive.string() + ": expected " + source.md5 + ", got " +
                      actual);
  }
  const std::vector<fs::path> files = split_files(source.name);
  const auto written = extract_tar_gz(archive, root, files);
  if (written.empty()) {
    throw FormatError("archive " + archive.string() + " holds none of the expected split files");
  }
  write_checksums(source.name, root);
}

}  // namespace jigsaw
