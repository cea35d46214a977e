#include "jigsaw/assembly.hpp"

#include <numeric>
#include <sstream>

#include "jigsaw/error.hpp"
#include "jigsaw/image_io.hpp"

namespace jigsaw {

bool Assembly::is_bijection() const {
  if (rows <= 0 || cols <= 0 || cells.size() != static_cast<std::size_t>(rows) * cols) {
    return false;
  }
  std::vector<char> seen(cells.size(), 0);
  for (const int id : cells) {
    if (id < 0 || static_cast<std::size_t>(id) >= cells.size() || seen[id]) {
      return false;
    }
    seen[id] = 1;
  }
  return true;
}

Assembly identity_assembly(int rows, int cols) {
  Assembly a{rows, cols, std::vector<int>(static_cast<std::size_t>(rows) * cols)};
  std::iota(a.cells.begin(), a.cells.end(), 0);
  return a;
}

Assembly transform(const Assembly& a, Orientation o) {
  if (o.is_identity()) {
    return a;
  }
  if (a.rows != a.cols) {
    throw ShapeError("dihedral transforms need a square grid");
  }
  Assembly out = a;
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) {
      const auto [sr, sc] = o.source(a.rows, r, c);
      out.cells[static_cast<std::size_t>(r) * a.cols + c] = a.at(sr, sc);
    }
  }
  return out;
}

std::string format_assembly_csv(const Assembly& a) {
  std::ostringstream out;
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) {
      out << (c ? "," : "") << a.at(r, c);
    }
    out << '\n';
  }
  return out.str();
}

Assembly parse_assembly_csv(const std::string& text) {
  Assembly a;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    int count = 0;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        a.cells.push_back(std::stoi(field, &used));
        if (used != field.size()) {
          throw FormatError("assembly csv: bad id '" + field + "'");
        }
      } catch (const std::logic_error&) {
        throw FormatError("assembly csv: bad id '" + field + "'");
      }
      ++count;
    }
    if (a.rows == 0) {
      a.cols = count;
    } else if (count != a.cols) {
      throw FormatError("assembly csv: ragged row " + std::to_string(a.rows + 1));
    }
    ++a.rows;
  }
  if (a.rows == 0) {
    throw FormatError("assembly csv: empty grid");
  }
  return a;
}

Assembly read_assembly_csv(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_assembly_csv(std::string(bytes.begin(), bytes.end()));
}

void write_assembly_csv(const std::filesystem::path& path, const Assembly& a) {
  const std::string text = format_assembly_csv(a);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace jigsaw
