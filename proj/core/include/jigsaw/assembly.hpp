#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jigsaw/dihedral.hpp"

namespace jigsaw {

// rows×cols grid of block identifiers, row-major.
struct Assembly {
  int rows = 0;
  int cols = 0;
  std::vector<int> cells;

  int at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return cells.size(); }

  // Every id in [0, rows*cols) appears exactly once.
  bool is_bijection() const;

  friend bool operator==(const Assembly&, const Assembly&) = default;
};

Assembly identity_assembly(int rows, int cols);

// Whole-grid dihedral transform of a square assembly: cell (r, c) of the
// result holds the id at o.source(n, r, c). Non-square grids only accept the
// identity.
Assembly transform(const Assembly& a, Orientation o);

// CSV: one grid row per line, ids separated by commas.
std::string format_assembly_csv(const Assembly& a);
Assembly parse_assembly_csv(const std::string& text);
Assembly read_assembly_csv(const std::filesystem::path& path);
void write_assembly_csv(const std::filesystem::path& path, const Assembly& a);

}  // namespace jigsaw
