#pragma once

// Plain-text result grids: one header line, then one line of values per row.
//
//   #grid v1 | rows name=range unit=m kind=lin start=0 step=0.29 n=512 | cols ... | values name=power unit=dB |
//     hash=... seeds=1,2 version=0.3.0
//
// (all on one line). Axis kinds: lin (start + k step), sin (asin(start + k
// step)), list (explicit values=a,b,c) and labels (labels=x,y; values 0..n-1).
// Numbers are written with 17 significant digits so a read-back is bit-exact.

#include <cstdint>
#include <string>
#include <vector>

#include "isac/linalg.hpp"

namespace isac {

struct GridAxis {
  enum class Kind { lin, sin, list, labels };

  std::string name;
  std::string unit;
  Kind kind = Kind::list;
  double start = 0.0;
  double step = 0.0;
  int n = 0;
  std::vector<double> list;
  std::vector<std::string> labels;

  static GridAxis linear(std::string name, std::string unit, double start, double step, int n);
  static GridAxis sine(std::string name, std::string unit, double start, double step, int n);
  static GridAxis listed(std::string name, std::string unit, std::vector<double> values);
  static GridAxis labelled(std::string name, std::vector<std::string> labels);

  [[nodiscard]] int size() const;
  [[nodiscard]] std::vector<double> values() const;
  bool operator==(const GridAxis&) const = default;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::string version;
  bool operator==(const Provenance&) const = default;
};

struct ResultGrid {
  GridAxis rows;
  GridAxis cols;
  std::string quantity;
  std::string unit;
  RMatrix values;
  Provenance provenance;

  /// Value count must equal the product of the axis lengths; names carry no
  /// whitespace or separators.
  void validate() const;
};

std::string format_grid(const ResultGrid& grid);
ResultGrid parse_grid(const std::string& text);

void write_grid(const std::string& path, const ResultGrid& grid);
ResultGrid read_grid(const std::string& path);

}  // namespace isac
