#include "isac/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace isac {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double read_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("grid: bad number '" + s + "'");
  return v;
}

std::uint64_t read_u64(const std::string& s, int base) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("grid: bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

void check_token(const std::string& s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("grid: empty ") + what);
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '|' || c == '=' || c == ',') {
      throw std::invalid_argument(std::string("grid: ") + what + " '" + s + "' contains a separator");
    }
  }
}

const char* kind_name(GridAxis::Kind k) {
  switch (k) {
    case GridAxis::Kind::lin: return "lin";
    case GridAxis::Kind::sin: return "sin";
    case GridAxis::Kind::list: return "list";
    case GridAxis::Kind::labels: return "labels";
  }
  return "?";
}

std::string format_axis(const char* role, const GridAxis& ax) {
  std::string out = std::string(role) + " name=" + ax.name + " unit=" + ax.unit + " kind=" + kind_name(ax.kind);
  switch (ax.kind) {
    case GridAxis::Kind::lin:
    case GridAxis::Kind::sin:
      out += " start=" + fmt_double(ax.start) + " step=" + fmt_double(ax.step) + " n=" + std::to_string(ax.n);
      break;
    case GridAxis::Kind::list: {
      out += " values=";
      for (std::size_t k = 0; k < ax.list.size(); ++k) out += (k ? "," : "") + fmt_double(ax.list[k]);
      break;
    }
    case GridAxis::Kind::labels: {
      out += " labels=";
      for (std::size_t k = 0; k < ax.labels.size(); ++k) out += (k ? "," : "") + ax.labels[k];
      break;
    }
  }
  return out;
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& tokens, std::size_t first) {
  std::map<std::string, std::string> kv;
  for (std::size_t k = first; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid: expected key=value, got '" + tokens[k] + "'");
    kv[tokens[k].substr(0, eq)] = tokens[k].substr(eq + 1);
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::invalid_argument("grid: header is missing '" + key + "'");
  return it->second;
}

GridAxis parse_axis(const std::string& field, const char* role) {
  const auto tokens = words(field);
  if (tokens.empty() || tokens[0] != role) throw std::invalid_argument(std::string("grid: expected ") + role + " field");
  const auto kv = key_values(tokens, 1);
  GridAxis ax;
  ax.name = need(kv, "name");
  ax.unit = need(kv, "unit");
  const std::string& kind = need(kv, "kind");
  if (kind == "lin" || kind == "sin") {
    ax.kind = kind == "lin" ? GridAxis::Kind::lin : GridAxis::Kind::sin;
    ax.start = read_double(need(kv, "start"));
    ax.step = read_double(need(kv, "step"));
    ax.n = static_cast<int>(read_u64(need(kv, "n"), 10));
  } else if (kind == "list") {
    ax.kind = GridAxis::Kind::list;
    for (const auto& v : split(need(kv, "values"), ',')) ax.list.push_back(read_double(v));
    ax.n = static_cast<int>(ax.list.size());
  } else if (kind == "labels") {
    ax.kind = GridAxis::Kind::labels;
    ax.labels = split(need(kv, "labels"), ',');
    ax.n = static_cast<int>(ax.labels.size());
  } else {
    throw std::invalid_argument("grid: unknown axis kind '" + kind + "'");
  }
  return ax;
}

}  // namespace

GridAxis GridAxis::linear(std::string name, std::string unit, double start, double step, int n) {
  GridAxis ax{std::move(name), std::move(unit), Kind::lin, start, step, n, {}, {}};
  return ax;
}

GridAxis GridAxis::sine(std::string name, std::string unit, double start, double step, int n) {
  GridAxis ax{std::move(name), std::move(unit), Kind::sin, start, step, n, {}, {}};
  return ax;
}

GridAxis GridAxis::listed(std::string name, std::string unit, std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  GridAxis ax{std::move(name), std::move(unit), Kind::list, 0.0, 0.0, n, std::move(values), {}};
  return ax;
}

GridAxis GridAxis::labelled(std::string name, std::vector<std::string> labels) {
  const int n = static_cast<int>(labels.size());
  GridAxis ax{std::move(name), "1", Kind::labels, 0.0, 0.0, n, {}, std::move(labels)};
  return ax;
}

int GridAxis::size() const {
  switch (kind) {
    case Kind::list: return static_cast<int>(list.size());
    case Kind::labels: return static_cast<int>(labels.size());
    default: return n;
  }
}

std::vector<double> GridAxis::values() const {
  std::vector<double> out(static_cast<std::size_t>(size()));
  for (int k = 0; k < size(); ++k) {
    double v = 0.0;
    switch (kind) {
      case Kind::lin: v = start + k * step; break;
      case Kind::sin: v = std::asin(start + k * step); break;
      case Kind::list: v = list[static_cast<std::size_t>(k)]; break;
      case Kind::labels: v = k; break;
    }
    out[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

void ResultGrid::validate() const {
  check_token(rows.name, "row axis name");
  check_token(rows.unit, "row axis unit");
  check_token(cols.name, "column axis name");
  check_token(cols.unit, "column axis unit");
  check_token(quantity, "quantity");
  check_token(unit, "unit");
  for (const auto& l : rows.labels) check_token(l, "label");
  for (const auto& l : cols.labels) check_token(l, "label");
  check_token(provenance.version, "version");
  if (values.rows() != rows.size() || values.cols() != cols.size()) {
    throw std::invalid_argument("grid: value count does not match the axis lengths");
  }
}

std::string format_grid(const ResultGrid& grid) {
  grid.validate();
  std::string out = "#grid v1 | " + format_axis("rows", grid.rows) + " | " + format_axis("cols", grid.cols) +
                    " | values name=" + grid.quantity + " unit=" + grid.unit + " | ";
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(grid.provenance.config_hash));
  out += std::string("hash=") + hash + " seeds=";
  for (std::size_t k = 0; k < grid.provenance.seeds.size(); ++k) {
    out += (k ? "," : "") + std::to_string(grid.provenance.seeds[k]);
  }
  out += " version=" + grid.provenance.version + "\n";
  for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.values.cols(); ++c) {
      if (c) out += ' ';
      out += fmt_double(grid.values(r, c));
    }
    out += '\n';
  }
  return out;
}

ResultGrid parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string header;
  if (!std::getline(ss, header)) throw std::invalid_argument("grid: empty input");
  const auto fields = split(header, '|');
  if (fields.size() != 5 || words(fields[0]) != std::vector<std::string>{"#grid", "v1"}) {
    throw std::invalid_argument("grid: unrecognised header");
  }
  ResultGrid g;
  g.rows = parse_axis(fields[1], "rows");
  g.cols = parse_axis(fields[2], "cols");
  {
    const auto tokens = words(fields[3]);
    if (tokens.empty() || tokens[0] != "values") throw std::invalid_argument("grid: expected values field");
    const auto kv = key_values(tokens, 1);
    g.quantity = need(kv, "name");
    g.unit = need(kv, "unit");
  }
  {
    const auto kv = key_values(words(fields[4]), 0);
    g.provenance.config_hash = read_u64(need(kv, "hash"), 16);
    for (const auto& s : split(need(kv, "seeds"), ',')) g.provenance.seeds.push_back(read_u64(s, 10));
    g.provenance.version = need(kv, "version");
  }
  g.values.resize(g.rows.size(), g.cols.size());
  std::string line;
  for (Eigen::Index r = 0; r < g.values.rows(); ++r) {
    if (!std::getline(ss, line)) throw std::invalid_argument("grid: fewer rows than the header declares");
    const auto row = words(line);
    if (static_cast<Eigen::Index>(row.size()) != g.values.cols()) {
      throw std::invalid_argument("grid: row " + std::to_string(r) + " has the wrong number of values");
    }
    for (Eigen::Index c = 0; c < g.values.cols(); ++c) g.values(r, c) = read_double(row[static_cast<std::size_t>(c)]);
  }
  while (std::getline(ss, line)) {
    if (!words(line).empty()) throw std::invalid_argument("grid: trailing data after the declared rows");
  }
  g.validate();
  return g;
}

void write_grid(const std::string& path, const ResultGrid& grid) {
  const std::string text = format_grid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ResultGrid read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid(ss.str());
}

}  // namespace isac
