#include "shapeguard/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shapeguard/error.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

std::string to_string(Label label) { return label == Label::valid ? "valid" : "invalid"; }

Label parse_label(const std::string& text) {
  const std::string t = trim(text);
  if (t == "valid" || t == "0") return Label::valid;
  if (t == "invalid" || t == "1") return Label::invalid;
  throw SchemaError("unknown label '" + t + "'");
}

Dataset::Dataset(std::string name, std::string target)
    : name_(std::move(name)), target_(std::move(target)) {}

void Dataset::add_column(const std::string& name, std::vector<double> values) {
  if (has_column(name)) throw SchemaError("duplicate column '" + name + "'");
  if (!columns_.empty() && values.size() != rows()) {
    throw SchemaError("column '" + name + "' has " + std::to_string(values.size()) +
                      " rows, expected " + std::to_string(rows()));
  }
  names_.push_back(name);
  columns_.push_back(std::move(values));
}

void Dataset::set_target(const std::string& target) {
  if (!has_column(target)) throw SchemaError("missing target column '" + target + "'");
  target_ = target;
}

bool Dataset::has_column(const std::string& name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> Dataset::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw SchemaError("missing column '" + name + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

std::vector<double>& Dataset::mutable_column(const std::string& name) {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw SchemaError("missing column '" + name + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> out;
  for (const auto& n : names_) {
    if (n != target_) out.push_back(n);
  }
  return out;
}

Dataset Dataset::slice(std::size_t start, std::size_t end) const {
  Dataset out(name_, target_);
  out.label = label;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    out.add_column(names_[c], std::vector<double>(columns_[c].begin() + static_cast<long>(start),
                                                  columns_[c].begin() + static_cast<long>(end)));
  }
  return out;
}

Dataset parse_csv(const std::string& text, const std::string& name, const std::string& target,
                  std::optional<Label> label) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(name + ": missing header row");
  const std::vector<std::string> header = split_commas(line);
  std::vector<std::vector<double>> cols(header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError(name + ": row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header.size()),
                      row, "");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = parse_number(cells[c]);
      if (!value || !std::isfinite(*value)) {
        throw DataError(name + ": row " + std::to_string(row) + ", column '" + header[c] +
                            "': not a finite number: '" + cells[c] + "'",
                        row, header[c]);
      }
      cols[c].push_back(*value);
    }
  }
  if (cols.empty() || cols.front().empty()) throw SchemaError(name + ": no data rows");
  Dataset data(name, target);
  for (std::size_t c = 0; c < header.size(); ++c) data.add_column(header[c], std::move(cols[c]));
  if (!data.has_column(target)) throw SchemaError(name + ": missing target column '" + target + "'");
  data.label = label;
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target,
                 std::optional<Label> label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.stem().string(), target, label);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const auto& names = data.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  out += '\n';
  std::vector<std::span<const double>> cols;
  for (const auto& n : names) cols.push_back(data.column(n));
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      out += format_double(cols[c][r]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << to_csv(data);
}

const ColumnScale* ScalingRecord::find(const std::string& column) const {
  for (const auto& c : columns) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

double ScalingRecord::scale_value(const std::string& column, double value) const {
  const ColumnScale* c = find(column);
  if (!c) return value;
  if (c->constant) return 0.0;
  return (value - c->min) / (c->max - c->min);
}

double ScalingRecord::unscale_value(const std::string& column, double value) const {
  const ColumnScale* c = find(column);
  if (!c) return value;
  if (c->constant) return c->min;
  return c->min + value * (c->max - c->min);
}

std::pair<Dataset, ScalingRecord> scale_unit(const Dataset& data,
                                             const std::vector<std::string>& columns) {
  Dataset out = data;
  ScalingRecord record;
  for (const auto& name : columns) {
    std::vector<double>& values = out.mutable_column(name);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    ColumnScale scale{name, *mn, *mx, !(*mx > *mn)};
    for (double& v : values) v = scale.constant ? 0.0 : (v - scale.min) / (scale.max - scale.min);
    record.columns.push_back(scale);
  }
  return {std::move(out), std::move(record)};
}

Dataset unscale(const Dataset& data, const ScalingRecord& record) {
  Dataset out = data;
  for (const auto& scale : record.columns) {
    for (double& v : out.mutable_column(scale.column)) v = record.unscale_value(scale.column, v);
  }
  return out;
}

}  // namespace shapeguard
