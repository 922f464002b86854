#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapeguard {

enum class Label { valid, invalid };

std::string to_string(Label label);
/// Accepts "valid"/"invalid" and "0"/"1" (1 = invalid). Throws SchemaError otherwise.
Label parse_label(const std::string& text);

/// Row range [start, end) annotated as the location of an injected error.
struct ErrorAnnotation {
  std::string kind;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Column-labeled numeric table with a designated target column.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::string target);

  /// Adds a column; throws SchemaError on a duplicate name or length mismatch.
  void add_column(const std::string& name, std::vector<double> values);

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  const std::string& target() const noexcept { return target_; }
  void set_target(const std::string& target);

  std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  const std::vector<std::string>& column_names() const noexcept { return names_; }
  bool has_column(const std::string& name) const noexcept;
  /// Throws SchemaError when absent.
  std::span<const double> column(const std::string& name) const;
  std::vector<double>& mutable_column(const std::string& name);
  std::span<const double> target_values() const { return column(target_); }
  /// Every column except the target, in declaration order.
  std::vector<std::string> feature_names() const;

  /// Rows [start, end) as a new dataset with the same schema and label.
  Dataset slice(std::size_t start, std::size_t end) const;

  std::optional<Label> label;
  std::optional<ErrorAnnotation> error;

 private:
  std::string name_;
  std::string target_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// Reads a comma-separated file with a mandatory header row.
/// Throws DataError(row, column) on non-numeric or non-finite cells and
/// SchemaError on a missing target or an empty body.
Dataset load_csv(const std::filesystem::path& path, const std::string& target,
                 std::optional<Label> label = std::nullopt);
Dataset parse_csv(const std::string& text, const std::string& name, const std::string& target,
                  std::optional<Label> label = std::nullopt);

/// Writes LF-terminated CSV with 17 significant digits per cell.
std::string to_csv(const Dataset& data);
void write_csv(const Dataset& data, const std::filesystem::path& path);

struct ColumnScale {
  std::string column;
  double min = 0.0;
  double max = 0.0;
  /// min == max; the column was mapped to 0.
  bool constant = false;
};

/// Per-column (min, max) used to map columns onto [0, 1].
struct ScalingRecord {
  std::vector<ColumnScale> columns;

  const ColumnScale* find(const std::string& column) const;
  double scale_value(const std::string& column, double value) const;
  double unscale_value(const std::string& column, double value) const;
};

/// x' = (x - min) / (max - min) for each named column. Constant columns map to 0
/// and are flagged in the record.
std::pair<Dataset, ScalingRecord> scale_unit(const Dataset& data,
                                             const std::vector<std::string>& columns);
/// Inverse of scale_unit for every column in the record.
Dataset unscale(const Dataset& data, const ScalingRecord& record);

}  // namespace shapeguard
