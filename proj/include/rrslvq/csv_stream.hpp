#ifndef RRSLVQ_CSV_STREAM_HPP_
#define RRSLVQ_CSV_STREAM_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrslvq/core.hpp"

namespace rrslvq {

class CsvFormatError : public std::runtime_error {
 public:
  CsvFormatError(const std::string& file, std::size_t row, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

enum class LabelMapping {
  first_seen,  ///< raw labels get dense ids in order of first appearance
  integer,     ///< raw labels are already integers in [0, C)
};

struct CsvOptions {
  bool header = false;
  LabelMapping labels = LabelMapping::first_seen;
  /// Trailing drift_truth column after the label. Auto-enabled when the header's
  /// last field is "drift_truth".
  bool truth_column = false;
  /// Declared class count; inferred by a label scan when absent.
  std::optional<std::size_t> classes;
  std::string name;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

}  // namespace detail

/**
 * Streams labeled rows from a numeric CSV file with constant memory.
 *
 * The last column is the class label (or the second to last when a drift_truth
 * column trails it). When the class count is not declared, the file is scanned
 * once up front to collect the distinct labels; only the label set is kept.
 */
class CsvStream final : public StreamSource {
 public:
  CsvStream(std::string path, CsvOptions options)
      : path_(std::move(path)), options_(std::move(options)) {
    std::ifstream probe(path_);
    if (!probe) throw std::runtime_error("cannot open " + path_);
    std::string line;
    std::size_t row = 0;
    std::size_t columns = 0;
    std::vector<double> seen;
    if (options_.header) {
      if (std::getline(probe, line)) {
        ++row;
        const auto fields = detail::split_fields(line);
        if (!fields.empty() && fields.back() == "drift_truth") options_.truth_column = true;
      }
    }
    const std::size_t trailing = options_.truth_column ? 2 : 1;
    std::size_t count = 0;
    while (std::getline(probe, line)) {
      ++row;
      if (detail::trim(line).empty()) continue;
      const auto fields = detail::split_fields(line);
      if (columns == 0) {
        if (fields.size() <= trailing) {
          throw CsvFormatError(path_, row, "need at least one feature column");
        }
        columns = fields.size();
      }
      if (fields.size() != columns) {
        throw CsvFormatError(path_, row, "expected " + std::to_string(columns) + " columns, got " +
                                             std::to_string(fields.size()));
      }
      ++count;
      if (options_.classes) continue;
      const auto raw = detail::parse_double(fields[columns - trailing]);
      if (!raw) throw CsvFormatError(path_, row, "non-numeric label");
      if (std::find(seen.begin(), seen.end(), *raw) == seen.end()) seen.push_back(*raw);
    }
    if (columns == 0) {
      // Empty file: dimensionality cannot be inferred.
      throw CsvFormatError(path_, row, "no data rows");
    }
    meta_.d = columns - trailing;
    meta_.classes = options_.classes ? *options_.classes : std::max<std::size_t>(2, seen.size());
    if (options_.labels == LabelMapping::integer && !options_.classes) {
      double top = 0.0;
      for (double v : seen) top = std::max(top, v);
      meta_.classes = std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1);
    }
    meta_.name = options_.name.empty() ? path_ : options_.name;
    meta_.length_hint = count;
    meta_.validate();
    columns_ = columns;
    rewind();
  }

  const StreamMeta& meta() const override { return meta_; }
  bool has_drift_truth() const override { return options_.truth_column; }

  void rewind() {
    in_ = std::ifstream(path_);
    if (!in_) throw std::runtime_error("cannot open " + path_);
    row_ = 0;
    raw_labels_.clear();
    if (options_.header) {
      std::string skip;
      if (std::getline(in_, skip)) ++row_;
    }
  }

  std::optional<StreamEvent> next() override {
    std::string line;
    while (std::getline(in_, line)) {
      ++row_;
      if (detail::trim(line).empty()) continue;
      return parse_row(line);
    }
    return std::nullopt;
  }

 private:
  StreamEvent parse_row(const std::string& line) {
    const auto fields = detail::split_fields(line);
    if (fields.size() != columns_) {
      throw CsvFormatError(path_, row_, "expected " + std::to_string(columns_) + " columns, got " +
                                            std::to_string(fields.size()));
    }
    StreamEvent event;
    event.sample.x.resize(meta_.d);
    for (std::size_t i = 0; i < meta_.d; ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) throw CsvFormatError(path_, row_, "non-numeric value in column " + std::to_string(i + 1));
      event.sample.x[i] = *v;
    }
    const auto raw = detail::parse_double(fields[meta_.d]);
    if (!raw) throw CsvFormatError(path_, row_, "non-numeric label");
    event.sample.y = map_label(*raw);
    if (options_.truth_column) {
      const auto truth = detail::parse_double(fields[meta_.d + 1]);
      if (!truth) throw CsvFormatError(path_, row_, "non-numeric drift_truth");
      event.drift = *truth != 0.0;
    }
    return event;
  }

  Label map_label(double raw) {
    if (options_.labels == LabelMapping::integer) {
      if (raw < 0 || raw != std::floor(raw) || raw >= static_cast<double>(meta_.classes)) {
        throw CsvFormatError(path_, row_, "label outside [0, " + std::to_string(meta_.classes) + ")");
      }
      return static_cast<Label>(raw);
    }
    const auto it = std::find(raw_labels_.begin(), raw_labels_.end(), raw);
    if (it != raw_labels_.end()) return static_cast<Label>(it - raw_labels_.begin());
    if (raw_labels_.size() >= meta_.classes) {
      throw CsvFormatError(path_, row_, "more than " + std::to_string(meta_.classes) + " distinct labels");
    }
    raw_labels_.push_back(raw);
    return static_cast<Label>(raw_labels_.size() - 1);
  }

  std::string path_;
  CsvOptions options_;
  StreamMeta meta_;
  std::size_t columns_ = 0;
  std::ifstream in_;
  std::size_t row_ = 0;
  std::vector<double> raw_labels_;
};

}  // namespace rrslvq

#endif  // RRSLVQ_CSV_STREAM_HPP_
