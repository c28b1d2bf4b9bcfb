// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "bagchain/chain/encoding.hpp"

namespace bagchain::ml {

Dataset::Dataset(std::size_t cols, std::uint32_t num_classes, DatasetRole role)
    : cols_(cols), num_classes_(num_classes), role_(role) {
  if (cols == 0) throw DatasetError("dataset needs at least one feature column");
}

Dataset::Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t cols,
                 std::uint32_t num_classes, DatasetRole role)
    : cols_(cols), num_classes_(num_classes), role_(role), features_(std::move(features)), labels_(std::move(labels)) {
  if (cols_ == 0) throw DatasetError("dataset needs at least one feature column");
  if (features_.size() != labels_.size() * cols_) throw DatasetError("feature row count does not match label count");
  for (auto y : labels_)
    if (y >= num_classes_) throw DatasetError("label " + std::to_string(y) + " out of range");
}

void Dataset::push_back(std::span<const double> x, Label y) {
  if (x.size() != cols_) throw DatasetError("row width does not match dataset");
  if (y >= num_classes_) throw DatasetError("label " + std::to_string(y) + " out of range");
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(y);
}

void Dataset::reserve(std::size_t n) {
  features_.reserve(n * cols_);
  labels_.reserve(n);
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes_, 0);
  for (auto y : labels_) ++counts[y];
  return counts;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows, DatasetRole role) {
  Dataset out(data.cols(), data.num_classes(), role);
  out.reserve(rows.size());
  for (auto r : rows) {
    if (r >= data.rows()) throw DatasetError("subset row index out of range");
    out.push_back(data.row(r), data.label(r));
  }
  return out;
}

Dataset concat(const Dataset& a, const Dataset& b, DatasetRole role) {
  if (a.cols() != b.cols() || a.num_classes() != b.num_classes())
    throw DatasetError("cannot concatenate datasets of different shape");
  Dataset out(a.cols(), a.num_classes(), role);
  out.reserve(a.rows() + b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(a.row(i), a.label(i));
  for (std::size_t i = 0; i < b.rows(); ++i) out.push_back(b.row(i), b.label(i));
  return out;
}

HashDigest commitment(const Dataset& data) {
  Encoder enc;
  enc.u8(static_cast<std::uint8_t>(data.role()))
      .u64(data.rows())
      .u64(data.cols())
      .u32(data.num_classes());
  for (double v : data.features()) enc.f64(v);
  for (auto y : data.labels()) enc.u32(y);
  return enc.hash();
}

namespace {
std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}
}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::uint32_t num_classes, DatasetRole role) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DatasetError("dataset file is empty: " + path.string());
  auto header = split_commas(trim(line));
  if (header.size() < 2 || trim(header.back()) != "label")
    throw DatasetError("dataset header must be f0,...,f{d-1},label");
  const std::size_t cols = header.size() - 1;
  for (std::size_t j = 0; j < cols; ++j)
    if (trim(header[j]) != "f" + std::to_string(j)) throw DatasetError("unexpected header column '" + std::string(header[j]) + "'");

  std::vector<double> features;
  std::vector<Label> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) continue;
    auto cells = split_commas(t);
    if (cells.size() != cols + 1) throw DatasetError("wrong column count on line " + std::to_string(line_no));
    for (std::size_t j = 0; j < cols; ++j) {
      auto cell = trim(cells[j]);
      double v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DatasetError("bad number on line " + std::to_string(line_no));
      features.push_back(v);
    }
    auto lc = trim(cells.back());
    Label y = 0;
    auto [ptr, ec] = std::from_chars(lc.data(), lc.data() + lc.size(), y);
    if (ec != std::errc{} || ptr != lc.data() + lc.size())
      throw DatasetError("bad label on line " + std::to_string(line_no));
    labels.push_back(y);
  }
  if (num_classes == 0) {
    for (auto y : labels) num_classes = std::max(num_classes, y + 1);
  }
  return Dataset(std::move(features), std::move(labels), cols, num_classes, role);
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset file " + path.string());
  for (std::size_t j = 0; j < data.cols(); ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data.at(i, j));
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << data.label(i) << '\n';
  }
}

}  // namespace bagchain::ml
