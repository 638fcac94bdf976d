// SPDX-License-Identifier: Apache-2.0
#include "mimomac/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mimomac/errors.hpp"

namespace mimomac {

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw DomainError("result table needs at least one column");
}

void ResultTable::add_meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }

void ResultTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw DomainError("row has " + std::to_string(cells.size()) + " cells, table has " +
                      std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(cells));
}

void ResultTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void ResultTable::write_csv(std::ostream& os) const {
  for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace mimomac
