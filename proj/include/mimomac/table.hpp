// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace mimomac {

/// Rectangular CSV result with a `#`-prefixed metadata block.
class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns);

  void add_meta(std::string key, std::string value);
  /// Throws DomainError when the row length differs from the column count.
  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const noexcept { return meta_; }

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Shortest round-trippable-enough form used in tables (%.10g; "nan" / "inf").
std::string format_number(double v);

}  // namespace mimomac
