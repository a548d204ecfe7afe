#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ncerg::cli {

/// Shortest decimal form with 17 significant digits, independent of locale.
std::string format_double(double v);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Constant {
  std::string name;
  std::string value;      ///< exact form when available
  double numeric = 0.0;
  std::string bound;      ///< the compared bound, or "empirical"
  bool hard = false;      ///< a violation fails the run
  bool holds = true;
};

class Report {
 public:
  Report(std::string command, std::vector<std::string> columns);

  void row(std::vector<Cell> cells);
  /// Records a hard check on the last row; a failure marks the run violated.
  void check(bool ok, const std::string& what);
  void constant(Constant c);

  bool violated() const { return !violations_.empty(); }
  const std::vector<std::string>& violations() const { return violations_; }
  std::size_t rows() const { return rows_.size(); }

  void write_csv(std::ostream& os) const;
  nlohmann::json summary(const nlohmann::json& config) const;

 private:
  std::string command_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<Constant> constants_;
  std::vector<std::string> violations_;
};

}  // namespace ncerg::cli
