#include "ncerg/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ncerg::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string render(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

}  // namespace

Report::Report(std::string command, std::vector<std::string> columns)
    : command_(std::move(command)), columns_(std::move(columns)) {}

void Report::row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("row width does not match the header");
  std::vector<std::string> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) out.push_back(render(c));
  rows_.push_back(std::move(out));
}

void Report::check(bool ok, const std::string& what) {
  if (ok) return;
  std::string where = "row " + std::to_string(rows_.size());
  if (!rows_.empty()) {
    where += " [";
    for (std::size_t i = 0; i < rows_.back().size(); ++i) {
      if (i) where += ",";
      where += rows_.back()[i];
    }
    where += "]";
  }
  violations_.push_back(where + ": " + what);
}

void Report::constant(Constant c) {
  if (c.hard && !c.holds) violations_.push_back("constant " + c.name + " = " + c.value + " exceeds " + c.bound);
  constants_.push_back(std::move(c));
}

void Report::write_csv(std::ostream& os) const {
  os << "# ncerg-report v1\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  for (const Constant& c : constants_) {
    os << "# constant " << c.name << '=' << c.value << " bound=" << c.bound
       << " holds=" << (c.holds ? "true" : "false") << '\n';
  }
}

nlohmann::json Report::summary(const nlohmann::json& config) const {
  nlohmann::json constants = nlohmann::json::array();
  for (const Constant& c : constants_) {
    constants.push_back({{"name", c.name},
                         {"value", c.value},
                         {"numeric", format_double(c.numeric)},
                         {"bound", c.bound},
                         {"hard", c.hard},
                         {"holds", c.holds}});
  }
  return {{"schema", "ncerg-report v1"},
          {"command", command_},
          {"config", config},
          {"rows", rows_.size()},
          {"constants", constants},
          {"violations", violations_},
          {"status", violations_.empty() ? "pass" : "violation"}};
}

}  // namespace ncerg::cli
