#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bmg {

/// Shortest round-trippable decimal form, locale independent.
std::string format_number(double x);

/// Minimal RFC 4180 writer. Lines starting with '#' are metadata comments.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

 private:
  std::ostream& out_;
};

/// FNV-1a over a canonical config string, printed as 16 hex digits.
std::string config_hash(std::string_view canonical);

}  // namespace bmg
