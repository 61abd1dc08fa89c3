#pragma once

#include "hjkit/jet.hpp"

#include <json.hpp>

#include <string>

namespace hjkit::cli {

using nlohmann::ordered_json;

/// Command result. JSON is the primary form; text is rendered from it.
class Report {
 public:
  Report(std::string command, std::string file);

  void meta(const std::string& key, ordered_json value);
  void section(const std::string& name, const std::vector<std::pair<std::string, Expression>>& entries);
  void section_text(const std::string& name, const std::vector<std::pair<std::string, std::string>>& entries);
  void group(const CheckGroup& g);
  /// Numeric criterion: passes iff value <= limit.
  void threshold(const std::string& name, double value, double limit);
  void numeric(const std::string& key, ordered_json value);
  void error(const std::string& kind, const std::string& message, int line = 0, int column = 0);

  bool has_checks() const { return checks_; }
  bool passed() const { return passed_; }
  bool failed_with_error() const { return json_.contains("error"); }
  /// 0 pass or informational, 1 a check failed.
  int exit_code() const { return passed_ ? 0 : 1; }

  ordered_json json() const;
  std::string text() const;

 private:
  ordered_json json_;
  bool checks_ = false;
  bool passed_ = true;
};

ordered_json verdict_json(const ZeroVerdict& v);
std::string format_double(double v);

}  // namespace hjkit::cli
