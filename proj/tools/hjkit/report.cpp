#include "report.hpp"

#include <cstdio>
#include <sstream>

namespace hjkit::cli {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ordered_json verdict_json(const ZeroVerdict& v) {
  ordered_json j{{"status", to_string(v.status)}, {"samples", v.samples}, {"max_magnitude", v.max_magnitude}};
  if (v.status == ZeroStatus::Nonzero) {
    ordered_json w = ordered_json::object();
    for (const auto& [name, value] : v.witness) w[name] = value;
    j["witness"] = w;
    j["witness_value"] = v.witness_value;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Report::Report(std::string command, std::string file) {
  json_["command"] = std::move(command);
  json_["file"] = std::move(file);
  json_["status"] = "info";
}

void Report::meta(const std::string& key, ordered_json value) { json_["metadata"][key] = std::move(value); }

void Report::section(const std::string& name, const std::vector<std::pair<std::string, Expression>>& entries) {
  std::vector<std::pair<std::string, std::string>> text;
  for (const auto& [label, e] : entries) text.emplace_back(label, e.str());
  section_text(name, text);
}

void Report::section_text(const std::string& name, const std::vector<std::pair<std::string, std::string>>& entries) {
  ordered_json s{{"name", name}, {"entries", ordered_json::array()}};
  for (const auto& [label, e] : entries) s["entries"].push_back({{"label", label}, {"expr", e}});
  json_["sections"].push_back(std::move(s));
}

void Report::group(const CheckGroup& g) {
  ordered_json j{{"name", g.name}, {"passed", g.passed()}, {"exact", g.exact()}, {"checks", ordered_json::array()}};
  for (const auto& c : g.checks)
    j["checks"].push_back({{"label", c.label}, {"expr", c.expr.str()}, {"verdict", verdict_json(c.verdict)}});
  json_["checks"].push_back(std::move(j));
  checks_ = true;
  passed_ = passed_ && g.passed();
  json_["status"] = passed_ ? "pass" : "fail";
}

void Report::threshold(const std::string& name, double value, double limit) {
  bool ok = value <= limit;
  json_["thresholds"].push_back({{"name", name}, {"value", value}, {"limit", limit}, {"passed", ok}});
  checks_ = true;
  passed_ = passed_ && ok;
  json_["status"] = passed_ ? "pass" : "fail";
}

void Report::numeric(const std::string& key, ordered_json value) { json_["numeric"][key] = std::move(value); }

void Report::error(const std::string& kind, const std::string& message, int line, int column) {
  ordered_json e{{"kind", kind}, {"message", message}};
  if (line > 0) {
    e["line"] = line;
    e["column"] = column;
  }
  json_["error"] = std::move(e);
  json_["status"] = "error";
  passed_ = false;
}

ordered_json Report::json() const { return json_; }

namespace {

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::string verdict_text(const ordered_json& v) {
  std::string s = v["status"].get<std::string>();
  if (s == "zero-probabilistic") {
    s += " (" + std::to_string(v["samples"].get<int>()) + " samples, max " +
         format_double(v["max_magnitude"].get<double>()) + ")";
  } else if (s == "nonzero" && v.contains("witness")) {
    std::string w;
    for (const auto& [name, value] : v["witness"].items()) w += (w.empty() ? "" : ", ") + name + "=" + format_double(value);
    s += " at " + (w.empty() ? std::string("any point") : w) + " (value " + format_double(v["witness_value"].get<double>()) +
         ")";
  }
  if (v.contains("note")) s += " [" + v["note"].get<std::string>() + "]";
  return s;
}

}  // namespace

std::string Report::text() const {
  std::ostringstream os;
  std::string status = json_["status"].get<std::string>();
  os << json_["command"].get<std::string>() << " " << json_["file"].get<std::string>();
  if (status != "info") {
    std::string upper = status;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    os << ": " << upper;
  }
  os << "\n";
  if (json_.contains("error")) {
    const auto& e = json_["error"];
    os << "error (" << e["kind"].get<std::string>() << "): ";
    if (e.contains("line")) os << e["line"].get<int>() << ":" << e["column"].get<int>() << ": ";
    os << e["message"].get<std::string>() << "\n";
  }
  if (json_.contains("metadata"))
    for (const auto& [k, v] : json_["metadata"].items()) os << "  " << k << ": " << scalar_text(v) << "\n";
  if (json_.contains("sections"))
    for (const auto& s : json_["sections"]) {
      os << "[" << s["name"].get<std::string>() << "]\n";
      for (const auto& e : s["entries"]) {
        std::string label = e["label"].get<std::string>();
        os << "  " << (label.empty() ? "" : label + " = ") << e["expr"].get<std::string>() << "\n";
      }
    }
  if (json_.contains("checks"))
    for (const auto& g : json_["checks"]) {
      os << "[" << g["name"].get<std::string>() << "] " << (g["passed"].get<bool>() ? "pass" : "fail") << "\n";
      for (const auto& c : g["checks"])
        os << "  " << c["label"].get<std::string>() << ": " << verdict_text(c["verdict"]) << "\n";
    }
  if (json_.contains("numeric"))
    for (const auto& [k, v] : json_["numeric"].items()) {
      if (v.is_array()) {
        std::string items;
        for (const auto& x : v) items += (items.empty() ? "" : ", ") + scalar_text(x);
        os << "  " << k << ": " << items << "\n";
      } else if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) os << "  " << k << "." << k2 << ": " << scalar_text(v2) << "\n";
      } else {
        os << "  " << k << ": " << scalar_text(v) << "\n";
      }
    }
  if (json_.contains("thresholds"))
    for (const auto& t : json_["thresholds"])
      os << "  " << t["name"].get<std::string>() << " " << format_double(t["value"].get<double>()) << " <= "
         << format_double(t["limit"].get<double>()) << ": " << (t["passed"].get<bool>() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace hjkit::cli
