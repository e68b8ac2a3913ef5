#pragma once

// Optional determinant cache: JSON-lines file keyed by potential hash, grid
// hash, branch, and spectral point, storing the log-determinant.  Warm and
// cold runs must agree bitwise, so values are stored at full precision and
// the file is flushed in sorted key order.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>
#include <diracres/determinant.hpp>

namespace diracres {

class DetCache {
 public:
  DetCache() = default;

  void open(const std::string& path) {
    path_ = path;
    entries_.clear();
    std::ifstream in(path);
    if (!in) return;  // cold cache
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const nlohmann::json j = nlohmann::json::parse(line);
        LogDet v;
        v.log_abs = j.at("log_abs").get<double>();
        v.arg = j.at("arg").get<double>();
        entries_[j.at("key").get<std::string>()] = v;
      } catch (const nlohmann::json::exception&) {
        // a torn line from an interrupted run is dropped, not fatal
      }
    }
  }

  static std::string make_key(const std::string& potential_hash,
                              const std::string& grid_hash, Sheet sheet,
                              Complex lambda) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g_%.17g", lambda.real(),
                  lambda.imag());
    return potential_hash + "/" + grid_hash + "/" + to_string(sheet) + "/" +
           buf;
  }

  std::optional<LogDet> lookup(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& key, const LogDet& v) {
    entries_[key] = v;
    dirty_ = true;
  }

  void flush() {
    if (path_.empty() || !dirty_) return;
    std::ostringstream out;
    out.precision(17);
    for (const auto& [key, v] : entries_) {
      nlohmann::json j;
      j["key"] = key;
      j["log_abs"] = v.log_abs;
      j["arg"] = v.arg;
      out << j.dump() << '\n';
    }
    std::ofstream f(path_, std::ios::trunc);
    f << out.str();
    dirty_ = false;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::string path_;
  std::map<std::string, LogDet> entries_;
  bool dirty_ = false;
};

}  // namespace diracres
