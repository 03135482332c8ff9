#pragma once

#include <string>
#include <vector>

namespace wdom {

/// Collected structural violations. Empty means valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  void add(std::string message) { violations.push_back(std::move(message)); }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) out += v + "\n";
    return out;
  }
};

}  // namespace wdom
