#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clearsheet/scorer.hpp"

namespace clearsheet {

enum class Severity { error, warn, info };

std::string_view to_string(Severity s);

struct RuleInfo {
  std::string_view id;
  std::string_view name;
  std::string_view recommendation;
};

// L1..L10 in id order.
const std::vector<RuleInfo>& lint_rules();
const RuleInfo* find_rule(std::string_view id);

struct Finding {
  std::string rule_id;
  Severity severity = Severity::warn;
  std::optional<CellAddress> address;
  std::optional<std::string> table;
  std::string message;

  bool operator==(const Finding&) const = default;
};

// Every opaque cell in the model yields at least one error finding.
std::vector<Finding> lint(Scorer& scorer, const ModelScore& model);

}  // namespace clearsheet
