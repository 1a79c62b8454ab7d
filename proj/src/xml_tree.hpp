#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clearsheet::detail {

class XmlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal element tree. Element and attribute names keep their prefix; the
// lookup helpers match on local name.
struct XmlNode {
  std::string name;  // local name
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<std::unique_ptr<XmlNode>> children;
  std::string text;  // character data directly inside this element

  const std::string* attr(std::string_view local) const;
  std::string attr_or(std::string_view local, std::string fallback = {}) const;
  const XmlNode* child(std::string_view local) const;
  std::vector<const XmlNode*> children_named(std::string_view local) const;
  // Concatenated text of this element and all descendants.
  std::string all_text() const;
};

std::unique_ptr<XmlNode> parse_xml(std::string_view document);

}  // namespace clearsheet::detail
