#include "xml_tree.hpp"

#include <expat.h>

namespace clearsheet::detail {

namespace {

std::string_view local_part(std::string_view name) {
  auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

struct BuildState {
  std::unique_ptr<XmlNode> root;
  std::vector<XmlNode*> stack;
};

void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  auto* st = static_cast<BuildState*>(user);
  auto node = std::make_unique<XmlNode>();
  node->name = std::string(local_part(name));
  for (int i = 0; atts[i]; i += 2) node->attrs.emplace_back(atts[i], atts[i + 1]);
  XmlNode* raw = node.get();
  if (st->stack.empty()) {
    st->root = std::move(node);
  } else {
    st->stack.back()->children.push_back(std::move(node));
  }
  st->stack.push_back(raw);
}

void on_end(void* user, const XML_Char*) { static_cast<BuildState*>(user)->stack.pop_back(); }

void on_text(void* user, const XML_Char* s, int len) {
  auto* st = static_cast<BuildState*>(user);
  if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

const std::string* XmlNode::attr(std::string_view local) const {
  for (const auto& [k, v] : attrs) {
    if (k == local || local_part(k) == local) return &v;
  }
  return nullptr;
}

std::string XmlNode::attr_or(std::string_view local, std::string fallback) const {
  const std::string* v = attr(local);
  return v ? *v : std::move(fallback);
}

const XmlNode* XmlNode::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c->name == local) return c.get();
  }
  return nullptr;
}

std::vector<const XmlNode*> XmlNode::children_named(std::string_view local) const {
  std::vector<const XmlNode*> out;
  for (const auto& c : children) {
    if (c->name == local) out.push_back(c.get());
  }
  return out;
}

std::string XmlNode::all_text() const {
  std::string out = text;
  for (const auto& c : children) out += c->all_text();
  return out;
}

std::unique_ptr<XmlNode> parse_xml(std::string_view document) {
  BuildState st;
  XML_Parser parser = XML_ParserCreate("UTF-8");
  if (!parser) throw XmlError("cannot allocate XML parser");
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, on_start, on_end);
  XML_SetCharacterDataHandler(parser, on_text);
  XML_Status status = XML_Parse(parser, document.data(), static_cast<int>(document.size()), 1);
  std::string message;
  if (status != XML_STATUS_OK) {
    message = std::string(XML_ErrorString(XML_GetErrorCode(parser))) + " at line " +
              std::to_string(XML_GetCurrentLineNumber(parser));
  }
  XML_ParserFree(parser);
  if (!message.empty()) throw XmlError(message);
  if (!st.root) throw XmlError("empty document");
  return std::move(st.root);
}

}  // namespace clearsheet::detail
