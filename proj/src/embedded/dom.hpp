#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace uigym::embedded {

/// Parsed document node. Tag names and attribute names are lowercased.
struct DomNode {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  int id = -1;  // stable element id from the live page; -1 when static
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;  // document order
  std::string text;  // Kind::Text payload
  std::vector<std::unique_ptr<DomNode>> children;
  DomNode* parent = nullptr;

  // live form state carried by page snapshots
  std::optional<std::string> value;
  bool checked = false;
  bool focused = false;

  bool is_element() const { return kind == Kind::Element; }
  const std::string* attr(const std::string& name) const;
  bool has_attr(const std::string& name) const;
  std::string attr_or(const std::string& name, const std::string& fallback) const;
  std::vector<std::string> class_list() const;

  DomNode* append_element(const std::string& tag_name);
  DomNode* append_text(const std::string& data);

  /// Element children only, in order.
  std::vector<DomNode*> element_children() const;
  /// 0-based position among parent's element children; -1 for roots.
  int element_index() const;
};

struct DomDocument {
  std::unique_ptr<DomNode> root;  // always an <html> element

  DomNode* html() const { return root.get(); }
  DomNode* head() const;
  DomNode* body() const;
  std::string title() const;

  /// Pre-order walk over elements.
  void for_each_element(const std::function<void(DomNode&)>& fn) const;
  DomNode* find_by_id(int node_id) const;
};

/// Tag-soup HTML parser: tolerant of unclosed and misnested tags, handles
/// void elements, raw-text script/style, comments, doctype, and entities.
/// Guarantees an <html> root with <head> and <body> children.
DomDocument parse_html(const std::string& html);

/// Fragment parse for innerHTML: returns the new child nodes only.
std::vector<std::unique_ptr<DomNode>> parse_fragment(const std::string& html);

std::string decode_entities(const std::string& text);

// JSON wire format shared with the in-page runtime:
//   element: {"t": tag, "a": {...}, "c": [...], "i": id?, "v": value?,
//             "k": checked?, "f": focused?}
//   text:    {"x": data}
nlohmann::json dom_to_json(const DomNode& node);
std::unique_ptr<DomNode> dom_from_json(const nlohmann::json& j);

/// Whitespace-collapsed, trimmed text content. `skip` prunes subtrees
/// (used for display:none and non-rendered tags).
std::string collapsed_text(const DomNode& node,
                           const std::function<bool(const DomNode&)>& skip = {});

bool is_void_tag(const std::string& tag);
bool is_form_control(const DomNode& node);

}  // namespace uigym::embedded
