#include "embedded/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "uigym/errors.hpp"

namespace uigym::embedded {
namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_rawtext_tag(const std::string& tag) {
  return tag == "script" || tag == "style";
}

bool iequals_at(const std::string& haystack, std::size_t pos, const char* needle) {
  for (std::size_t i = 0; needle[i]; ++i) {
    if (pos + i >= haystack.size()) return false;
    if (std::tolower(static_cast<unsigned char>(haystack[pos + i])) !=
        std::tolower(static_cast<unsigned char>(needle[i])))
      return false;
  }
  return true;
}

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  bool done() const { return pos >= src.size(); }
  char peek() const { return src[pos]; }

  void parse_into(DomNode* parent, std::vector<DomNode*>& open_stack) {
    std::string text_buffer;
    auto flush_text = [&]() {
      if (text_buffer.empty()) return;
      DomNode* target = open_stack.empty() ? parent : open_stack.back();
      target->append_text(decode_entities(text_buffer));
      text_buffer.clear();
    };

    while (!done()) {
      if (peek() != '<') {
        text_buffer += src[pos++];
        continue;
      }
      // comment
      if (iequals_at(src, pos, "<!--")) {
        flush_text();
        const std::size_t end = src.find("-->", pos + 4);
        pos = end == std::string::npos ? src.size() : end + 3;
        continue;
      }
      // doctype or other markup declaration
      if (pos + 1 < src.size() && (src[pos + 1] == '!' || src[pos + 1] == '?')) {
        flush_text();
        const std::size_t end = src.find('>', pos);
        pos = end == std::string::npos ? src.size() : end + 1;
        continue;
      }
      // closing tag
      if (pos + 1 < src.size() && src[pos + 1] == '/') {
        flush_text();
        std::size_t end = src.find('>', pos);
        if (end == std::string::npos) { pos = src.size(); break; }
        const std::string name = to_lower(trim_copy(src.substr(pos + 2, end - pos - 2)));
        pos = end + 1;
        // pop to the matching open element, if it is open at all
        for (std::size_t i = open_stack.size(); i-- > 0;) {
          if (open_stack[i]->tag == name) {
            open_stack.resize(i);
            break;
          }
        }
        continue;
      }
      // opening tag
      if (pos + 1 < src.size() &&
          (std::isalpha(static_cast<unsigned char>(src[pos + 1])))) {
        flush_text();
        parse_open_tag(parent, open_stack);
        continue;
      }
      // bare '<'
      text_buffer += src[pos++];
    }
    flush_text();
  }

  static std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static bool implicitly_closes(const std::string& incoming, const std::string& open) {
    if (incoming == "li" && open == "li") return true;
    if ((incoming == "dt" || incoming == "dd") && (open == "dt" || open == "dd"))
      return true;
    if (incoming == "option" && open == "option") return true;
    if (incoming == "tr" && (open == "tr" || open == "td" || open == "th")) return true;
    if ((incoming == "td" || incoming == "th") && (open == "td" || open == "th"))
      return true;
    if (open == "p") {
      static const char* kBlocks[] = {
          "p",       "div",     "ul",      "ol",   "li",     "table", "form",
          "section", "article", "header",  "footer", "aside", "nav",
          "blockquote", "pre",  "fieldset", "h1",  "h2",     "h3",    "h4",
          "h5",      "h6",      "hr",       "main"};
      for (const char* b : kBlocks) {
        if (incoming == b) return true;
      }
    }
    return false;
  }

  void parse_open_tag(DomNode* parent, std::vector<DomNode*>& open_stack) {
    ++pos;  // '<'
    std::string name;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                       peek() == '-' || peek() == ':')) {
      name += src[pos++];
    }
    name = to_lower(name);

    auto node = std::make_unique<DomNode>();
    node->kind = DomNode::Kind::Element;
    node->tag = name;
    bool self_closed = false;

    while (!done()) {
      while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
      if (done()) break;
      if (peek() == '>') { ++pos; break; }
      if (peek() == '/') {
        ++pos;
        if (!done() && peek() == '>') { ++pos; self_closed = true; break; }
        continue;
      }
      // attribute name
      std::string attr_name;
      while (!done() && peek() != '=' && peek() != '>' && peek() != '/' &&
             !std::isspace(static_cast<unsigned char>(peek()))) {
        attr_name += src[pos++];
      }
      if (attr_name.empty()) { ++pos; continue; }
      attr_name = to_lower(attr_name);
      std::string attr_value;
      while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
      if (!done() && peek() == '=') {
        ++pos;
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
        if (!done() && (peek() == '"' || peek() == '\'')) {
          const char quote = src[pos++];
          while (!done() && peek() != quote) attr_value += src[pos++];
          if (!done()) ++pos;
        } else {
          while (!done() && peek() != '>' &&
                 !std::isspace(static_cast<unsigned char>(peek()))) {
            attr_value += src[pos++];
          }
        }
        attr_value = decode_entities(attr_value);
      }
      node->attrs.emplace_back(attr_name, attr_value);
    }

    // implied end tags: a new <li> closes an open <li>, and so on
    while (!open_stack.empty() && implicitly_closes(name, open_stack.back()->tag))
      open_stack.pop_back();

    DomNode* target = open_stack.empty() ? parent : open_stack.back();
    DomNode* raw = node.get();
    raw->parent = target;
    target->children.push_back(std::move(node));

    if (self_closed || is_void_tag(name)) return;

    if (is_rawtext_tag(name)) {
      // consume verbatim until the matching close tag
      const std::string close = "</" + name;
      std::size_t end = pos;
      while (end < src.size()) {
        if (src[end] == '<' && iequals_at(src, end, close.c_str())) break;
        ++end;
      }
      const std::string content = src.substr(pos, end - pos);
      if (!content.empty()) raw->append_text(content);
      const std::size_t gt = src.find('>', end);
      pos = gt == std::string::npos ? src.size() : gt + 1;
      return;
    }
    open_stack.push_back(raw);
  }
};

DomNode* find_child_tag(DomNode* parent, const std::string& tag) {
  for (const auto& child : parent->children) {
    if (child->is_element() && child->tag == tag) return child.get();
  }
  return nullptr;
}

const std::array<const char*, 14> kVoidTags = {
    "area", "base", "br",    "col",   "embed",  "hr",  "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

}  // namespace

const std::string* DomNode::attr(const std::string& name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

bool DomNode::has_attr(const std::string& name) const { return attr(name) != nullptr; }

std::string DomNode::attr_or(const std::string& name, const std::string& fallback) const {
  const std::string* v = attr(name);
  return v ? *v : fallback;
}

std::vector<std::string> DomNode::class_list() const {
  std::vector<std::string> out;
  const std::string* v = attr("class");
  if (!v) return out;
  std::string current;
  for (char c : *v) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

DomNode* DomNode::append_element(const std::string& tag_name) {
  auto node = std::make_unique<DomNode>();
  node->kind = Kind::Element;
  node->tag = tag_name;
  node->parent = this;
  children.push_back(std::move(node));
  return children.back().get();
}

DomNode* DomNode::append_text(const std::string& data) {
  auto node = std::make_unique<DomNode>();
  node->kind = Kind::Text;
  node->text = data;
  node->parent = this;
  children.push_back(std::move(node));
  return children.back().get();
}

std::vector<DomNode*> DomNode::element_children() const {
  std::vector<DomNode*> out;
  for (const auto& child : children) {
    if (child->is_element()) out.push_back(child.get());
  }
  return out;
}

int DomNode::element_index() const {
  if (!parent) return -1;
  int index = 0;
  for (const auto& sibling : parent->children) {
    if (!sibling->is_element()) continue;
    if (sibling.get() == this) return index;
    ++index;
  }
  return -1;
}

DomNode* DomDocument::head() const { return find_child_tag(root.get(), "head"); }
DomNode* DomDocument::body() const { return find_child_tag(root.get(), "body"); }

std::string DomDocument::title() const {
  DomNode* h = head();
  if (!h) return "";
  for (const auto& child : h->children) {
    if (child->is_element() && child->tag == "title") return collapsed_text(*child);
  }
  return "";
}

void DomDocument::for_each_element(const std::function<void(DomNode&)>& fn) const {
  std::function<void(DomNode&)> walk = [&](DomNode& node) {
    if (node.is_element()) fn(node);
    for (const auto& child : node.children) walk(*child);
  };
  if (root) walk(*root);
}

DomNode* DomDocument::find_by_id(int node_id) const {
  DomNode* found = nullptr;
  for_each_element([&](DomNode& node) {
    if (!found && node.id == node_id) found = &node;
  });
  return found;
}

bool is_void_tag(const std::string& tag) {
  for (const char* v : kVoidTags) {
    if (tag == v) return true;
  }
  return false;
}

bool is_form_control(const DomNode& node) {
  return node.tag == "input" || node.tag == "textarea" || node.tag == "select";
}

std::string decode_entities(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const std::size_t semi = text.find(';', i);
    if (semi == std::string::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    const std::string entity = text.substr(i + 1, semi - i - 1);
    if (entity == "amp") out += '&';
    else if (entity == "lt") out += '<';
    else if (entity == "gt") out += '>';
    else if (entity == "quot") out += '"';
    else if (entity == "apos" || entity == "#39" || entity == "#x27") out += '\'';
    else if (entity == "nbsp") out += ' ';
    else if (entity == "copy") out += "(c)";
    else if (!entity.empty() && entity[0] == '#') {
      long code = 0;
      try {
        code = entity[1] == 'x' || entity[1] == 'X'
                   ? std::stol(entity.substr(2), nullptr, 16)
                   : std::stol(entity.substr(1));
      } catch (...) {
        out += text[i++];
        continue;
      }
      if (code > 0 && code < 128) {
        out += static_cast<char>(code);
      } else if (code >= 128) {
        // UTF-8 encode
        if (code < 0x800) {
          out += static_cast<char>(0xc0 | (code >> 6));
          out += static_cast<char>(0x80 | (code & 0x3f));
        } else {
          out += static_cast<char>(0xe0 | (code >> 12));
          out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
          out += static_cast<char>(0x80 | (code & 0x3f));
        }
      }
    } else {
      out += text[i++];
      continue;
    }
    i = semi + 1;
  }
  return out;
}

DomDocument parse_html(const std::string& html) {
  auto holder = std::make_unique<DomNode>();
  holder->kind = DomNode::Kind::Element;
  holder->tag = "#holder";
  std::vector<DomNode*> open_stack;
  Parser parser(html);
  parser.parse_into(holder.get(), open_stack);

  DomDocument doc;
  // adopt or synthesize the html root
  DomNode* parsed_html = find_child_tag(holder.get(), "html");
  if (parsed_html) {
    for (auto& child : holder->children) {
      if (child.get() == parsed_html) {
        doc.root = std::move(child);
        break;
      }
    }
    doc.root->parent = nullptr;
  } else {
    doc.root = std::make_unique<DomNode>();
    doc.root->kind = DomNode::Kind::Element;
    doc.root->tag = "html";
    for (auto& child : holder->children) {
      child->parent = doc.root.get();
      doc.root->children.push_back(std::move(child));
    }
  }

  if (!find_child_tag(doc.root.get(), "head")) {
    auto head = std::make_unique<DomNode>();
    head->kind = DomNode::Kind::Element;
    head->tag = "head";
    head->parent = doc.root.get();
    doc.root->children.insert(doc.root->children.begin(), std::move(head));
  }
  if (!find_child_tag(doc.root.get(), "body")) {
    // metadata moves into head, everything else into a synthesized body
    DomNode* head = find_child_tag(doc.root.get(), "head");
    auto body = std::make_unique<DomNode>();
    body->kind = DomNode::Kind::Element;
    body->tag = "body";
    body->parent = doc.root.get();
    std::vector<std::unique_ptr<DomNode>> kept;
    for (auto& child : doc.root->children) {
      if (child->is_element() && child->tag == "head") {
        kept.push_back(std::move(child));
        continue;
      }
      const bool metadata = child->is_element() &&
                            (child->tag == "title" || child->tag == "meta" ||
                             child->tag == "link" || child->tag == "style" ||
                             child->tag == "base");
      if (metadata) {
        child->parent = head;
        head->children.push_back(std::move(child));
      } else {
        child->parent = body.get();
        body->children.push_back(std::move(child));
      }
    }
    doc.root->children = std::move(kept);
    doc.root->children.push_back(std::move(body));
  }
  return doc;
}

std::vector<std::unique_ptr<DomNode>> parse_fragment(const std::string& html) {
  auto holder = std::make_unique<DomNode>();
  holder->kind = DomNode::Kind::Element;
  holder->tag = "#holder";
  std::vector<DomNode*> open_stack;
  Parser parser(html);
  parser.parse_into(holder.get(), open_stack);
  for (auto& child : holder->children) child->parent = nullptr;
  return std::move(holder->children);
}

nlohmann::json dom_to_json(const DomNode& node) {
  using nlohmann::json;
  if (!node.is_element()) return json{{"x", node.text}};
  json j;
  j["t"] = node.tag;
  json attrs = json::object();
  for (const auto& [k, v] : node.attrs) attrs[k] = v;
  j["a"] = attrs;
  json children = json::array();
  for (const auto& child : node.children) children.push_back(dom_to_json(*child));
  j["c"] = children;
  if (node.id >= 0) j["i"] = node.id;
  if (node.value) j["v"] = *node.value;
  if (node.checked) j["k"] = true;
  if (node.focused) j["f"] = true;
  return j;
}

std::unique_ptr<DomNode> dom_from_json(const nlohmann::json& j) {
  auto node = std::make_unique<DomNode>();
  if (j.contains("x")) {
    node->kind = DomNode::Kind::Text;
    node->text = j.at("x").get<std::string>();
    return node;
  }
  node->kind = DomNode::Kind::Element;
  node->tag = j.at("t").get<std::string>();
  if (j.contains("a")) {
    for (const auto& [k, v] : j.at("a").items())
      node->attrs.emplace_back(k, v.get<std::string>());
  }
  if (j.contains("i")) node->id = j.at("i").get<int>();
  if (j.contains("v")) node->value = j.at("v").get<std::string>();
  if (j.contains("k")) node->checked = j.at("k").get<bool>();
  if (j.contains("f")) node->focused = j.at("f").get<bool>();
  if (j.contains("c")) {
    for (const auto& child_json : j.at("c")) {
      auto child = dom_from_json(child_json);
      child->parent = node.get();
      node->children.push_back(std::move(child));
    }
  }
  return node;
}

std::string collapsed_text(const DomNode& node,
                           const std::function<bool(const DomNode&)>& skip) {
  std::string raw;
  std::function<void(const DomNode&)> walk = [&](const DomNode& n) {
    if (skip && skip(n)) return;
    if (n.is_element() && (n.tag == "script" || n.tag == "style")) return;
    if (!n.is_element()) {
      raw += n.text;
      return;
    }
    for (const auto& child : n.children) walk(*child);
    raw += ' ';  // element boundaries separate words
  };
  for (const auto& child : node.children) walk(*child);
  if (!node.is_element()) raw = node.text;

  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

}  // namespace uigym::embedded
