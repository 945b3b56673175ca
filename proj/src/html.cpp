#include "privlens/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "privlens/tokenize.hpp"

namespace privlens::html {

namespace {

const std::string kEmpty;

bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_void(std::string_view tag) {
  static const std::unordered_set<std::string_view> k = {
      "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
      "param", "source", "track", "wbr", "keygen", "basefont", "frame"};
  return k.count(tag) > 0;
}

bool is_raw_text(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "textarea" || tag == "title" ||
         tag == "xmp" || tag == "noscript";
}

// Start tags that implicitly close an open element of the listed kind.
bool closes(std::string_view opening, std::string_view open) {
  if (open == "p") return is_block(opening) && opening != "span";
  if (open == "li") return opening == "li";
  if (open == "dt" || open == "dd") return opening == "dt" || opening == "dd";
  if (open == "option") return opening == "option";
  if (open == "tr") return opening == "tr";
  if (open == "td" || open == "th") return opening == "td" || opening == "th" || opening == "tr";
  return false;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

const std::unordered_map<std::string_view, std::uint32_t>& named_entities() {
  static const std::unordered_map<std::string_view, std::uint32_t> k = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
      {"apos", '\''},    {"nbsp", 0xA0},    {"copy", 0xA9},    {"reg", 0xAE},
      {"trade", 0x2122}, {"mdash", 0x2014}, {"ndash", 0x2013}, {"lsquo", 0x2018},
      {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"hellip", 0x2026},
      {"bull", 0x2022},  {"middot", 0xB7},  {"sect", 0xA7},    {"para", 0xB6},
      {"laquo", 0xAB},   {"raquo", 0xBB},   {"eacute", 0xE9},  {"egrave", 0xE8},
      {"agrave", 0xE0},  {"uuml", 0xFC},    {"ouml", 0xF6},    {"auml", 0xE4},
      {"szlig", 0xDF},   {"ccedil", 0xE7},  {"euro", 0x20AC},  {"pound", 0xA3},
      {"shy", 0xAD},     {"zwj", 0x200D},   {"zwnj", 0x200C},  {"thinsp", 0x2009},
      {"ensp", 0x2002},  {"emsp", 0x2003}};
  return k;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Document run() {
    Document doc;
    doc.root = std::make_unique<Node>();
    doc.root->tag = "#document";
    stack_.push_back(doc.root.get());
    while (pos_ < s_.size()) {
      if (s_[pos_] == '<') {
        if (!markup()) text_until_next_tag();
      } else {
        text_until_next_tag();
      }
    }
    return doc;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Node*> stack_;

  Node* top() { return stack_.back(); }

  void add_text(std::string_view raw, bool decode = true) {
    if (raw.empty()) return;
    auto n = std::make_unique<Node>();
    n->text = decode ? decode_entities(raw) : std::string(raw);
    n->parent = top();
    top()->children.push_back(std::move(n));
  }

  void text_until_next_tag() {
    std::size_t start = pos_;
    std::size_t next = s_.find('<', pos_ + 1);
    if (next == std::string_view::npos) next = s_.size();
    pos_ = next;
    add_text(s_.substr(start, next - start));
  }

  // Returns false if the '<' does not start markup (treated as text).
  bool markup() {
    if (s_.substr(pos_, 4) == "<!--") {
      std::size_t end = s_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? s_.size() : end + 3;
      return true;
    }
    if (pos_ + 1 < s_.size() && (s_[pos_ + 1] == '!' || s_[pos_ + 1] == '?')) {
      std::size_t end = s_.find('>', pos_);
      pos_ = end == std::string_view::npos ? s_.size() : end + 1;
      return true;
    }
    bool closing = pos_ + 1 < s_.size() && s_[pos_ + 1] == '/';
    std::size_t p = pos_ + (closing ? 2 : 1);
    std::size_t name_start = p;
    while (p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '-' ||
                             s_[p] == ':' || s_[p] == '_'))
      ++p;
    if (p == name_start || !std::isalpha(static_cast<unsigned char>(s_[name_start]))) {
      if (closing) {  // "</ >" junk: skip to '>'
        std::size_t end = s_.find('>', pos_);
        pos_ = end == std::string_view::npos ? s_.size() : end + 1;
        return true;
      }
      return false;
    }
    std::string name = to_lower(s_.substr(name_start, p - name_start));
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    // attributes
    while (p < s_.size() && s_[p] != '>') {
      if (space(s_[p])) {
        ++p;
        continue;
      }
      if (s_[p] == '/') {
        self_closing = true;
        ++p;
        continue;
      }
      std::size_t a = p;
      while (p < s_.size() && !space(s_[p]) && s_[p] != '=' && s_[p] != '>' && s_[p] != '/') ++p;
      std::string aname = to_lower(s_.substr(a, p - a));
      while (p < s_.size() && space(s_[p])) ++p;
      std::string value;
      if (p < s_.size() && s_[p] == '=') {
        ++p;
        while (p < s_.size() && space(s_[p])) ++p;
        if (p < s_.size() && (s_[p] == '"' || s_[p] == '\'')) {
          char q = s_[p++];
          std::size_t v = p;
          while (p < s_.size() && s_[p] != q) ++p;
          value = decode_entities(s_.substr(v, p - v));
          if (p < s_.size()) ++p;
        } else {
          std::size_t v = p;
          while (p < s_.size() && !space(s_[p]) && s_[p] != '>') ++p;
          value = decode_entities(s_.substr(v, p - v));
        }
      }
      if (!aname.empty()) attrs.emplace_back(std::move(aname), std::move(value));
      if (p == a) ++p;  // guarantee progress
    }
    pos_ = p < s_.size() ? p + 1 : s_.size();
    if (closing) {
      close(name);
      return true;
    }
    open(name, std::move(attrs), self_closing);
    return true;
  }

  void open(const std::string& name, std::vector<std::pair<std::string, std::string>> attrs,
            bool self_closing) {
    while (stack_.size() > 1 && closes(name, top()->tag)) stack_.pop_back();
    auto n = std::make_unique<Node>();
    n->tag = name;
    n->attributes = std::move(attrs);
    n->parent = top();
    Node* raw = n.get();
    top()->children.push_back(std::move(n));
    if (is_void(name) || self_closing) return;
    if (is_raw_text(name)) {
      // Raw text runs to the matching end tag, case-insensitively.
      std::string lower = to_lower(s_.substr(pos_));
      std::size_t end = lower.find("</" + name);
      std::size_t stop = end == std::string::npos ? s_.size() : pos_ + end;
      stack_.push_back(raw);
      add_text(s_.substr(pos_, stop - pos_), name == "title" || name == "textarea");
      stack_.pop_back();
      pos_ = stop;
      if (end != std::string::npos) {
        std::size_t gt = s_.find('>', pos_);
        pos_ = gt == std::string_view::npos ? s_.size() : gt + 1;
      }
      return;
    }
    stack_.push_back(raw);
  }

  void close(const std::string& name) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag == name) {
        stack_.resize(i);
        return;
      }
    }
  }
};

using SkipFn = std::function<bool(const Node&)>;

void render(const Node& n, std::string& out, bool& pending_space, const SkipFn* skip) {
  if (n.is_text()) {
    for (char c : n.text) {
      if (space(c)) {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.empty() && out.back() != '\n') out += ' ';
      pending_space = false;
      out += c;
    }
    return;
  }
  if (is_hidden(n.tag) || (skip && (*skip)(n))) return;
  const bool block = is_block(n.tag);
  if (n.tag == "br") {
    out += '\n';
    pending_space = false;
    return;
  }
  if (block && !out.empty() && out.back() != '\n') out += '\n';
  if (block) pending_space = false;
  for (const auto& c : n.children) render(*c, out, pending_space, skip);
  if (block && !out.empty() && out.back() != '\n') {
    out += '\n';
    pending_space = false;
  }
}

std::size_t visible_length(const Node& n, bool in_link, std::size_t& link_len) {
  if (n.is_text()) {
    std::size_t len = 0;
    for (char c : n.text) len += !space(c);
    if (in_link) link_len += len;
    return len;
  }
  if (is_hidden(n.tag)) return 0;
  std::size_t total = 0;
  for (const auto& c : n.children) total += visible_length(*c, in_link || n.tag == "a", link_len);
  return total;
}

}  // namespace

const std::string& Node::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes)
    if (k == name) return v;
  return kEmpty;
}

bool Node::has_attr(std::string_view name) const {
  return std::any_of(attributes.begin(), attributes.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

const Node* Document::body() const {
  const Node* found = nullptr;
  walk(*root, [&](const Node& n) {
    if (!found && n.tag == "body") found = &n;
  });
  return found ? found : root.get();
}

Document parse(std::string_view markup) { return Parser(markup).run(); }

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += '&';
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (!ent.empty() && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      std::string_view digits = ent.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) cp = 0x110000;
      }
      if (ok) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = named_entities().find(ent); it != named_entities().end()) {
      append_utf8(out, it->second);
      i = semi;
      continue;
    }
    out += '&';
  }
  return out;
}

bool is_block(std::string_view tag) {
  static const std::unordered_set<std::string_view> k = {
      "address", "article", "aside", "blockquote", "body", "center", "dd", "details",
      "dialog", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form",
      "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "html", "li", "main", "nav",
      "ol", "p", "pre", "section", "summary", "table", "tbody", "thead", "tfoot", "tr",
      "td", "th", "ul", "caption", "option", "#document", "br", "frameset", "frame"};
  return k.count(tag) > 0;
}

bool is_hidden(std::string_view tag) {
  static const std::unordered_set<std::string_view> k = {
      "script", "style", "noscript", "template", "svg", "head", "title", "meta", "link",
      "iframe", "object", "embed", "canvas", "select", "button", "textarea", "input"};
  return k.count(tag) > 0;
}

std::string inner_text(const Node& node) { return inner_text(node, nullptr); }

std::string inner_text(const Node& node, const std::function<bool(const Node&)>& skip) {
  std::string raw;
  bool pending = false;
  render(node, raw, pending, skip ? &skip : nullptr);
  // trim each line, drop empty lines
  std::string out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string::npos) nl = raw.size();
    std::string line = collapse_whitespace(std::string_view(raw).substr(pos, nl - pos));
    if (!line.empty()) {
      if (!out.empty()) out += '\n';
      out += line;
    }
    pos = nl + 1;
  }
  return out;
}

double link_density(const Node& node) {
  std::size_t link_len = 0;
  std::size_t total = visible_length(node, node.tag == "a", link_len);
  return total == 0 ? 0.0 : static_cast<double>(link_len) / static_cast<double>(total);
}

std::vector<Anchor> anchors(const Node& node) {
  std::vector<Anchor> out;
  walk(node, [&](const Node& n) {
    if (n.tag == "a" && n.has_attr("href")) {
      out.push_back({n.attr("href"), collapse_whitespace(inner_text(n)), n.attr("title")});
    }
  });
  return out;
}

}  // namespace privlens::html
