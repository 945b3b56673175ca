#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace privlens::html {

// Minimal DOM for tag-soup HTML. Element nodes have a lowercase tag name;
// text nodes have an empty tag and carry decoded character data.
struct Node {
  std::string tag;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_text() const { return tag.empty(); }
  // Empty string when absent.
  const std::string& attr(std::string_view name) const;
  bool has_attr(std::string_view name) const;
};

struct Document {
  std::unique_ptr<Node> root;  // tag "#document"
  // <body> if present, otherwise the root.
  const Node* body() const;
};

// Never throws; malformed markup is repaired the way browsers roughly do
// (unknown end tags ignored, unclosed elements closed at end of input).
Document parse(std::string_view markup);

std::string decode_entities(std::string_view s);

bool is_block(std::string_view tag);
// script, style, noscript, template, svg, head, title...: never rendered.
bool is_hidden(std::string_view tag);

// Visible text of a subtree. Block elements become line breaks, whitespace
// inside lines is collapsed, blank lines collapsed to one.
std::string inner_text(const Node& node);
// Same, but subtrees for which `skip` returns true are left out.
std::string inner_text(const Node& node, const std::function<bool(const Node&)>& skip);

// Length of visible text under `node` that sits inside <a> elements,
// divided by all visible text length (0 for empty).
double link_density(const Node& node);

struct Anchor {
  std::string href;
  std::string text;   // visible anchor text
  std::string title;  // title attribute
};
std::vector<Anchor> anchors(const Node& node);

template <class F>
void walk(const Node& node, F&& f) {
  f(node);
  for (const auto& c : node.children) walk(*c, f);
}

}  // namespace privlens::html
