#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oniontext::html {

// Recoverable tree construction for the malformed markup that is common
// on onion pages: stray end tags are ignored, unclosed elements close at
// end of input, attribute syntax is parsed loosely.
struct Node {
    enum class Type { Document, Element, Text, Comment };

    Type type = Type::Document;
    std::string tag;  // lowercase; elements only
    std::vector<std::pair<std::string, std::string>> attrs;
    std::string text;  // Text/Comment payload; entity-decoded for Text
    std::vector<std::unique_ptr<Node>> children;

    const std::string* attr(std::string_view name) const;
    bool has_class(std::string_view cls) const;
};

std::unique_ptr<Node> parse(std::string_view source);

// Text a reader would see: script/style/noscript subtrees and comments
// are dropped; block-level elements and <br> separate their content with
// newlines; inline markup contributes nothing.
std::string visible_text(const Node& node);

// Element-path expression: simple selectors (tag, .class, #id, combined
// as e.g. div.item#main) chained by the descendant combinator (space).
class Selector {
public:
    static Selector parse(const std::string& expression);

    // First match in document order, or nullptr.
    const Node* find_first(const Node& root) const;
    std::vector<const Node*> find_all(const Node& root) const;

private:
    struct Simple {
        std::string tag;                  // empty = any
        std::string id;                   // empty = unconstrained
        std::vector<std::string> classes;

        bool matches(const Node& el) const;
    };
    std::vector<Simple> chain_;
};

}  // namespace oniontext::html
