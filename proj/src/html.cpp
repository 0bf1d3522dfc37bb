#include "oniontext/html.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "oniontext/error.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext::html {

namespace {

constexpr const char* kModule = "html";

const std::set<std::string>& void_elements() {
    static const std::set<std::string> tags = {"area",  "base", "br",    "col",  "embed",
                                               "hr",    "img",  "input", "link", "meta",
                                               "param", "source", "track", "wbr"};
    return tags;
}

// Content of these elements is raw text up to the matching end tag.
bool is_raw_text_element(const std::string& tag) { return tag == "script" || tag == "style"; }

const std::set<std::string>& block_elements() {
    static const std::set<std::string> tags = {
        "address", "article", "aside",   "blockquote", "body",   "canvas", "caption",
        "dd",      "div",     "dl",      "dt",         "fieldset", "figcaption", "figure",
        "footer",  "form",    "h1",      "h2",         "h3",     "h4",     "h5",
        "h6",      "head",    "header",  "hgroup",     "hr",     "html",   "li",
        "main",    "nav",     "noscript", "ol",        "option", "output", "p",
        "pre",     "section", "select",  "table",      "tbody",  "td",     "tfoot",
        "th",      "thead",   "title",   "tr",         "ul",     "video"};
    return tags;
}

bool is_tag_name_char(char c) {
    return is_ascii_letter(c) || is_ascii_digit(c) || c == '-' || c == ':';
}

void append_utf8(std::string& out, unsigned long code) {
    if (code == 0 || code > 0x10FFFF) return;
    if (code < 0x80) {
        out.push_back(static_cast<char>(code));
    } else if (code < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (code >> 6)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else if (code < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (code >> 12)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (code >> 18)));
        out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t end = s.find(';', i + 1);
        if (end == std::string_view::npos || end - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, end - i - 1);
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name == "nbsp") {
            out.push_back(' ');
        } else if (!name.empty() && name[0] == '#') {
            unsigned long code = 0;
            bool valid = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t k = 2; k < name.size() && valid; ++k) {
                    char c = ascii_lower(name[k]);
                    if (is_ascii_digit(c)) code = code * 16 + static_cast<unsigned long>(c - '0');
                    else if (c >= 'a' && c <= 'f') code = code * 16 + static_cast<unsigned long>(c - 'a' + 10);
                    else valid = false;
                }
            } else {
                for (std::size_t k = 1; k < name.size() && valid; ++k) {
                    if (is_ascii_digit(name[k])) code = code * 10 + static_cast<unsigned long>(name[k] - '0');
                    else valid = false;
                }
            }
            if (valid) append_utf8(out, code);
            else { out.push_back(s[i]); ++i; continue; }
        } else {
            out.push_back(s[i++]);
            continue;
        }
        i = end + 1;
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    std::unique_ptr<Node> run() {
        auto root = std::make_unique<Node>();
        root->type = Node::Type::Document;
        std::vector<Node*> stack{root.get()};

        while (pos_ < src_.size()) {
            if (src_[pos_] != '<') {
                emit_text(stack.back(), consume_text());
                continue;
            }
            if (match("<!--")) {
                parse_comment(stack.back());
            } else if (match("</")) {
                parse_end_tag(stack);
            } else if (pos_ + 1 < src_.size() && is_ascii_letter(src_[pos_ + 1])) {
                parse_start_tag(stack);
            } else if (match("<!") || match("<?")) {
                skip_until('>');
            } else {
                // Bare '<' that opens no markup: treat as literal text.
                emit_text(stack.back(), "<");
                ++pos_;
            }
        }
        return root;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    bool match(std::string_view token) const {
        return src_.substr(pos_, token.size()) == token;
    }

    void skip_until(char c) {
        std::size_t end = src_.find(c, pos_);
        pos_ = (end == std::string_view::npos) ? src_.size() : end + 1;
    }

    std::string_view consume_text() {
        std::size_t start = pos_;
        std::size_t end = src_.find('<', pos_);
        if (end == std::string_view::npos) end = src_.size();
        pos_ = end;
        return src_.substr(start, end - start);
    }

    static void emit_text(Node* parent, std::string_view raw) {
        if (raw.empty()) return;
        auto node = std::make_unique<Node>();
        node->type = Node::Type::Text;
        node->text = decode_entities(raw);
        parent->children.push_back(std::move(node));
    }

    void parse_comment(Node* parent) {
        pos_ += 4;
        std::size_t end = src_.find("-->", pos_);
        auto node = std::make_unique<Node>();
        node->type = Node::Type::Comment;
        if (end == std::string_view::npos) {
            node->text = std::string(src_.substr(pos_));
            pos_ = src_.size();
        } else {
            node->text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end + 3;
        }
        parent->children.push_back(std::move(node));
    }

    std::string read_tag_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_tag_name_char(src_[pos_])) ++pos_;
        return to_lower(src_.substr(start, pos_ - start));
    }

    void skip_ws() {
        while (pos_ < src_.size() && is_ascii_space(src_[pos_])) ++pos_;
    }

    void parse_attributes(Node& el, bool& self_closing) {
        self_closing = false;
        while (pos_ < src_.size()) {
            skip_ws();
            if (pos_ >= src_.size()) return;
            if (src_[pos_] == '>') {
                ++pos_;
                return;
            }
            if (src_[pos_] == '/') {
                ++pos_;
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    ++pos_;
                    self_closing = true;
                    return;
                }
                continue;
            }
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '=' && src_[pos_] != '>' &&
                   src_[pos_] != '/' && !is_ascii_space(src_[pos_])) {
                ++pos_;
            }
            std::string name = to_lower(src_.substr(start, pos_ - start));
            std::string value;
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                skip_ws();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    char quote = src_[pos_++];
                    std::size_t vstart = pos_;
                    while (pos_ < src_.size() && src_[pos_] != quote) ++pos_;
                    value = decode_entities(src_.substr(vstart, pos_ - vstart));
                    if (pos_ < src_.size()) ++pos_;
                } else {
                    std::size_t vstart = pos_;
                    while (pos_ < src_.size() && !is_ascii_space(src_[pos_]) &&
                           src_[pos_] != '>') {
                        ++pos_;
                    }
                    value = decode_entities(src_.substr(vstart, pos_ - vstart));
                }
            }
            if (!name.empty()) el.attrs.emplace_back(std::move(name), std::move(value));
        }
    }

    void parse_start_tag(std::vector<Node*>& stack) {
        ++pos_;  // '<'
        auto el = std::make_unique<Node>();
        el->type = Node::Type::Element;
        el->tag = read_tag_name();
        bool self_closing = false;
        parse_attributes(*el, self_closing);

        Node* raw = el.get();
        stack.back()->children.push_back(std::move(el));

        if (self_closing || void_elements().contains(raw->tag)) return;

        if (is_raw_text_element(raw->tag)) {
            consume_raw_text(*raw);
            return;
        }
        stack.push_back(raw);
    }

    void consume_raw_text(Node& el) {
        const std::string close = "</" + el.tag;
        std::size_t search = pos_;
        std::size_t end = std::string_view::npos;
        while (search < src_.size()) {
            std::size_t candidate = src_.find('<', search);
            if (candidate == std::string_view::npos) break;
            if (starts_with_ci(src_.substr(candidate), close)) {
                end = candidate;
                break;
            }
            search = candidate + 1;
        }
        std::size_t text_end = (end == std::string_view::npos) ? src_.size() : end;
        if (text_end > pos_) {
            auto node = std::make_unique<Node>();
            node->type = Node::Type::Text;
            node->text = std::string(src_.substr(pos_, text_end - pos_));
            el.children.push_back(std::move(node));
        }
        pos_ = text_end;
        if (end != std::string_view::npos) {
            pos_ += close.size();
            skip_until('>');
        }
    }

    void parse_end_tag(std::vector<Node*>& stack) {
        pos_ += 2;  // '</'
        std::string tag = read_tag_name();
        skip_until('>');
        // Close the nearest matching open element; ignore stray end tags.
        for (std::size_t i = stack.size(); i-- > 1;) {
            if (stack[i]->tag == tag) {
                stack.resize(i);
                return;
            }
        }
    }
};

void collect_text(const Node& node, std::string& out) {
    switch (node.type) {
        case Node::Type::Text:
            out += node.text;
            return;
        case Node::Type::Comment:
            return;
        case Node::Type::Element:
            if (is_raw_text_element(node.tag) || node.tag == "noscript") return;
            if (node.tag == "br") {
                out.push_back('\n');
                return;
            }
            break;
        case Node::Type::Document:
            break;
    }
    const bool block = node.type == Node::Type::Element && block_elements().contains(node.tag);
    if (block) out.push_back('\n');
    for (const auto& child : node.children) collect_text(*child, out);
    if (block) out.push_back('\n');
}

}  // namespace

const std::string* Node::attr(std::string_view name) const {
    for (const auto& [key, value] : attrs) {
        if (key == name) return &value;
    }
    return nullptr;
}

bool Node::has_class(std::string_view cls) const {
    const std::string* value = attr("class");
    if (value == nullptr) return false;
    for (const auto& token : split_whitespace(*value)) {
        if (token == cls) return true;
    }
    return false;
}

std::unique_ptr<Node> parse(std::string_view source) { return Parser(source).run(); }

std::string visible_text(const Node& node) {
    std::string out;
    collect_text(node, out);
    return out;
}

bool Selector::Simple::matches(const Node& el) const {
    if (el.type != Node::Type::Element) return false;
    if (!tag.empty() && el.tag != tag) return false;
    if (!id.empty()) {
        const std::string* value = el.attr("id");
        if (value == nullptr || *value != id) return false;
    }
    for (const auto& cls : classes) {
        if (!el.has_class(cls)) return false;
    }
    return true;
}

Selector Selector::parse(const std::string& expression) {
    Selector selector;
    for (const auto& part : split_whitespace(expression)) {
        Simple simple;
        std::size_t i = 0;
        auto read_name = [&]() {
            std::size_t start = i;
            while (i < part.size() && part[i] != '.' && part[i] != '#') ++i;
            return part.substr(start, i - start);
        };
        if (i < part.size() && part[i] != '.' && part[i] != '#') {
            simple.tag = to_lower(read_name());
            for (char c : simple.tag) {
                if (!is_tag_name_char(c) && c != '*') {
                    throw Error(kModule, "invalid selector: " + expression);
                }
            }
            if (simple.tag == "*") simple.tag.clear();
        }
        while (i < part.size()) {
            char marker = part[i++];
            std::string name = read_name();
            if (name.empty()) throw Error(kModule, "invalid selector: " + expression);
            if (marker == '.') {
                simple.classes.push_back(name);
            } else if (marker == '#') {
                if (!simple.id.empty()) throw Error(kModule, "invalid selector: " + expression);
                simple.id = name;
            } else {
                throw Error(kModule, "invalid selector: " + expression);
            }
        }
        if (simple.tag.empty() && simple.id.empty() && simple.classes.empty()) {
            throw Error(kModule, "invalid selector: " + expression);
        }
        selector.chain_.push_back(std::move(simple));
    }
    if (selector.chain_.empty()) {
        throw Error(kModule, "invalid selector: empty expression");
    }
    return selector;
}

std::vector<const Node*> Selector::find_all(const Node& root) const {
    std::vector<const Node*> results;
    std::vector<const Node*> ancestors;
    auto dfs = [&](auto&& self, const Node& node) -> void {
        if (node.type == Node::Type::Element) {
            if (chain_.back().matches(node)) {
                // Greedy left-to-right scan of the open-element chain
                // satisfies the descendant combinator prefix.
                const std::size_t need = chain_.size() - 1;
                std::size_t pos = 0;
                for (const Node* anc : ancestors) {
                    if (pos < need && chain_[pos].matches(*anc)) ++pos;
                }
                if (pos >= need) results.push_back(&node);
            }
            ancestors.push_back(&node);
            for (const auto& child : node.children) self(self, *child);
            ancestors.pop_back();
        } else {
            for (const auto& child : node.children) self(self, *child);
        }
    };
    dfs(dfs, root);
    return results;
}

const Node* Selector::find_first(const Node& root) const {
    auto all = find_all(root);
    return all.empty() ? nullptr : all.front();
}

}  // namespace oniontext::html
