#include "sls/yaml.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <sstream>

namespace sls::yaml {

namespace {

bool iequals(const std::string& a, const char* b) {
    std::size_t n = 0;
    while (b[n] != '\0') ++n;
    if (a.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
    }
    return true;
}

std::string rtrim(const std::string& s) {
    std::size_t end = s.size();
    while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
    return s.substr(0, end);
}

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    while (begin < s.size() && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
    return rtrim(s.substr(begin));
}

bool is_digit_str(const std::string& s, std::size_t from) {
    if (from >= s.size()) return false;
    for (std::size_t i = from; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

const Node* Node::find(const std::string& key) const {
    if (kind != NodeKind::Mapping) return nullptr;
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

Node* Node::find(const std::string& key) {
    return const_cast<Node*>(static_cast<const Node*>(this)->find(key));
}

bool Node::operator==(const Node& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case NodeKind::Scalar:
            // quoted is emission fidelity, not value identity; nulls are
            // equal regardless of spelling ("", "~", "null").
            if (scalar_kind != other.scalar_kind) return false;
            return scalar_kind == ScalarKind::Null || scalar_text == other.scalar_text;
        case NodeKind::Tagged:
            return tag == other.tag && children == other.children;
        case NodeKind::Sequence:
            return children == other.children;
        case NodeKind::Mapping:
            return entries == other.entries;
    }
    return false;
}

Node make_scalar(std::string text, ScalarKind kind, bool quoted) {
    Node n;
    n.kind = NodeKind::Scalar;
    n.scalar_kind = kind;
    n.scalar_text = std::move(text);
    n.quoted = quoted;
    return n;
}

Node make_string(std::string text, bool quoted) {
    return make_scalar(std::move(text), ScalarKind::String, quoted);
}

Node make_null() {
    return make_scalar("", ScalarKind::Null, false);
}

Node make_mapping() {
    Node n;
    n.kind = NodeKind::Mapping;
    return n;
}

Node make_sequence() {
    Node n;
    n.kind = NodeKind::Sequence;
    return n;
}

Node make_tagged(std::string tag, Node payload) {
    Node n;
    n.kind = NodeKind::Tagged;
    n.tag = std::move(tag);
    n.children.push_back(std::move(payload));
    return n;
}

ScalarKind infer_scalar_kind(const std::string& text) {
    if (text.empty() || text == "~" || iequals(text, "null")) return ScalarKind::Null;
    if (iequals(text, "true") || iequals(text, "false") || iequals(text, "yes") ||
        iequals(text, "no") || iequals(text, "on") || iequals(text, "off")) {
        return ScalarKind::Bool;
    }
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') ++i;
    if (i < text.size() && is_digit_str(text, i)) return ScalarKind::Int;
    // Float: digits with a decimal point and/or exponent.
    {
        std::size_t p = i;
        bool digits = false, dot = false, expo = false, ok = p < text.size();
        while (ok && p < text.size()) {
            char c = text[p];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits = true;
                ++p;
            } else if (c == '.' && !dot && !expo) {
                dot = true;
                ++p;
            } else if ((c == 'e' || c == 'E') && digits && !expo) {
                expo = true;
                ++p;
                if (p < text.size() && (text[p] == '+' || text[p] == '-')) ++p;
                if (p >= text.size() || !is_digit_str(text, p)) ok = false;
                p = text.size();
            } else {
                ok = false;
            }
        }
        if (ok && digits && (dot || expo)) return ScalarKind::Float;
    }
    return ScalarKind::String;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct SourceLine {
    int number = 0;       // 1-based
    int indent = 0;       // leading spaces of the stripped content
    bool blank = true;    // nothing left after comment stripping
    std::string content;  // comment-stripped, trailing-whitespace-trimmed, no indent
    std::string raw;      // original line (for block scalar bodies)
};

// Removes a trailing comment, honoring single/double quotes. A '#' only opens
// a comment at line start or after whitespace.
std::string strip_comment(const std::string& line) {
    char quote = '\0';
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote != '\0') {
            if (quote == '\'' && c == '\'') {
                if (i + 1 < line.size() && line[i + 1] == '\'') {
                    ++i;  // escaped quote
                } else {
                    quote = '\0';
                }
            } else if (quote == '"' && c == '"') {
                quote = '\0';
            } else if (quote == '"' && c == '\\') {
                ++i;
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
            return line.substr(0, i);
        }
    }
    return line;
}

class Parser {
public:
    explicit Parser(const std::string& text) {
        std::size_t start = 0;
        int number = 1;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            std::string raw = (nl == std::string::npos) ? text.substr(start)
                                                        : text.substr(start, nl - start);
            if (nl == std::string::npos && raw.empty() && start == text.size() && number > 1) break;
            SourceLine line;
            line.number = number++;
            line.raw = raw;
            std::string stripped = rtrim(strip_comment(raw));
            std::size_t indent = 0;
            while (indent < stripped.size() && stripped[indent] == ' ') ++indent;
            if (indent < stripped.size() && stripped[indent] == '\t') {
                throw SyntaxError("tab character in indentation", line.number,
                                  static_cast<int>(indent) + 1);
            }
            line.indent = static_cast<int>(indent);
            line.content = stripped.substr(indent);
            line.blank = line.content.empty();
            lines_.push_back(std::move(line));
            if (nl == std::string::npos) break;
            start = nl + 1;
        }
    }

    Node parse_document() {
        pos_ = 0;
        bool seen_marker = false;
        while (pos_ < lines_.size()) {
            const SourceLine& line = lines_[pos_];
            if (line.blank) {
                ++pos_;
                continue;
            }
            if (line.indent == 0 && line.content[0] == '%') {
                ++pos_;
                continue;
            }
            if (line.indent == 0 && line.content == "---") {
                if (seen_marker) {
                    throw SyntaxError("multiple documents are not supported", line.number, 1);
                }
                seen_marker = true;
                ++pos_;
                continue;
            }
            if (line.indent == 0 && line.content == "...") return make_null();
            break;
        }
        if (pos_ >= lines_.size()) return make_null();
        Node root = parse_block(lines_[pos_].indent);
        skip_blank();
        if (pos_ < lines_.size()) {
            const SourceLine& line = lines_[pos_];
            if (!(line.indent == 0 && (line.content == "..." || line.content == "---"))) {
                throw SyntaxError("unexpected content after document", line.number, 1);
            }
            if (line.content == "---") {
                throw SyntaxError("multiple documents are not supported", line.number, 1);
            }
        }
        return root;
    }

private:
    std::vector<SourceLine> lines_;
    std::size_t pos_ = 0;

    void skip_blank() {
        while (pos_ < lines_.size() && lines_[pos_].blank) ++pos_;
    }

    const SourceLine* peek_content() {
        std::size_t p = pos_;
        while (p < lines_.size() && lines_[p].blank) ++p;
        return p < lines_.size() ? &lines_[p] : nullptr;
    }

    static bool starts_sequence_entry(const std::string& content) {
        return content == "-" || content.rfind("- ", 0) == 0;
    }

    Node parse_block(int indent) {
        skip_blank();
        const SourceLine& line = lines_[pos_];
        if (starts_sequence_entry(line.content)) return parse_sequence(indent);
        bool is_mapping;
        if (line.content[0] == '"' || line.content[0] == '\'') {
            is_mapping = quoted_key_follows(line.content, line.number);
        } else {
            is_mapping = find_key_separator(line.content) != std::string::npos;
        }
        if (is_mapping) return parse_mapping(indent, nullptr, 0);
        // A lone scalar in block position.
        Node value = parse_inline(line.content, line.number, line.indent + 1, line.indent);
        ++pos_;
        const SourceLine* next = peek_content();
        if (next != nullptr && next->indent >= indent) {
            throw SyntaxError("unexpected content after scalar", next->number, next->indent + 1);
        }
        return value;
    }

    // Position of the ':' that separates key from value, or npos. The colon
    // must be followed by a space or end the content (values like
    // "s3:ObjectCreated:*" stay intact).
    static std::size_t find_key_separator(const std::string& content) {
        char quote = '\0';
        int flow_depth = 0;
        for (std::size_t i = 0; i < content.size(); ++i) {
            char c = content[i];
            if (quote != '\0') {
                if (quote == '\'' && c == '\'') {
                    if (i + 1 < content.size() && content[i + 1] == '\'') {
                        ++i;
                    } else {
                        quote = '\0';
                    }
                } else if (quote == '"' && c == '"') {
                    quote = '\0';
                } else if (quote == '"' && c == '\\') {
                    ++i;
                }
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '[' || c == '{') {
                ++flow_depth;
            } else if (c == ']' || c == '}') {
                --flow_depth;
            } else if (c == ':' && flow_depth == 0 &&
                       (i + 1 == content.size() || content[i + 1] == ' ')) {
                return i;
            }
        }
        return std::string::npos;
    }

    // Parses a block mapping whose entries sit at column `indent`. When
    // `first_inline` is non-null the first entry comes from that text (the
    // compact "- key: value" sequence form).
    Node parse_mapping(int indent, const std::string* first_inline, int first_number) {
        Node map = make_mapping();
        bool use_inline = first_inline != nullptr;
        while (true) {
            std::string content;
            int number;
            if (use_inline) {
                content = *first_inline;
                number = first_number;
            } else {
                skip_blank();
                if (pos_ >= lines_.size()) break;
                const SourceLine& line = lines_[pos_];
                if (line.indent < indent) break;
                if (line.indent == 0 && (line.content == "---" || line.content == "...")) break;
                if (line.indent > indent) {
                    throw SyntaxError("bad indentation in mapping", line.number, line.indent + 1);
                }
                if (starts_sequence_entry(line.content)) {
                    throw SyntaxError("sequence entry not allowed in mapping", line.number,
                                      line.indent + 1);
                }
                content = line.content;
                number = line.number;
            }

            std::string key;
            std::size_t after_key;
            if (content[0] == '"' || content[0] == '\'') {
                std::size_t end;
                key = read_quoted(content, 0, end, number, indent + 1);
                after_key = end;
                while (after_key < content.size() && content[after_key] == ' ') ++after_key;
                if (after_key >= content.size() || content[after_key] != ':') {
                    throw SyntaxError("expected ':' after quoted key", number,
                                      indent + static_cast<int>(after_key) + 1);
                }
            } else {
                after_key = find_key_separator(content);
                if (after_key == std::string::npos) {
                    throw SyntaxError("expected key-value pair", number, indent + 1);
                }
                key = trim(content.substr(0, after_key));
                if (key.empty()) {
                    throw SyntaxError("empty mapping key", number, indent + 1);
                }
            }
            if (map.find(key) != nullptr) {
                throw SyntaxError("duplicate mapping key '" + key + "'", number, indent + 1);
            }

            std::string rest = trim(content.substr(after_key + 1));
            int value_col = indent + static_cast<int>(after_key) + 3;
            if (!use_inline) ++pos_;
            use_inline = false;

            Node value;
            if (rest.empty()) {
                const SourceLine* next = peek_content();
                if (next != nullptr && next->indent > indent &&
                    !(next->indent == 0 && (next->content == "---" || next->content == "..."))) {
                    value = parse_block(next->indent);
                } else if (next != nullptr && next->indent == indent &&
                           starts_sequence_entry(next->content)) {
                    // Sequences are commonly written at the key's own indent.
                    value = parse_sequence(indent);
                } else {
                    value = make_null();
                }
            } else {
                value = parse_inline(rest, number, value_col, indent);
            }
            map.entries.emplace_back(std::move(key), std::move(value));
        }
        return map;
    }

    Node parse_sequence(int indent) {
        Node seq = make_sequence();
        while (true) {
            skip_blank();
            if (pos_ >= lines_.size()) break;
            const SourceLine& line = lines_[pos_];
            if (line.indent != indent || !starts_sequence_entry(line.content)) {
                if (line.indent > indent) {
                    throw SyntaxError("bad indentation in sequence", line.number, line.indent + 1);
                }
                break;
            }
            std::string rest = line.content.size() > 1 ? trim(line.content.substr(2)) : "";
            int item_indent = indent + 2;
            int number = line.number;
            ++pos_;

            if (rest.empty()) {
                const SourceLine* next = peek_content();
                if (next != nullptr && next->indent > indent) {
                    seq.children.push_back(parse_block(next->indent));
                } else {
                    seq.children.push_back(make_null());
                }
            } else if (starts_sequence_entry(rest)) {
                throw SyntaxError("nested inline sequence entry is not supported", number,
                                  indent + 3);
            } else if (rest[0] != '"' && rest[0] != '\'' &&
                       find_key_separator(rest) != std::string::npos) {
                seq.children.push_back(parse_mapping(item_indent, &rest, number));
            } else if ((rest[0] == '"' || rest[0] == '\'') && quoted_key_follows(rest, number)) {
                seq.children.push_back(parse_mapping(item_indent, &rest, number));
            } else {
                seq.children.push_back(parse_inline(rest, number, item_indent + 1, indent));
            }
        }
        return seq;
    }

    bool quoted_key_follows(const std::string& rest, int number) {
        std::size_t end;
        read_quoted(rest, 0, end, number, 1);
        while (end < rest.size() && rest[end] == ' ') ++end;
        return end < rest.size() && rest[end] == ':';
    }

    // Inline values: scalars, tags, flow collections, block scalar headers.
    // May consume following source lines (block scalars, tag-with-block,
    // multi-line flow).
    Node parse_inline(const std::string& text, int number, int column, int parent_indent) {
        if (text[0] == '&' || text[0] == '*') {
            throw SyntaxError("anchors and aliases are not supported", number, column);
        }
        if (text[0] == '|' || text[0] == '>') {
            return parse_block_scalar(text, number, column, parent_indent);
        }
        if (text[0] == '!') {
            std::size_t end = 1;
            while (end < text.size() && text[end] != ' ') ++end;
            std::string tag = text.substr(1, end - 1);
            if (tag.empty()) {
                throw SyntaxError("empty tag", number, column);
            }
            std::string rest = trim(text.substr(end));
            if (rest.empty()) {
                const SourceLine* next = peek_content();
                if (next != nullptr && next->indent > parent_indent) {
                    return make_tagged(std::move(tag), parse_block(next->indent));
                }
                return make_tagged(std::move(tag), make_null());
            }
            return make_tagged(std::move(tag),
                               parse_inline(rest, number, column + static_cast<int>(end), parent_indent));
        }
        if (text[0] == '[' || text[0] == '{') {
            return parse_flow(text, number, column);
        }
        if (text[0] == '"' || text[0] == '\'') {
            std::size_t end;
            std::string value = read_quoted(text, 0, end, number, column);
            if (trim(text.substr(end)).size() > 0) {
                throw SyntaxError("unexpected text after quoted scalar", number,
                                  column + static_cast<int>(end));
            }
            return make_string(std::move(value), true);
        }
        return make_scalar(text, infer_scalar_kind(text), false);
    }

    Node parse_block_scalar(const std::string& header, int number, int column, int parent_indent) {
        char style = header[0];
        char chomp = '\0';
        int explicit_indent = 0;
        for (std::size_t i = 1; i < header.size(); ++i) {
            char c = header[i];
            if (c == '-' || c == '+') {
                chomp = c;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                explicit_indent = c - '0';
            } else {
                throw SyntaxError("invalid block scalar header", number, column);
            }
        }

        std::vector<std::string> body;
        int body_indent = explicit_indent > 0 ? parent_indent + explicit_indent : -1;
        while (pos_ < lines_.size()) {
            const SourceLine& line = lines_[pos_];
            const std::string& raw = line.raw;
            std::size_t sp = 0;
            while (sp < raw.size() && raw[sp] == ' ') ++sp;
            bool raw_blank = sp >= raw.size() || rtrim(raw).empty();
            if (raw_blank) {
                body.push_back("");
                ++pos_;
                continue;
            }
            if (static_cast<int>(sp) <= parent_indent) break;
            if (body_indent < 0) body_indent = static_cast<int>(sp);
            if (static_cast<int>(sp) < body_indent) break;
            body.push_back(rtrim(raw).substr(static_cast<std::size_t>(body_indent)));
            ++pos_;
        }
        while (!body.empty() && body.back().empty()) {
            if (chomp == '+') break;
            body.pop_back();
        }

        std::string value;
        if (style == '|') {
            for (std::size_t i = 0; i < body.size(); ++i) {
                value += body[i];
                value += '\n';
            }
        } else {
            bool prev_text = false;
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (body[i].empty()) {
                    value += '\n';
                    prev_text = false;
                } else {
                    if (prev_text) value += ' ';
                    value += body[i];
                    prev_text = true;
                }
            }
            if (!body.empty()) value += '\n';
        }
        if (chomp == '-') {
            while (!value.empty() && value.back() == '\n') value.pop_back();
        }
        return make_string(std::move(value), true);
    }

    // Flow collections may span lines; physical lines are joined with a space
    // until brackets balance.
    Node parse_flow(const std::string& first, int number, int column) {
        std::string buffer = first;
        while (flow_depth(buffer) > 0) {
            skip_blank_for_flow();
            if (pos_ >= lines_.size()) {
                throw SyntaxError("unterminated flow collection", number, column);
            }
            buffer += ' ';
            buffer += lines_[pos_].content;
            ++pos_;
        }
        std::size_t i = 0;
        Node node = parse_flow_value(buffer, i, number, column);
        while (i < buffer.size() && buffer[i] == ' ') ++i;
        if (i != buffer.size()) {
            throw SyntaxError("unexpected text after flow collection", number,
                              column + static_cast<int>(i));
        }
        return node;
    }

    void skip_blank_for_flow() {
        while (pos_ < lines_.size() && lines_[pos_].blank) ++pos_;
    }

    static int flow_depth(const std::string& s) {
        char quote = '\0';
        int depth = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (quote != '\0') {
                if (quote == '\'' && c == '\'') {
                    if (i + 1 < s.size() && s[i + 1] == '\'') {
                        ++i;
                    } else {
                        quote = '\0';
                    }
                } else if (quote == '"' && c == '"') {
                    quote = '\0';
                } else if (quote == '"' && c == '\\') {
                    ++i;
                }
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '[' || c == '{') {
                ++depth;
            } else if (c == ']' || c == '}') {
                --depth;
            }
        }
        return depth;
    }

    Node parse_flow_value(const std::string& s, std::size_t& i, int number, int column) {
        while (i < s.size() && s[i] == ' ') ++i;
        if (i >= s.size()) {
            throw SyntaxError("unexpected end of flow value", number, column);
        }
        char c = s[i];
        if (c == '!') {
            std::size_t end = i + 1;
            while (end < s.size() && s[end] != ' ' && s[end] != ',' && s[end] != ']' &&
                   s[end] != '}') {
                ++end;
            }
            std::string tag = s.substr(i + 1, end - i - 1);
            if (tag.empty()) throw SyntaxError("empty tag", number, column);
            i = end;
            while (i < s.size() && s[i] == ' ') ++i;
            if (i >= s.size() || s[i] == ',' || s[i] == ']' || s[i] == '}') {
                return make_tagged(std::move(tag), make_null());
            }
            return make_tagged(std::move(tag), parse_flow_value(s, i, number, column));
        }
        if (c == '[') {
            Node seq = make_sequence();
            ++i;
            while (true) {
                while (i < s.size() && s[i] == ' ') ++i;
                if (i >= s.size()) throw SyntaxError("unterminated flow sequence", number, column);
                if (s[i] == ']') {
                    ++i;
                    break;
                }
                seq.children.push_back(parse_flow_value(s, i, number, column));
                while (i < s.size() && s[i] == ' ') ++i;
                if (i < s.size() && s[i] == ',') {
                    ++i;
                } else if (i >= s.size() || s[i] != ']') {
                    throw SyntaxError("expected ',' or ']' in flow sequence", number,
                                      column + static_cast<int>(i));
                }
            }
            return seq;
        }
        if (c == '{') {
            Node map = make_mapping();
            ++i;
            while (true) {
                while (i < s.size() && s[i] == ' ') ++i;
                if (i >= s.size()) throw SyntaxError("unterminated flow mapping", number, column);
                if (s[i] == '}') {
                    ++i;
                    break;
                }
                std::string key;
                if (s[i] == '"' || s[i] == '\'') {
                    std::size_t end;
                    key = read_quoted(s, i, end, number, column);
                    i = end;
                } else {
                    std::size_t end = i;
                    while (end < s.size() && s[end] != ':' && s[end] != ',' && s[end] != '}') ++end;
                    key = trim(s.substr(i, end - i));
                    i = end;
                }
                while (i < s.size() && s[i] == ' ') ++i;
                Node value = make_null();
                if (i < s.size() && s[i] == ':') {
                    ++i;
                    while (i < s.size() && s[i] == ' ') ++i;
                    if (i < s.size() && s[i] != ',' && s[i] != '}') {
                        value = parse_flow_value(s, i, number, column);
                    }
                }
                if (map.find(key) != nullptr) {
                    throw SyntaxError("duplicate mapping key '" + key + "'", number, column);
                }
                map.entries.emplace_back(std::move(key), std::move(value));
                while (i < s.size() && s[i] == ' ') ++i;
                if (i < s.size() && s[i] == ',') {
                    ++i;
                } else if (i >= s.size() || s[i] != '}') {
                    throw SyntaxError("expected ',' or '}' in flow mapping", number,
                                      column + static_cast<int>(i));
                }
            }
            return map;
        }
        if (c == '"' || c == '\'') {
            std::size_t end;
            std::string value = read_quoted(s, i, end, number, column);
            i = end;
            return make_string(std::move(value), true);
        }
        std::size_t end = i;
        while (end < s.size() && s[end] != ',' && s[end] != ']' && s[end] != '}') ++end;
        std::string text = trim(s.substr(i, end - i));
        i = end;
        return make_scalar(text, infer_scalar_kind(text), false);
    }

    // Reads the quoted scalar starting at s[start]; `end` is set one past the
    // closing quote.
    std::string read_quoted(const std::string& s, std::size_t start, std::size_t& end, int number,
                            int column) const {
        char quote = s[start];
        std::string out;
        std::size_t i = start + 1;
        while (i < s.size()) {
            char c = s[i];
            if (quote == '\'') {
                if (c == '\'') {
                    if (i + 1 < s.size() && s[i + 1] == '\'') {
                        out += '\'';
                        i += 2;
                        continue;
                    }
                    end = i + 1;
                    return out;
                }
                out += c;
                ++i;
            } else {
                if (c == '"') {
                    end = i + 1;
                    return out;
                }
                if (c == '\\' && i + 1 < s.size()) {
                    char e = s[i + 1];
                    switch (e) {
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        case 'r': out += '\r'; break;
                        case '0': out += '\0'; break;
                        case '\\': out += '\\'; break;
                        case '"': out += '"'; break;
                        case '\'': out += '\''; break;
                        default: out += e; break;
                    }
                    i += 2;
                    continue;
                }
                out += c;
                ++i;
            }
        }
        throw SyntaxError("unterminated quoted scalar", number, column);
    }
};

// ---------------------------------------------------------------------------
// Emitter
// ---------------------------------------------------------------------------

bool plain_scalar_is_safe(const std::string& text, ScalarKind kind) {
    if (text.empty()) return kind == ScalarKind::Null;
    if (kind == ScalarKind::String && infer_scalar_kind(text) != ScalarKind::String) return false;
    if (text.front() == ' ' || text.back() == ' ') return false;
    switch (text.front()) {
        case '!': case '&': case '*': case '?': case '|': case '>': case '%':
        case '@': case '`': case '"': case '\'': case '#': case ',': case '[':
        case ']': case '{': case '}':
            return false;
        default:
            break;
    }
    if (text == "-" || text.rfind("- ", 0) == 0) return false;
    if (text.find('\n') != std::string::npos || text.find('\t') != std::string::npos) return false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == ':' && (i + 1 == text.size() || text[i + 1] == ' ')) return false;
        if (text[i] == '#' && i > 0 && text[i - 1] == ' ') return false;
        if (static_cast<unsigned char>(text[i]) < 0x20) return false;
    }
    return true;
}

std::string quote_scalar(const std::string& text) {
    bool needs_double = false;
    for (char c : text) {
        if (c == '\n' || c == '\t' || static_cast<unsigned char>(c) < 0x20) {
            needs_double = true;
            break;
        }
    }
    std::string out;
    if (needs_double) {
        out += '"';
        for (char c : text) {
            switch (c) {
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                case '\\': out += "\\\\"; break;
                case '"': out += "\\\""; break;
                default: out += c; break;
            }
        }
        out += '"';
    } else {
        out += '\'';
        for (char c : text) {
            out += c;
            if (c == '\'') out += '\'';
        }
        out += '\'';
    }
    return out;
}

std::string scalar_repr(const Node& node) {
    if (node.scalar_kind == ScalarKind::Null && node.scalar_text.empty() && !node.quoted) {
        return "";
    }
    if (node.quoted || !plain_scalar_is_safe(node.scalar_text, node.scalar_kind)) {
        return quote_scalar(node.scalar_text);
    }
    return node.scalar_text;
}

std::string key_repr(const std::string& key) {
    if (plain_scalar_is_safe(key, ScalarKind::String)) return key;
    return quote_scalar(key);
}

bool flow_representable(const Node& node) {
    switch (node.kind) {
        case NodeKind::Scalar:
            return node.scalar_text.find('\n') == std::string::npos;
        case NodeKind::Tagged:
            return flow_representable(node.payload());
        case NodeKind::Sequence:
            return std::all_of(node.children.begin(), node.children.end(), flow_representable);
        case NodeKind::Mapping:
            return std::all_of(node.entries.begin(), node.entries.end(),
                               [](const auto& e) { return flow_representable(e.second); });
    }
    return false;
}

std::string flow_repr(const Node& node) {
    switch (node.kind) {
        case NodeKind::Scalar: {
            std::string repr = scalar_repr(node);
            if (repr.empty()) return "null";
            // Commas and brackets would be eaten by the flow reader.
            if (!node.quoted &&
                repr.find_first_of(",[]{}") != std::string::npos) {
                return quote_scalar(node.scalar_text);
            }
            return repr;
        }
        case NodeKind::Tagged:
            return "!" + node.tag + " " + flow_repr(node.payload());
        case NodeKind::Sequence: {
            std::string out = "[";
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i > 0) out += ", ";
                out += flow_repr(node.children[i]);
            }
            return out + "]";
        }
        case NodeKind::Mapping: {
            std::string out = "{";
            for (std::size_t i = 0; i < node.entries.size(); ++i) {
                if (i > 0) out += ", ";
                out += key_repr(node.entries[i].first) + ": " + flow_repr(node.entries[i].second);
            }
            return out + "}";
        }
    }
    return "";
}

// Single-line rendering for value position, or nullopt when the node needs a
// block layout.
std::optional<std::string> inline_repr(const Node& node) {
    switch (node.kind) {
        case NodeKind::Scalar:
            return scalar_repr(node);
        case NodeKind::Tagged: {
            const Node& payload = node.payload();
            if (payload.is_scalar() && payload.scalar_text.find('\n') == std::string::npos) {
                std::string repr = scalar_repr(payload);
                return "!" + node.tag + (repr.empty() ? "" : " " + repr);
            }
            if (flow_representable(payload) && !payload.is_scalar()) {
                return "!" + node.tag + " " + flow_repr(payload);
            }
            return std::nullopt;
        }
        case NodeKind::Sequence:
            if (node.children.empty()) return "[]";
            return std::nullopt;
        case NodeKind::Mapping:
            if (node.entries.empty()) return "{}";
            return std::nullopt;
    }
    return std::nullopt;
}

void emit_block(const Node& node, int indent, std::vector<std::string>& out);

void emit_mapping(const Node& node, int indent, std::vector<std::string>& out) {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, value] : node.entries) {
        std::optional<std::string> single = inline_repr(value);
        if (single.has_value()) {
            std::string line = pad + key_repr(key) + ":";
            if (!single->empty()) line += " " + *single;
            out.push_back(std::move(line));
        } else if (value.is_tagged()) {
            out.push_back(pad + key_repr(key) + ": !" + value.tag);
            emit_block(value.payload(), indent + 2, out);
        } else {
            out.push_back(pad + key_repr(key) + ":");
            emit_block(value, indent + 2, out);
        }
    }
}

void emit_sequence(const Node& node, int indent, std::vector<std::string>& out) {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const Node& item : node.children) {
        std::optional<std::string> single = inline_repr(item);
        if (single.has_value()) {
            out.push_back(pad + (single->empty() ? "-" : "- " + *single));
            continue;
        }
        if (item.is_sequence()) {
            // A dash line of its own; inline "- -" nesting is not readable.
            out.push_back(pad + "-");
            emit_block(item, indent + 2, out);
            continue;
        }
        // Compact form: the item's first line shares the dash line.
        std::vector<std::string> sub;
        if (item.is_tagged()) {
            sub.push_back(std::string(static_cast<std::size_t>(indent + 2), ' ') + "!" + item.tag);
            emit_block(item.payload(), indent + 4, sub);
        } else {
            emit_block(item, indent + 2, sub);
        }
        sub.front()[static_cast<std::size_t>(indent)] = '-';
        out.insert(out.end(), sub.begin(), sub.end());
    }
}

void emit_block(const Node& node, int indent, std::vector<std::string>& out) {
    switch (node.kind) {
        case NodeKind::Mapping:
            emit_mapping(node, indent, out);
            break;
        case NodeKind::Sequence:
            emit_sequence(node, indent, out);
            break;
        case NodeKind::Scalar: {
            std::string repr = scalar_repr(node);
            out.push_back(std::string(static_cast<std::size_t>(indent), ' ') +
                          (repr.empty() ? "null" : repr));
            break;
        }
        case NodeKind::Tagged: {
            std::optional<std::string> single = inline_repr(node);
            if (single.has_value()) {
                out.push_back(std::string(static_cast<std::size_t>(indent), ' ') + *single);
            } else {
                out.push_back(std::string(static_cast<std::size_t>(indent), ' ') + "!" + node.tag);
                emit_block(node.payload(), indent + 2, out);
            }
            break;
        }
    }
}

}  // namespace

Node parse(const std::string& text) {
    Parser parser(text);
    return parser.parse_document();
}

std::string serialize(const Node& root) {
    std::vector<std::string> lines;
    emit_block(root, 0, lines);
    std::string out;
    for (const std::string& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace sls::yaml
