#include "sls/config_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <stdexcept>

namespace sls {

namespace {

const char* kEscapable = ".[]=%";

std::string escape_segment(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (std::strchr(kEscapable, c) != nullptr) {
            static const char* hex = "0123456789ABCDEF";
            out += '%';
            out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
            out += hex[static_cast<unsigned char>(c) & 0xF];
        } else {
            out += c;
        }
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::string unescape_segment(const std::string& text) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size()) {
            int hi = hex_value(text[i + 1]);
            int lo = hex_value(text[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>((hi << 4) | lo);
                i += 2;
                continue;
            }
        }
        out += text[i];
    }
    return out;
}

}  // namespace

std::string ParameterPath::render() const {
    std::string out;
    bool first = true;
    for (const PathSegment& seg : segments) {
        if (seg.is_index) {
            out += '[';
            out += std::to_string(seg.index);
            out += ']';
        } else {
            if (!first) out += '.';
            out += escape_segment(seg.key);
        }
        first = false;
    }
    if (kind == PathKind::ScalarValue) out += '=';
    if (kind == PathKind::ResourceTypeDecl) out += "=!";
    return out;
}

ParameterPath ParameterPath::parse(const std::string& text) {
    ParameterPath path;
    std::string body = text;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "=!") == 0) {
        path.kind = PathKind::ResourceTypeDecl;
        body.erase(body.size() - 2);
    } else if (!body.empty() && body.back() == '=') {
        path.kind = PathKind::ScalarValue;
        body.erase(body.size() - 1);
    }
    if (body.empty()) throw std::invalid_argument("empty parameter path");

    std::size_t i = 0;
    bool expect_key = true;
    while (i < body.size()) {
        if (body[i] == '[') {
            std::size_t close = body.find(']', i);
            if (close == std::string::npos || close == i + 1) {
                throw std::invalid_argument("bad index segment in path: " + text);
            }
            std::string digits = body.substr(i + 1, close - i - 1);
            for (char c : digits) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    throw std::invalid_argument("bad index segment in path: " + text);
                }
            }
            path.segments.push_back(PathSegment::of_index(std::stoul(digits)));
            i = close + 1;
            if (i < body.size() && body[i] == '.') {
                ++i;
                expect_key = true;
            } else {
                expect_key = false;
            }
            continue;
        }
        std::size_t end = i;
        while (end < body.size() && body[end] != '.' && body[end] != '[') ++end;
        if (end == i) throw std::invalid_argument("empty segment in path: " + text);
        path.segments.push_back(PathSegment::of_key(unescape_segment(body.substr(i, end - i))));
        i = end;
        if (i < body.size() && body[i] == '.') {
            ++i;
            expect_key = true;
        } else {
            expect_key = false;
        }
    }
    if (expect_key && !path.segments.empty() && i >= body.size() && body.back() == '.') {
        throw std::invalid_argument("trailing dot in path: " + text);
    }
    if (path.segments.empty()) throw std::invalid_argument("empty parameter path");
    return path;
}

ConfigDocument parse_template(const std::string& text, const std::string& origin) {
    yaml::Node root = yaml::parse(text);
    if (!root.is_mapping()) throw EmptyTemplate();
    ConfigDocument doc;
    doc.source_text = text;
    doc.root = std::move(root);
    doc.origin = origin;
    return doc;
}

std::string serialize(const ConfigDocument& doc) {
    return yaml::serialize(doc.root);
}

namespace {

bool is_resource_type_position(const std::vector<PathSegment>& segments) {
    return segments.size() == 3 && !segments[0].is_index && segments[0].key == "Resources" &&
           !segments[1].is_index && !segments[2].is_index && segments[2].key == "Type";
}

// Null scalars carry no value parameter; an absent value is not a parameter.
bool counts_as_value(const yaml::Node& node) {
    if (node.is_tagged()) return true;
    return node.is_scalar() && node.scalar_kind != yaml::ScalarKind::Null;
}

void enumerate_node(const yaml::Node& node, std::vector<PathSegment>& prefix,
                    std::vector<ParameterPath>& out) {
    if (node.is_mapping()) {
        for (const auto& [key, value] : node.entries) {
            prefix.push_back(PathSegment::of_key(key));
            out.push_back({prefix, PathKind::EntryKey});
            if (counts_as_value(value)) {
                PathKind kind = (value.is_scalar() && is_resource_type_position(prefix))
                                    ? PathKind::ResourceTypeDecl
                                    : PathKind::ScalarValue;
                out.push_back({prefix, kind});
            } else {
                enumerate_node(value, prefix, out);
            }
            prefix.pop_back();
        }
    } else if (node.is_sequence()) {
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            prefix.push_back(PathSegment::of_index(i));
            if (counts_as_value(node.children[i])) {
                out.push_back({prefix, PathKind::ScalarValue});
            } else {
                enumerate_node(node.children[i], prefix, out);
            }
            prefix.pop_back();
        }
    }
}

}  // namespace

std::vector<ParameterPath> enumerate_parameters(const ConfigDocument& doc) {
    std::vector<ParameterPath> out;
    std::vector<PathSegment> prefix;
    enumerate_node(doc.root, prefix, out);
    return out;
}

std::vector<ResourceDecl> list_resources(const ConfigDocument& doc) {
    std::vector<ResourceDecl> out;
    const yaml::Node* resources = doc.root.find("Resources");
    if (resources == nullptr || !resources->is_mapping()) return out;
    for (const auto& [name, node] : resources->entries) {
        ResourceDecl decl;
        decl.logical_name = name;
        decl.properties_path.kind = PathKind::EntryKey;
        decl.properties_path.segments = {PathSegment::of_key("Resources"),
                                         PathSegment::of_key(name)};
        const yaml::Node* type = node.is_mapping() ? node.find("Type") : nullptr;
        if (type != nullptr && type->is_scalar() &&
            type->scalar_kind != yaml::ScalarKind::Null) {
            decl.resource_type = type->scalar_text;
        } else {
            decl.type_missing = true;
        }
        if (node.is_mapping() && node.find("Properties") != nullptr) {
            decl.properties_path.segments.push_back(PathSegment::of_key("Properties"));
        }
        out.push_back(std::move(decl));
    }
    return out;
}

const yaml::Node* resolve(const ConfigDocument& doc, const ParameterPath& path) {
    const yaml::Node* node = &doc.root;
    for (const PathSegment& seg : path.segments) {
        if (seg.is_index) {
            if (!node->is_sequence() || seg.index >= node->children.size()) return nullptr;
            node = &node->children[seg.index];
        } else {
            if (!node->is_mapping()) return nullptr;
            node = node->find(seg.key);
            if (node == nullptr) return nullptr;
        }
    }
    return node;
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Whole-word replacement of logical resource names with "PH<resource type>".
std::string replace_logical_names(const std::string& text,
                                  const std::vector<std::pair<std::string, std::string>>& names) {
    std::string out = text;
    for (const auto& [name, type] : names) {
        if (name.empty()) continue;
        std::string placeholder = "PH" + type;
        std::size_t pos = 0;
        while ((pos = out.find(name, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !is_word_char(out[pos - 1]);
            std::size_t after = pos + name.size();
            bool right_ok = after >= out.size() || !is_word_char(out[after]);
            if (left_ok && right_ok) {
                out.replace(pos, name.size(), placeholder);
                pos += placeholder.size();
            } else {
                pos += name.size();
            }
        }
    }
    return out;
}

std::string canonical_value_text(const yaml::Node& node) {
    switch (node.kind) {
        case yaml::NodeKind::Scalar:
            return node.scalar_text;
        case yaml::NodeKind::Tagged:
            return "!" + node.tag + " " + canonical_value_text(node.payload());
        case yaml::NodeKind::Sequence: {
            std::string out = "[";
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i > 0) out += ", ";
                out += canonical_value_text(node.children[i]);
            }
            return out + "]";
        }
        case yaml::NodeKind::Mapping: {
            std::string out = "{";
            for (std::size_t i = 0; i < node.entries.size(); ++i) {
                if (i > 0) out += ", ";
                out += node.entries[i].first + ": " +
                       canonical_value_text(node.entries[i].second);
            }
            return out + "}";
        }
    }
    return "";
}

struct ItemCollector {
    std::set<std::string> seen;
    std::vector<NormalizedItem> items;
    const std::vector<std::pair<std::string, std::string>>* logical_names = nullptr;

    void add(std::string text, const ParameterPath& origin) {
        if (seen.insert(text).second) {
            items.push_back({std::move(text), origin});
        }
    }

    std::string value_text(const yaml::Node& leaf) const {
        if (leaf.is_tagged() && leaf.tag == "Ref" && leaf.payload().is_scalar()) {
            const std::string& target = leaf.payload().scalar_text;
            for (const auto& [name, type] : *logical_names) {
                if (name == target) return "PH" + type;
            }
        }
        return replace_logical_names(canonical_value_text(leaf), *logical_names);
    }
};

// Custom event names (the mapping keys directly under a resource's
// Properties/Events entry) are wildcarded so item paths do not fragment on
// user-chosen labels.
bool wildcard_child_keys(const std::vector<std::string>& rel) {
    return rel.size() == 2 && rel[0] == "Properties" && rel[1] == "Events";
}

void collect_resource_items(const yaml::Node& node, const std::string& type,
                            std::vector<std::string>& rel, std::vector<PathSegment>& abs,
                            ItemCollector& out) {
    if (node.is_mapping()) {
        bool wildcard = wildcard_child_keys(rel);
        for (const auto& [key, value] : node.entries) {
            rel.push_back(wildcard ? "*" : key);
            abs.push_back(PathSegment::of_key(key));
            std::string rel_text;
            for (std::size_t i = 0; i < rel.size(); ++i) {
                if (i > 0) rel_text += '/';
                rel_text += rel[i];
            }
            out.add("E:" + type + "/" + rel_text, {abs, PathKind::EntryKey});
            if (counts_as_value(value)) {
                out.add("V:" + type + "/" + rel_text + "=" + out.value_text(value),
                        {abs, PathKind::ScalarValue});
            } else {
                collect_resource_items(value, type, rel, abs, out);
            }
            rel.pop_back();
            abs.pop_back();
        }
    } else if (node.is_sequence()) {
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            rel.push_back("*");
            abs.push_back(PathSegment::of_index(i));
            if (counts_as_value(node.children[i])) {
                std::string rel_text;
                for (std::size_t k = 0; k < rel.size(); ++k) {
                    if (k > 0) rel_text += '/';
                    rel_text += rel[k];
                }
                out.add("V:" + type + "/" + rel_text + "=" + out.value_text(node.children[i]),
                        {abs, PathKind::ScalarValue});
            } else {
                collect_resource_items(node.children[i], type, rel, abs, out);
            }
            rel.pop_back();
            abs.pop_back();
        }
    }
}

}  // namespace

std::vector<NormalizedItem> normalize_for_mining(const ConfigDocument& doc) {
    std::vector<std::pair<std::string, std::string>> logical_names;
    for (const ResourceDecl& decl : list_resources(doc)) {
        if (!decl.type_missing) logical_names.emplace_back(decl.logical_name, decl.resource_type);
    }
    // Longer names first so overlapping names replace outside-in.
    std::stable_sort(logical_names.begin(), logical_names.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

    ItemCollector collector;
    collector.logical_names = &logical_names;

    const yaml::Node* resources = doc.root.find("Resources");
    if (resources == nullptr || !resources->is_mapping()) return collector.items;

    for (const auto& [name, node] : resources->entries) {
        if (!node.is_mapping()) continue;
        const yaml::Node* type_node = node.find("Type");
        if (type_node == nullptr || !type_node->is_scalar() ||
            type_node->scalar_kind == yaml::ScalarKind::Null) {
            continue;  // untyped resources cannot be scoped
        }
        const std::string& type = type_node->scalar_text;
        ParameterPath type_path;
        type_path.kind = PathKind::ResourceTypeDecl;
        type_path.segments = {PathSegment::of_key("Resources"), PathSegment::of_key(name),
                              PathSegment::of_key("Type")};
        collector.add("RT:" + type, type_path);

        std::vector<std::string> rel;
        std::vector<PathSegment> abs = {PathSegment::of_key("Resources"),
                                        PathSegment::of_key(name)};
        for (const auto& [key, value] : node.entries) {
            if (key == "Type") continue;  // covered by the RT item
            rel.push_back(key);
            abs.push_back(PathSegment::of_key(key));
            std::string rel_text = rel.back();
            collector.add("E:" + type + "/" + rel_text, {abs, PathKind::EntryKey});
            if (counts_as_value(value)) {
                collector.add("V:" + type + "/" + rel_text + "=" + collector.value_text(value),
                              {abs, PathKind::ScalarValue});
            } else {
                collect_resource_items(value, type, rel, abs, collector);
            }
            rel.pop_back();
            abs.pop_back();
        }
    }
    return collector.items;
}

}  // namespace sls
