#pragma once

// Canonical model of an AWS SAM template: parsed tree, enumerable
// configuration parameters, resource declarations, and the normalized item
// representation used by the data-driven miner.

#include <cstddef>
#include <string>
#include <vector>

#include "sls/yaml.hpp"

namespace sls {

// One step from the document root: a mapping key or a sequence position.
struct PathSegment {
    bool is_index = false;
    std::string key;
    std::size_t index = 0;

    static PathSegment of_key(std::string k) { return {false, std::move(k), 0}; }
    static PathSegment of_index(std::size_t i) { return {true, {}, i}; }

    bool operator==(const PathSegment& other) const {
        return is_index == other.is_index && key == other.key && index == other.index;
    }
};

enum class PathKind { EntryKey, ScalarValue, ResourceTypeDecl };

// Address of one configuration parameter. Rendered form is dotted
// ("Resources.Fn.Properties.Runtime"), with "[i]" for sequence positions and
// a trailing "=" for value parameters ("=!" for resource type declarations);
// '.', '[', ']', '=', '%' inside key names are percent-encoded.
struct ParameterPath {
    std::vector<PathSegment> segments;
    PathKind kind = PathKind::EntryKey;

    std::string render() const;
    static ParameterPath parse(const std::string& text);

    bool operator==(const ParameterPath& other) const {
        return kind == other.kind && segments == other.segments;
    }
    bool operator!=(const ParameterPath& other) const { return !(*this == other); }
};

struct ConfigDocument {
    std::string source_text;
    yaml::Node root;     // always a mapping
    std::string origin;  // file path or synthetic label
};

struct ResourceDecl {
    std::string logical_name;
    std::string resource_type;   // empty when the Type key is missing or null
    bool type_missing = false;
    ParameterPath properties_path;  // Properties entry, or the resource entry itself
};

// Canonical mining token. RT:<type>, E:<type>/<relative path>, or
// V:<type>/<relative path>=<value>. Logical resource names never appear in
// item_text; references become "PH<resource type>".
struct NormalizedItem {
    std::string item_text;
    ParameterPath origin_path;
};

ConfigDocument parse_template(const std::string& text, const std::string& origin = "");

// Deterministic, document-ordered parameter list. Counting rule: one
// parameter per mapping key at any depth, plus one per non-null scalar or
// tagged leaf in value position. Type values under resource declarations are
// kind ResourceTypeDecl.
std::vector<ParameterPath> enumerate_parameters(const ConfigDocument& doc);

std::vector<ResourceDecl> list_resources(const ConfigDocument& doc);

std::vector<NormalizedItem> normalize_for_mining(const ConfigDocument& doc);

std::string serialize(const ConfigDocument& doc);

// Node addressed by the path, or nullptr. For EntryKey parameters this is the
// value stored under the key.
const yaml::Node* resolve(const ConfigDocument& doc, const ParameterPath& path);

}  // namespace sls
