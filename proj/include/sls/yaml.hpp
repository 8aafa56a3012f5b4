#pragma once

// Indentation-based YAML reader/writer covering the subset used by AWS SAM
// templates: block and flow collections, quoted/plain/block scalars, comments,
// and short-form intrinsic tags (!Ref, !Equals, ...). Anchors, aliases, and
// multi-document streams are rejected with a SyntaxError.

#include <string>
#include <utility>
#include <vector>

#include "sls/errors.hpp"

namespace sls::yaml {

enum class NodeKind { Mapping, Sequence, Scalar, Tagged };

enum class ScalarKind { String, Int, Float, Bool, Null };

struct Node {
    NodeKind kind = NodeKind::Scalar;

    // Scalar payload. quoted marks scalars that must be emitted in quoted
    // (or escaped) form so the inferred kind survives a round trip.
    ScalarKind scalar_kind = ScalarKind::Null;
    std::string scalar_text;
    bool quoted = false;

    // Tagged payload: tag name without the leading '!'; children holds the
    // single wrapped node.
    std::string tag;

    std::vector<std::pair<std::string, Node>> entries;  // Mapping, ordered
    std::vector<Node> children;                         // Sequence items or Tagged payload

    bool is_mapping() const { return kind == NodeKind::Mapping; }
    bool is_sequence() const { return kind == NodeKind::Sequence; }
    bool is_scalar() const { return kind == NodeKind::Scalar; }
    bool is_tagged() const { return kind == NodeKind::Tagged; }
    bool is_null() const { return is_scalar() && scalar_kind == ScalarKind::Null; }

    // Mapping lookup by key; nullptr when absent or not a mapping.
    const Node* find(const std::string& key) const;
    Node* find(const std::string& key);

    const Node& payload() const { return children.front(); }

    bool operator==(const Node& other) const;
    bool operator!=(const Node& other) const { return !(*this == other); }
};

Node make_scalar(std::string text, ScalarKind kind, bool quoted = false);
Node make_string(std::string text, bool quoted = false);
Node make_null();
Node make_mapping();
Node make_sequence();
Node make_tagged(std::string tag, Node payload);

// Kind a plain (unquoted) scalar with this text would be read back as.
ScalarKind infer_scalar_kind(const std::string& text);

// Parses one document. Returns a Null scalar node for input with no content.
Node parse(const std::string& text);

// Emits a document that parses back to a structurally equal tree.
std::string serialize(const Node& root);

}  // namespace sls::yaml
