#include "sls/findings.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "json.hpp"

namespace sls {

namespace {

using nlohmann::json;

const std::array<std::pair<const char*, FindingCategory>, 5> kHeadings = {{
    {"resource type error", FindingCategory::ResourceTypeError},
    {"configuration entry error", FindingCategory::ConfigurationEntryError},
    {"configuration entry value error", FindingCategory::ConfigurationEntryValueError},
    {"entry dependency error", FindingCategory::EntryDependencyError},
    {"value dependency error", FindingCategory::ValueDependencyError},
}};

std::string trim_copy(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// Lowercase, decorations stripped, whitespace collapsed, trailing plural of
// "errors" singularized. Used only for heading recognition.
std::string normalize_heading(const std::string& line) {
    std::string out;
    for (char c : line) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (c == ' ' || c == '\t') {
            if (!out.empty() && out.back() != ' ') out += ' ';
        }
        // markdown/bullet decorations fall through
    }
    out = trim_copy(out);
    if (out.size() > 6 && out.compare(out.size() - 6, 6, "errors") == 0) out.pop_back();
    return out;
}

std::optional<FindingCategory> match_heading(const std::string& normalized) {
    for (const auto& [name, category] : kHeadings) {
        if (normalized == name) return category;
    }
    return std::nullopt;
}

std::string strip_bullet(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && (line[i] == '-' || line[i] == '*' || line[i] == '+')) {
        ++i;
    } else if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        std::size_t j = i;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        if (j < line.size() && (line[j] == '.' || line[j] == ')')) i = j + 1;
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return line.substr(i);
}

bool says_no_findings(const std::string& text) {
    std::string lowered;
    for (char c : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered.find("no misconfiguration") != std::string::npos) return true;
    if (lowered.find("no errors") != std::string::npos ||
        lowered.find("no error") != std::string::npos) {
        return true;
    }
    std::string normalized = normalize_heading(text);
    return normalized == "none" || normalized == "none found" || normalized == "na";
}

// Preamble text only becomes a finding when it plausibly names a parameter:
// a quoted token, a dotted path, or a resource-type token.
bool names_concrete_parameter(const std::string& text) {
    if (text.find('`') != std::string::npos || text.find('\'') != std::string::npos ||
        text.find('"') != std::string::npos || text.find("::") != std::string::npos) {
        return true;
    }
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        if (text[i] == '.' && std::isalnum(static_cast<unsigned char>(text[i - 1])) &&
            std::isalnum(static_cast<unsigned char>(text[i + 1]))) {
            return true;
        }
    }
    return false;
}

Finding make_finding(FindingCategory category, const std::string& bullet) {
    Finding finding;
    finding.category = category;
    std::size_t sep = bullet.find(": ");
    if (sep != std::string::npos && sep > 0) {
        finding.mention_text = trim_copy(bullet.substr(0, sep));
        finding.explanation = trim_copy(bullet.substr(sep + 2));
    } else {
        finding.mention_text = trim_copy(bullet);
    }
    return finding;
}

}  // namespace

const char* category_name(FindingCategory category) {
    switch (category) {
        case FindingCategory::ResourceTypeError: return "ResourceTypeError";
        case FindingCategory::ConfigurationEntryError: return "ConfigurationEntryError";
        case FindingCategory::ConfigurationEntryValueError: return "ConfigurationEntryValueError";
        case FindingCategory::EntryDependencyError: return "EntryDependencyError";
        case FindingCategory::ValueDependencyError: return "ValueDependencyError";
        case FindingCategory::Uncategorized: return "Uncategorized";
    }
    return "Uncategorized";
}

FindingCategory category_from_name(const std::string& name) {
    for (FindingCategory c :
         {FindingCategory::ResourceTypeError, FindingCategory::ConfigurationEntryError,
          FindingCategory::ConfigurationEntryValueError, FindingCategory::EntryDependencyError,
          FindingCategory::ValueDependencyError, FindingCategory::Uncategorized}) {
        if (name == category_name(c)) return c;
    }
    throw std::invalid_argument("unknown finding category: " + name);
}

Extraction extract_delimited(const std::string& raw) {
    static const std::string kStart = "<START>";
    static const std::string kEnd = "<END>";
    std::size_t start = raw.find(kStart);
    if (start != std::string::npos) {
        std::size_t begin = start + kStart.size();
        std::size_t end = raw.find(kEnd, begin);
        if (end != std::string::npos) {
            return {raw.substr(begin, end - begin), false};
        }
    }
    return {raw, true};
}

std::vector<Finding> parse_findings(const std::string& inner) {
    std::vector<Finding> findings;
    std::optional<FindingCategory> current;

    std::size_t pos = 0;
    while (pos <= inner.size()) {
        std::size_t eol = inner.find('\n', pos);
        std::string line =
            eol == std::string::npos ? inner.substr(pos) : inner.substr(pos, eol - pos);
        pos = eol == std::string::npos ? inner.size() + 1 : eol + 1;

        std::string stripped = strip_bullet(line);
        if (trim_copy(stripped).empty()) continue;

        // Heading line, with or without trailing content after the colon.
        std::optional<FindingCategory> heading = match_heading(normalize_heading(stripped));
        std::string remainder;
        if (!heading.has_value()) {
            std::size_t colon = stripped.find(':');
            while (colon != std::string::npos) {
                // Skip "::" inside resource-type tokens.
                if (colon + 1 < stripped.size() && stripped[colon + 1] == ':') {
                    colon = stripped.find(':', colon + 2);
                    continue;
                }
                break;
            }
            if (colon != std::string::npos) {
                heading = match_heading(normalize_heading(stripped.substr(0, colon)));
                if (heading.has_value()) remainder = trim_copy(stripped.substr(colon + 1));
            }
        }
        if (heading.has_value()) {
            current = heading;
            if (remainder.empty()) continue;
            stripped = strip_bullet(remainder);
        }

        if (says_no_findings(stripped)) continue;
        if (!current.has_value()) {
            if (!names_concrete_parameter(stripped)) continue;
            findings.push_back(make_finding(FindingCategory::Uncategorized, stripped));
            continue;
        }
        findings.push_back(make_finding(*current, stripped));
    }
    return findings;
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool contains_word(const std::string& text, const std::string& word) {
    if (word.empty()) return false;
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_token_char(text[pos - 1]);
        std::size_t after = pos + word.size();
        bool right_ok = after >= text.size() || !is_token_char(text[after]);
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

// Containment check for rendered dotted paths; neighbors must not extend the
// path token.
bool contains_path(const std::string& text, const std::string& path) {
    std::size_t pos = 0;
    auto extends = [](char c) {
        return is_token_char(c) || c == '.' || c == '[' || c == ']' || c == '=' || c == ':';
    };
    while ((pos = text.find(path, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !extends(text[pos - 1]);
        std::size_t after = pos + path.size();
        bool right_ok = after >= text.size() || !extends(text[after]);
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

std::vector<std::string> quoted_spans(const std::string& text) {
    std::vector<std::string> spans;
    for (char quote : {'`', '\'', '"'}) {
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t open = text.find(quote, pos);
            if (open == std::string::npos) break;
            std::size_t close = text.find(quote, open + 1);
            if (close == std::string::npos) break;
            std::string span = text.substr(open + 1, close - open - 1);
            if (!span.empty()) spans.push_back(std::move(span));
            pos = close + 1;
        }
    }
    return spans;
}

struct DocumentIndex {
    std::vector<ParameterPath> params;
    std::vector<std::string> renders;
    // Key name -> indices of EntryKey parameters, document order.
    std::map<std::string, std::vector<std::size_t>> key_occurrences;
    std::set<std::string> structural_names;  // top-level sections + logical names
    std::vector<std::string> resource_names;  // document order
    // Scalar text -> indices of value parameters, document order.
    std::map<std::string, std::vector<std::size_t>> value_occurrences;

    explicit DocumentIndex(const ConfigDocument& doc) {
        params = enumerate_parameters(doc);
        renders.reserve(params.size());
        for (const ParameterPath& p : params) renders.push_back(p.render());

        for (const auto& [section, value] : doc.root.entries) structural_names.insert(section);
        for (const ResourceDecl& decl : list_resources(doc)) {
            structural_names.insert(decl.logical_name);
            resource_names.push_back(decl.logical_name);
        }

        for (std::size_t i = 0; i < params.size(); ++i) {
            const ParameterPath& p = params[i];
            if (p.kind == PathKind::EntryKey) {
                const PathSegment& last = p.segments.back();
                if (!last.is_index) key_occurrences[last.key].push_back(i);
            } else {
                const yaml::Node* node = resolve(doc, p);
                if (node == nullptr) continue;
                if (node->is_scalar()) {
                    value_occurrences[node->scalar_text].push_back(i);
                } else if (node->is_tagged() && node->payload().is_scalar()) {
                    value_occurrences[node->payload().scalar_text].push_back(i);
                }
            }
        }
    }

    bool in_resource_subtree(std::size_t index, const std::string& resource) const {
        const auto& segs = params[index].segments;
        return segs.size() > 2 && !segs[0].is_index && segs[0].key == "Resources" &&
               !segs[1].is_index && segs[1].key == resource;
    }
};

std::optional<ParameterPath> align_one(const std::string& text, const DocumentIndex& index) {
    // (1) Exact dotted path, longest match first. Single-segment renders are
    // bare words, not recognizable paths.
    {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < index.params.size(); ++i) {
            if (index.params[i].segments.size() < 2) continue;
            if (!contains_path(text, index.renders[i])) continue;
            if (!best.has_value() || index.renders[i].size() > index.renders[*best].size()) {
                best = i;
            }
        }
        if (best.has_value()) return index.params[*best];
    }

    // (2) Key name unique in the whole document. Logical resource names and
    // top-level section names are structural, not entries.
    {
        const std::string* best_key = nullptr;
        std::size_t best_index = 0;
        for (const auto& [key, occurrences] : index.key_occurrences) {
            if (occurrences.size() != 1) continue;
            if (index.structural_names.count(key) > 0) continue;
            if (!contains_word(text, key)) continue;
            if (best_key == nullptr || key.size() > best_key->size()) {
                best_key = &key;
                best_index = occurrences.front();
            }
        }
        if (best_key != nullptr) return index.params[best_index];
    }

    // (3) Resource name + key resolved inside that resource's subtree, first
    // occurrence in document order.
    for (const std::string& resource : index.resource_names) {
        if (!contains_word(text, resource)) continue;
        const std::string* best_key = nullptr;
        std::size_t best_index = 0;
        for (const auto& [key, occurrences] : index.key_occurrences) {
            if (key == resource || index.structural_names.count(key) > 0) continue;
            if (!contains_word(text, key)) continue;
            for (std::size_t i : occurrences) {
                if (!index.in_resource_subtree(i, resource)) continue;
                if (best_key == nullptr || key.size() > best_key->size()) {
                    best_key = &key;
                    best_index = i;
                }
                break;  // occurrences are in document order
            }
        }
        if (best_key != nullptr) return index.params[best_index];
    }

    // (4) Quoted scalar value occurring exactly once.
    for (const std::string& span : quoted_spans(text)) {
        auto it = index.value_occurrences.find(span);
        if (it != index.value_occurrences.end() && it->second.size() == 1) {
            return index.params[it->second.front()];
        }
    }

    return std::nullopt;
}

}  // namespace

void align_findings(std::vector<Finding>& findings, const ConfigDocument& doc) {
    if (findings.empty()) return;
    DocumentIndex index(doc);
    for (Finding& finding : findings) {
        finding.aligned_path = align_one(finding.mention_text, index);
        if (!finding.aligned_path.has_value() && !finding.explanation.empty()) {
            finding.aligned_path = align_one(finding.explanation, index);
        }
    }
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

std::string DetectionReport::to_json() const {
    json j;
    j["origin"] = origin;
    j["detector"] = detector;
    j["findings"] = json::array();
    for (const Finding& f : findings) {
        json item;
        item["category"] = category_name(f.category);
        item["mention"] = f.mention_text;
        item["explanation"] = f.explanation;
        item["path"] = f.aligned_path.has_value() ? json(f.aligned_path->render()) : json(nullptr);
        j["findings"].push_back(std::move(item));
    }
    j["warnings"] = warnings;
    if (!raw_response.empty()) j["raw_response"] = raw_response;
    return j.dump(2) + "\n";
}

DetectionReport DetectionReport::from_json(const std::string& text) {
    json j = json::parse(text);
    DetectionReport report;
    report.origin = j.value("origin", std::string());
    report.detector = j.value("detector", std::string());
    for (const json& item : j.value("findings", json::array())) {
        Finding f;
        f.category = category_from_name(item.value("category", std::string("Uncategorized")));
        f.mention_text = item.value("mention", std::string());
        f.explanation = item.value("explanation", std::string());
        if (item.contains("path") && !item["path"].is_null()) {
            f.aligned_path = ParameterPath::parse(item["path"].get<std::string>());
        }
        report.findings.push_back(std::move(f));
    }
    for (const json& w : j.value("warnings", json::array())) {
        report.warnings.push_back(w.get<std::string>());
    }
    report.raw_response = j.value("raw_response", std::string());
    return report;
}

}  // namespace sls
