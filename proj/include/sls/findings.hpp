#pragma once

// Turns raw detector output into structured findings: extracts the delimited
// answer, splits it into category sections, and aligns each reported issue to
// a configuration parameter of the analyzed document.

#include <optional>
#include <string>
#include <vector>

#include "sls/config_model.hpp"

namespace sls {

enum class FindingCategory {
    ResourceTypeError,
    ConfigurationEntryError,
    ConfigurationEntryValueError,
    EntryDependencyError,
    ValueDependencyError,
    Uncategorized,
};

const char* category_name(FindingCategory category);
FindingCategory category_from_name(const std::string& name);

struct Finding {
    FindingCategory category = FindingCategory::Uncategorized;
    std::string mention_text;
    std::string explanation;
    std::optional<ParameterPath> aligned_path;
};

struct DetectionReport {
    std::string origin;
    std::string detector;  // SlsDetector | BasicLLM | DataDriven
    std::vector<Finding> findings;
    std::string raw_response;
    std::vector<std::string> warnings;

    std::string to_json() const;
    static DetectionReport from_json(const std::string& text);
};

struct Extraction {
    std::string text;
    bool missing_delimiters = false;
};

// Text between the first "<START>" and the first following "<END>"; the whole
// input (with the flag set) when either marker is absent.
Extraction extract_delimited(const std::string& raw);

std::vector<Finding> parse_findings(const std::string& inner);

// Alignment cascade: exact dotted path, unique key name, resource-scoped key
// name, unique quoted value; otherwise the finding stays unmatched.
void align_findings(std::vector<Finding>& findings, const ConfigDocument& doc);

}  // namespace sls
