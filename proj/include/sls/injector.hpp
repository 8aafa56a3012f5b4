#pragma once

// Seeded misconfiguration generator. Applies one generation rule per
// invocation (out-of-set resource type, invalid entry, out-of-range numeric,
// out-of-set enum value, broken entry co-occurrence, dangling reference) and
// emits the mutated document plus ground truth. All choices are drawn from a
// deterministic generator, so (document, subcategory, seed) fixes the output.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sls/config_model.hpp"
#include "sls/eval_types.hpp"

namespace sls {

enum class InjectionCategory { Syntax, Range, Dependency };

enum class InjectionSubcategory {
    ResourceType,
    Entry,
    BasicNumeric,
    Enum,
    EntryRelationship,
    ValueRelationship,
};

InjectionCategory category_of(InjectionSubcategory subcategory);
const char* subcategory_name(InjectionSubcategory subcategory);
std::optional<InjectionSubcategory> subcategory_from_name(const std::string& name);

struct InjectionRule {
    InjectionCategory category;
    InjectionSubcategory subcategory;
    std::string spec_text;  // value set / range / relationship description
};

// Relationship forms from the generation-rule table. Only the "occurrence"
// operator is exercised by the shipped co-occurrence data; the remaining
// comparison operators are representable but unused.
struct RelationshipSpec {
    std::string p1;
    std::string p2;
    std::string op;    // one of > >= = != < <= occurrence
    std::string form;  // "entry" for (P1,V,op) -> P2, "value" for (P1,P2,op)
};

struct NumericRange {
    long long min = 0;
    long long max = 0;
};

struct EnumSpec {
    std::string key;
    std::string within;  // optional path segment that must enclose the key
    std::vector<std::string> values;
    std::vector<std::string> bogus;
};

struct CooccurPair {
    std::string first;
    std::string second;
    std::string within;
};

// Allowed-value data curated from the AWS SAM documentation; shipped as a
// versioned JSON asset and overridable from a file.
struct SamSpecData {
    std::set<std::string> resource_types;
    std::vector<std::string> bogus_resource_types;
    std::map<std::string, std::vector<std::string>> entries;  // resource type -> entry names
    std::vector<std::string> bogus_entries;
    std::map<std::string, NumericRange> numeric_ranges;       // leaf key -> range
    std::vector<EnumSpec> enums;
    std::vector<CooccurPair> cooccur_pairs;

    static SamSpecData from_json(const std::string& text);
    static SamSpecData builtin();
};

struct InjectionOutcome {
    ConfigDocument mutated;
    GroundTruth ground_truth;
    InjectionRule applied_rule;
    std::uint64_t seed = 0;
    std::string original_value;
};

class FaultInjector {
public:
    explicit FaultInjector(SamSpecData data = SamSpecData::builtin());

    // Document-ordered parameters where the subcategory's rule can apply.
    std::vector<ParameterPath> eligible_sites(const ConfigDocument& doc,
                                              InjectionSubcategory subcategory) const;

    InjectionOutcome inject(const ConfigDocument& doc, InjectionSubcategory subcategory,
                            std::uint64_t seed) const;

    // Seeded choice among the subcategories that have at least one site.
    InjectionOutcome inject_random(const ConfigDocument& doc, std::uint64_t seed) const;

    const SamSpecData& data() const { return data_; }

private:
    SamSpecData data_;
};

}  // namespace sls
