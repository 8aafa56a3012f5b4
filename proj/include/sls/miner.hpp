#pragma once

// Data-driven baseline: frequent-itemset mining over normalized template
// items (FP-Growth), association-rule derivation, and violation detection
// against a mined rule base.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sls/config_model.hpp"
#include "sls/findings.hpp"

namespace sls {

struct Transaction {
    std::string origin;
    std::set<std::string> items;
};

struct ItemsetCatalog {
    std::map<std::string, std::size_t> known_items;  // item text -> corpus frequency
    std::size_t corpus_size = 0;
};

struct FrequentItemset {
    std::vector<std::string> items;  // sorted lexicographically
    std::size_t count = 0;
};

struct AssociationRule {
    std::vector<std::string> left;
    std::vector<std::string> right;
    double support = 0.0;
    double confidence = 0.0;
};

struct RuleBase {
    double alpha = 0.05;
    double min_confidence = 0.95;
    std::vector<AssociationRule> rules;
    ItemsetCatalog catalog;
    std::string provenance;
    std::size_t frequent_itemsets = 0;

    std::string to_json() const;
    static RuleBase from_json(const std::string& text);
};

// Absolute support threshold: ceiling(alpha * len), at least 1.
std::size_t support_threshold(double alpha, std::size_t len);

Transaction make_transaction(const ConfigDocument& doc);

// All itemsets with absolute support >= ceiling(alpha * len), canonically
// ordered (size, then lexicographic).
std::vector<FrequentItemset> mine_frequent(const std::vector<Transaction>& transactions,
                                           double alpha);

// Every left/right split of frequent itemsets of size 2..kRuleItemsetCap with
// confidence >= min_confidence.
inline constexpr std::size_t kRuleItemsetCap = 4;
std::vector<AssociationRule> derive_rules(const std::vector<FrequentItemset>& frequent,
                                          std::size_t corpus_len, double min_confidence);

RuleBase mine_rulebase(const std::vector<Transaction>& transactions, double alpha,
                       double min_confidence, const std::string& provenance);

struct DdOptions {
    bool flag_unknown_resource_types = true;
    bool flag_unknown_entries = true;
    bool flag_unknown_values = true;
};

DetectionReport detect_dd(const ConfigDocument& doc, const RuleBase& rulebase,
                          const DdOptions& options = {});

}  // namespace sls
