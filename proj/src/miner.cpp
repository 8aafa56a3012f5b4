#include "sls/miner.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace sls {

namespace {

using nlohmann::json;

struct FpNode {
    int item = -1;  // index into the ordered item table
    std::size_t count = 0;
    int parent = -1;
    std::map<int, int> children;  // item -> node index
};

class FpTree {
public:
    explicit FpTree(std::size_t item_count) : links_(item_count) {
        nodes_.push_back(FpNode{});  // root
    }

    void insert(const std::vector<int>& items, std::size_t count) {
        int current = 0;
        for (int item : items) {
            auto it = nodes_[current].children.find(item);
            if (it == nodes_[current].children.end()) {
                int index = static_cast<int>(nodes_.size());
                FpNode node;
                node.item = item;
                node.parent = current;
                nodes_.push_back(node);
                nodes_[current].children.emplace(item, index);
                links_[static_cast<std::size_t>(item)].push_back(index);
                current = index;
            } else {
                current = it->second;
            }
            nodes_[static_cast<std::size_t>(current)].count += count;
        }
    }

    const std::vector<int>& occurrences(int item) const {
        return links_[static_cast<std::size_t>(item)];
    }

    const FpNode& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }

private:
    std::vector<FpNode> nodes_;
    std::vector<std::vector<int>> links_;
};

// Recursive FP-Growth over conditional pattern bases. `items` maps local item
// ids to global names; `paths` are (prefix items, count) pairs.
void mine_recursive(const std::vector<std::pair<std::vector<int>, std::size_t>>& paths,
                    const std::vector<std::string>& items, std::size_t threshold,
                    std::vector<std::string>& suffix,
                    std::vector<FrequentItemset>& out) {
    std::map<int, std::size_t> counts;
    for (const auto& [path, count] : paths) {
        for (int item : path) counts[item] += count;
    }

    std::vector<int> frequent;
    for (const auto& [item, count] : counts) {
        if (count >= threshold) frequent.push_back(item);
    }
    if (frequent.empty()) return;

    // Rank by (count desc, name asc) for compact trees.
    std::sort(frequent.begin(), frequent.end(), [&](int a, int b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return items[static_cast<std::size_t>(a)] < items[static_cast<std::size_t>(b)];
    });
    std::map<int, int> rank;
    for (std::size_t i = 0; i < frequent.size(); ++i) rank[frequent[i]] = static_cast<int>(i);

    FpTree tree(frequent.size());
    for (const auto& [path, count] : paths) {
        std::vector<int> filtered;
        for (int item : path) {
            if (rank.count(item) > 0) filtered.push_back(rank[item]);
        }
        std::sort(filtered.begin(), filtered.end());
        filtered.erase(std::unique(filtered.begin(), filtered.end()), filtered.end());
        if (!filtered.empty()) tree.insert(filtered, count);
    }

    for (std::size_t local = frequent.size(); local-- > 0;) {
        int global = frequent[local];
        suffix.push_back(items[static_cast<std::size_t>(global)]);

        FrequentItemset itemset;
        itemset.items = suffix;
        std::sort(itemset.items.begin(), itemset.items.end());
        itemset.count = counts[global];
        out.push_back(std::move(itemset));

        std::vector<std::pair<std::vector<int>, std::size_t>> base;
        for (int node_index : tree.occurrences(static_cast<int>(local))) {
            const FpNode& node = tree.node(node_index);
            std::vector<int> prefix;
            int parent = node.parent;
            while (parent > 0) {
                prefix.push_back(frequent[static_cast<std::size_t>(tree.node(parent).item)]);
                parent = tree.node(parent).parent;
            }
            if (!prefix.empty()) base.emplace_back(std::move(prefix), node.count);
        }
        if (!base.empty()) mine_recursive(base, items, threshold, suffix, out);
        suffix.pop_back();
    }
}

}  // namespace

std::size_t support_threshold(double alpha, std::size_t len) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InvalidAlpha(alpha);
    double raw = alpha * static_cast<double>(len);
    auto threshold = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return threshold == 0 ? 1 : threshold;
}

Transaction make_transaction(const ConfigDocument& doc) {
    Transaction t;
    t.origin = doc.origin;
    for (const NormalizedItem& item : normalize_for_mining(doc)) {
        t.items.insert(item.item_text);
    }
    return t;
}

std::vector<FrequentItemset> mine_frequent(const std::vector<Transaction>& transactions,
                                           double alpha) {
    std::size_t threshold = support_threshold(alpha, transactions.size());
    if (transactions.empty()) throw EmptyCorpus();

    std::vector<std::string> items;
    std::map<std::string, int> ids;
    std::vector<std::pair<std::vector<int>, std::size_t>> paths;
    for (const Transaction& t : transactions) {
        std::vector<int> encoded;
        for (const std::string& item : t.items) {
            auto [it, inserted] = ids.emplace(item, static_cast<int>(items.size()));
            if (inserted) items.push_back(item);
            encoded.push_back(it->second);
        }
        paths.emplace_back(std::move(encoded), 1);
    }

    std::vector<FrequentItemset> out;
    std::vector<std::string> suffix;
    mine_recursive(paths, items, threshold, suffix, out);

    std::sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
        if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
        return a.items < b.items;
    });
    return out;
}

std::vector<AssociationRule> derive_rules(const std::vector<FrequentItemset>& frequent,
                                          std::size_t corpus_len, double min_confidence) {
    std::map<std::vector<std::string>, std::size_t> counts;
    for (const FrequentItemset& itemset : frequent) counts[itemset.items] = itemset.count;

    std::vector<AssociationRule> rules;
    for (const FrequentItemset& itemset : frequent) {
        std::size_t n = itemset.items.size();
        if (n < 2 || n > kRuleItemsetCap) continue;
        for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
            std::vector<std::string> left, right;
            for (std::size_t bit = 0; bit < n; ++bit) {
                if ((mask >> bit) & 1) {
                    left.push_back(itemset.items[bit]);
                } else {
                    right.push_back(itemset.items[bit]);
                }
            }
            auto left_count = counts.find(left);
            if (left_count == counts.end()) continue;  // not mined (partial input)
            double confidence = static_cast<double>(itemset.count) /
                                static_cast<double>(left_count->second);
            if (confidence + 1e-12 < min_confidence) continue;
            AssociationRule rule;
            rule.left = std::move(left);
            rule.right = std::move(right);
            rule.support = static_cast<double>(itemset.count) / static_cast<double>(corpus_len);
            rule.confidence = confidence;
            rules.push_back(std::move(rule));
        }
    }
    return rules;
}

RuleBase mine_rulebase(const std::vector<Transaction>& transactions, double alpha,
                       double min_confidence, const std::string& provenance) {
    RuleBase base;
    base.alpha = alpha;
    base.min_confidence = min_confidence;
    base.provenance = provenance;
    base.catalog.corpus_size = transactions.size();
    for (const Transaction& t : transactions) {
        for (const std::string& item : t.items) ++base.catalog.known_items[item];
    }
    std::vector<FrequentItemset> frequent = mine_frequent(transactions, alpha);
    base.frequent_itemsets = frequent.size();
    base.rules = derive_rules(frequent, transactions.size(), min_confidence);
    return base;
}

namespace {

FindingCategory unknown_item_category(const std::string& item) {
    if (item.rfind("RT:", 0) == 0) return FindingCategory::ResourceTypeError;
    if (item.rfind("E:", 0) == 0) return FindingCategory::ConfigurationEntryError;
    return FindingCategory::ConfigurationEntryValueError;
}

FindingCategory missing_item_category(const std::string& item) {
    if (item.rfind("V:", 0) == 0) return FindingCategory::ValueDependencyError;
    return FindingCategory::EntryDependencyError;
}

std::string join_items(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

DetectionReport detect_dd(const ConfigDocument& doc, const RuleBase& rulebase,
                          const DdOptions& options) {
    DetectionReport report;
    report.origin = doc.origin;
    report.detector = "DataDriven";

    std::vector<NormalizedItem> doc_items = normalize_for_mining(doc);
    std::map<std::string, std::size_t> position;  // item -> document-order index
    for (std::size_t i = 0; i < doc_items.size(); ++i) {
        position.emplace(doc_items[i].item_text, i);
    }

    // Channel 1: items never seen in the corpus.
    for (const NormalizedItem& item : doc_items) {
        if (rulebase.catalog.known_items.count(item.item_text) > 0) continue;
        bool enabled = (item.item_text.rfind("RT:", 0) == 0 && options.flag_unknown_resource_types) ||
                       (item.item_text.rfind("E:", 0) == 0 && options.flag_unknown_entries) ||
                       (item.item_text.rfind("V:", 0) == 0 && options.flag_unknown_values);
        if (!enabled) continue;
        Finding finding;
        finding.category = unknown_item_category(item.item_text);
        finding.mention_text = item.item_text;
        finding.explanation = "not observed in the mining corpus";
        finding.aligned_path = item.origin_path;
        report.findings.push_back(std::move(finding));
    }

    // Channel 2: violated association rules. Rules are scanned smallest-left
    // first and each missing item is reported once, attributed to the first
    // rule that implies it.
    std::vector<const AssociationRule*> ordered;
    ordered.reserve(rulebase.rules.size());
    for (const AssociationRule& rule : rulebase.rules) ordered.push_back(&rule);
    std::sort(ordered.begin(), ordered.end(),
              [](const AssociationRule* a, const AssociationRule* b) {
                  if (a->left.size() != b->left.size()) return a->left.size() < b->left.size();
                  if (a->left != b->left) return a->left < b->left;
                  return a->right < b->right;
              });

    std::set<std::string> reported_missing;
    for (const AssociationRule* rule : ordered) {
        bool left_present = std::all_of(rule->left.begin(), rule->left.end(),
                                        [&](const std::string& item) {
                                            return position.count(item) > 0;
                                        });
        if (!left_present) continue;

        std::size_t first_pos = doc_items.size();
        for (const std::string& item : rule->left) {
            first_pos = std::min(first_pos, position[item]);
        }

        for (const std::string& missing : rule->right) {
            if (position.count(missing) > 0) continue;
            if (!reported_missing.insert(missing).second) continue;
            Finding finding;
            finding.category = missing_item_category(missing);
            finding.mention_text = missing;
            finding.explanation = "required by " + join_items(rule->left);
            finding.aligned_path = doc_items[first_pos].origin_path;
            report.findings.push_back(std::move(finding));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Rule base serialization
// ---------------------------------------------------------------------------

std::string RuleBase::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["min_confidence"] = min_confidence;
    j["provenance"] = provenance;
    j["frequent_itemsets"] = frequent_itemsets;
    j["catalog"]["corpus_size"] = catalog.corpus_size;
    j["catalog"]["items"] = json::array();
    for (const auto& [item, count] : catalog.known_items) {
        j["catalog"]["items"].push_back({{"item", item}, {"count", count}});
    }
    j["rules"] = json::array();
    for (const AssociationRule& rule : rules) {
        j["rules"].push_back({{"left", rule.left},
                              {"right", rule.right},
                              {"support", rule.support},
                              {"confidence", rule.confidence}});
    }
    return j.dump(2) + "\n";
}

RuleBase RuleBase::from_json(const std::string& text) {
    json j = json::parse(text);
    RuleBase base;
    base.alpha = j.value("alpha", 0.05);
    base.min_confidence = j.value("min_confidence", 0.95);
    base.provenance = j.value("provenance", std::string());
    base.frequent_itemsets = j.value("frequent_itemsets", std::size_t{0});
    base.catalog.corpus_size = j["catalog"].value("corpus_size", std::size_t{0});
    for (const json& item : j["catalog"].value("items", json::array())) {
        base.catalog.known_items[item["item"].get<std::string>()] =
            item["count"].get<std::size_t>();
    }
    for (const json& rule_json : j.value("rules", json::array())) {
        AssociationRule rule;
        rule.left = rule_json["left"].get<std::vector<std::string>>();
        rule.right = rule_json["right"].get<std::vector<std::string>>();
        rule.support = rule_json.value("support", 0.0);
        rule.confidence = rule_json.value("confidence", 0.0);
        base.rules.push_back(std::move(rule));
    }
    return base;
}

}  // namespace sls
