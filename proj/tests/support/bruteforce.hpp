#pragma once

// Test-only oracle for frequent-itemset mining: exhaustive enumeration over
// bitmask-encoded transactions. Independent of the FP-Growth implementation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sls/miner.hpp"

namespace sls::test {

inline std::vector<FrequentItemset> brute_force_frequent(
    const std::vector<Transaction>& transactions, double alpha) {
    std::size_t threshold = support_threshold(alpha, transactions.size());

    std::vector<std::string> items;
    std::map<std::string, std::size_t> ids;
    for (const Transaction& t : transactions) {
        for (const std::string& item : t.items) {
            if (ids.emplace(item, items.size()).second) items.push_back(item);
        }
    }

    std::vector<std::uint64_t> masks;
    for (const Transaction& t : transactions) {
        std::uint64_t mask = 0;
        for (const std::string& item : t.items) mask |= std::uint64_t{1} << ids[item];
        masks.push_back(mask);
    }

    std::vector<FrequentItemset> out;
    std::uint64_t universe = std::uint64_t{1} << items.size();
    for (std::uint64_t subset = 1; subset < universe; ++subset) {
        std::size_t count = 0;
        for (std::uint64_t mask : masks) {
            if ((mask & subset) == subset) ++count;
        }
        if (count < threshold) continue;
        FrequentItemset itemset;
        for (std::size_t bit = 0; bit < items.size(); ++bit) {
            if ((subset >> bit) & 1) itemset.items.push_back(items[bit]);
        }
        std::sort(itemset.items.begin(), itemset.items.end());
        itemset.count = count;
        out.push_back(std::move(itemset));
    }
    std::sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
        if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
        return a.items < b.items;
    });
    return out;
}

struct CorpusRng {
    std::uint64_t state;
    explicit CorpusRng(std::uint64_t seed) : state(seed ^ 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

// Random corpora bounded at 12 distinct items and 50 transactions, the regime
// where the exhaustive oracle stays fast.
inline std::vector<Transaction> random_corpus(CorpusRng& rng) {
    std::size_t item_count = 2 + rng.pick(11);        // 2..12
    std::size_t transaction_count = 1 + rng.pick(50);  // 1..50
    std::vector<Transaction> transactions(transaction_count);
    for (std::size_t t = 0; t < transaction_count; ++t) {
        transactions[t].origin = "t" + std::to_string(t);
        for (std::size_t i = 0; i < item_count; ++i) {
            if (rng.pick(100) < 35) {
                transactions[t].items.insert("item" + std::to_string(i));
            }
        }
        if (transactions[t].items.empty()) {
            transactions[t].items.insert("item" + std::to_string(rng.pick(item_count)));
        }
    }
    return transactions;
}

}  // namespace sls::test
