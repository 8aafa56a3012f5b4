#include "sls/injector.hpp"

#include <algorithm>

#include "json.hpp"
#include "sls/assets.gen.hpp"

namespace sls {

namespace {

using nlohmann::json;

// splitmix64: tiny, portable, and stable across standard libraries (the
// distributions in <random> are not).
struct SeededRng {
    std::uint64_t state;

    explicit SeededRng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

yaml::Node* resolve_mut(yaml::Node& root, const std::vector<PathSegment>& segments,
                        std::size_t depth) {
    yaml::Node* node = &root;
    for (std::size_t i = 0; i < depth; ++i) {
        const PathSegment& seg = segments[i];
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

bool path_contains_segment(const ParameterPath& path, const std::string& segment) {
    if (segment.empty()) return true;
    for (const PathSegment& seg : path.segments) {
        if (!seg.is_index && seg.key == segment) return true;
    }
    return false;
}

}  // namespace

InjectionCategory category_of(InjectionSubcategory subcategory) {
    switch (subcategory) {
        case InjectionSubcategory::ResourceType:
        case InjectionSubcategory::Entry:
            return InjectionCategory::Syntax;
        case InjectionSubcategory::BasicNumeric:
        case InjectionSubcategory::Enum:
            return InjectionCategory::Range;
        case InjectionSubcategory::EntryRelationship:
        case InjectionSubcategory::ValueRelationship:
            return InjectionCategory::Dependency;
    }
    return InjectionCategory::Syntax;
}

const char* subcategory_name(InjectionSubcategory subcategory) {
    switch (subcategory) {
        case InjectionSubcategory::ResourceType: return "resource-type";
        case InjectionSubcategory::Entry: return "entry";
        case InjectionSubcategory::BasicNumeric: return "basic-numeric";
        case InjectionSubcategory::Enum: return "enum";
        case InjectionSubcategory::EntryRelationship: return "entry-relationship";
        case InjectionSubcategory::ValueRelationship: return "value-relationship";
    }
    return "";
}

std::optional<InjectionSubcategory> subcategory_from_name(const std::string& name) {
    for (InjectionSubcategory sub :
         {InjectionSubcategory::ResourceType, InjectionSubcategory::Entry,
          InjectionSubcategory::BasicNumeric, InjectionSubcategory::Enum,
          InjectionSubcategory::EntryRelationship, InjectionSubcategory::ValueRelationship}) {
        if (name == subcategory_name(sub)) return sub;
    }
    return std::nullopt;
}

SamSpecData SamSpecData::from_json(const std::string& text) {
    json j = json::parse(text);
    SamSpecData data;
    for (const json& t : j.value("resource_types", json::array())) {
        data.resource_types.insert(t.get<std::string>());
    }
    data.bogus_resource_types =
        j.value("bogus_resource_types", std::vector<std::string>{});
    json entry_map = j.value("entries", json::object());
    for (const auto& [type, entries] : entry_map.items()) {
        data.entries[type] = entries.get<std::vector<std::string>>();
    }
    data.bogus_entries = j.value("bogus_entries", std::vector<std::string>{});
    json range_map = j.value("numeric_ranges", json::object());
    for (const auto& [key, range] : range_map.items()) {
        data.numeric_ranges[key] = {range["min"].get<long long>(), range["max"].get<long long>()};
    }
    for (const json& e : j.value("enums", json::array())) {
        EnumSpec spec;
        spec.key = e["key"].get<std::string>();
        spec.within = e.value("within", std::string());
        spec.values = e["values"].get<std::vector<std::string>>();
        spec.bogus = e["bogus"].get<std::vector<std::string>>();
        data.enums.push_back(std::move(spec));
    }
    for (const json& p : j.value("cooccur_pairs", json::array())) {
        data.cooccur_pairs.push_back({p["first"].get<std::string>(),
                                      p["second"].get<std::string>(),
                                      p.value("within", std::string())});
    }
    return data;
}

SamSpecData SamSpecData::builtin() {
    return from_json(std::string(assets::sam_spec_data));
}

FaultInjector::FaultInjector(SamSpecData data) : data_(std::move(data)) {}

std::vector<ParameterPath> FaultInjector::eligible_sites(const ConfigDocument& doc,
                                                         InjectionSubcategory subcategory) const {
    std::vector<ParameterPath> sites;
    std::vector<ParameterPath> params = enumerate_parameters(doc);

    switch (subcategory) {
        case InjectionSubcategory::ResourceType: {
            for (const ParameterPath& p : params) {
                if (p.kind == PathKind::ResourceTypeDecl) sites.push_back(p);
            }
            break;
        }
        case InjectionSubcategory::Entry: {
            for (const ResourceDecl& decl : list_resources(doc)) {
                if (decl.type_missing || data_.entries.count(decl.resource_type) == 0) continue;
                if (decl.properties_path.segments.size() != 3) continue;  // needs Properties
                const yaml::Node* props = resolve(doc, decl.properties_path);
                if (props != nullptr && props->is_mapping()) {
                    sites.push_back(decl.properties_path);
                }
            }
            break;
        }
        case InjectionSubcategory::BasicNumeric: {
            for (const ParameterPath& p : params) {
                if (p.kind != PathKind::ScalarValue || p.segments.back().is_index) continue;
                if (data_.numeric_ranges.count(p.segments.back().key) == 0) continue;
                const yaml::Node* node = resolve(doc, p);
                if (node != nullptr && node->is_scalar() &&
                    node->scalar_kind == yaml::ScalarKind::Int) {
                    sites.push_back(p);
                }
            }
            break;
        }
        case InjectionSubcategory::Enum: {
            for (const ParameterPath& p : params) {
                if (p.kind != PathKind::ScalarValue || p.segments.back().is_index) continue;
                const yaml::Node* node = resolve(doc, p);
                if (node == nullptr || !node->is_scalar() ||
                    node->scalar_kind == yaml::ScalarKind::Null) {
                    continue;
                }
                for (const EnumSpec& spec : data_.enums) {
                    if (spec.key == p.segments.back().key && path_contains_segment(p, spec.within)) {
                        sites.push_back(p);
                        break;
                    }
                }
            }
            break;
        }
        case InjectionSubcategory::EntryRelationship: {
            for (const ParameterPath& p : params) {
                if (p.kind != PathKind::EntryKey || p.segments.back().is_index) continue;
                for (const CooccurPair& pair : data_.cooccur_pairs) {
                    if (p.segments.back().key != pair.first) continue;
                    if (!path_contains_segment(p, pair.within)) continue;
                    ParameterPath sibling = p;
                    sibling.segments.back().key = pair.second;
                    if (resolve(doc, sibling) != nullptr) {
                        sites.push_back(p);
                        break;
                    }
                }
            }
            break;
        }
        case InjectionSubcategory::ValueRelationship: {
            std::set<std::string> logical_names;
            for (const ResourceDecl& decl : list_resources(doc)) {
                logical_names.insert(decl.logical_name);
            }
            for (const ParameterPath& p : params) {
                if (p.kind != PathKind::ScalarValue) continue;
                const yaml::Node* node = resolve(doc, p);
                if (node == nullptr) continue;
                const yaml::Node* scalar = nullptr;
                if (node->is_tagged() && node->tag == "Ref" && node->payload().is_scalar()) {
                    scalar = &node->payload();
                } else if (node->is_scalar()) {
                    scalar = node;
                } else {
                    continue;
                }
                if (logical_names.count(scalar->scalar_text) > 0) sites.push_back(p);
            }
            break;
        }
    }
    return sites;
}

namespace {

std::string pick_outside(SeededRng& rng, const std::vector<std::string>& candidates,
                         const std::set<std::string>& forbidden, const std::string& original,
                         std::uint64_t seed) {
    std::vector<std::string> usable;
    for (const std::string& c : candidates) {
        if (forbidden.count(c) == 0 && c != original) usable.push_back(c);
    }
    if (!usable.empty()) return usable[rng.pick(usable.size())];
    std::string fallback = candidates.empty() ? original : candidates.front();
    do {
        fallback += "-" + std::to_string(seed % 9973);
        seed = seed / 9973 + 1;
    } while (forbidden.count(fallback) > 0 || fallback == original);
    return fallback;
}

}  // namespace

InjectionOutcome FaultInjector::inject(const ConfigDocument& doc,
                                       InjectionSubcategory subcategory,
                                       std::uint64_t seed) const {
    std::vector<ParameterPath> sites = eligible_sites(doc, subcategory);
    if (sites.empty()) throw NoEligibleParameter(subcategory_name(subcategory));

    SeededRng rng(seed ^ (0xA5A5ULL + static_cast<std::uint64_t>(subcategory)));
    const ParameterPath site = sites[rng.pick(sites.size())];

    InjectionOutcome outcome;
    outcome.seed = seed;
    outcome.applied_rule.category = category_of(subcategory);
    outcome.applied_rule.subcategory = subcategory;

    yaml::Node root = doc.root;
    GroundTruthEntry truth;
    truth.path = site;

    switch (subcategory) {
        case InjectionSubcategory::ResourceType: {
            yaml::Node* node = resolve_mut(root, site.segments, site.segments.size());
            outcome.original_value = node->scalar_text;
            std::string bogus = pick_outside(rng, data_.bogus_resource_types,
                                             data_.resource_types, node->scalar_text, seed);
            node->scalar_text = bogus;
            node->scalar_kind = yaml::ScalarKind::String;
            truth.category = FindingCategory::ResourceTypeError;
            truth.note = "resource type replaced with unsupported token";
            outcome.applied_rule.spec_text = "value outside the supported resource type set";
            break;
        }
        case InjectionSubcategory::Entry: {
            yaml::Node* props = resolve_mut(root, site.segments, site.segments.size());
            ParameterPath type_path;
            type_path.segments = {site.segments[0], site.segments[1],
                                  PathSegment::of_key("Type")};
            const std::string& type = resolve(doc, type_path)->scalar_text;
            const std::vector<std::string>& allowed = data_.entries.at(type);
            std::set<std::string> forbidden(allowed.begin(), allowed.end());
            for (const auto& [key, value] : props->entries) forbidden.insert(key);
            std::string bogus = pick_outside(rng, data_.bogus_entries, forbidden, "", seed);
            props->entries.emplace_back(bogus, yaml::make_null());
            truth.path.segments.push_back(PathSegment::of_key(bogus));
            truth.path.kind = PathKind::EntryKey;
            truth.category = FindingCategory::ConfigurationEntryError;
            truth.note = "entry not valid for its resource type";
            outcome.applied_rule.spec_text = "entry outside the resource type's entry set";
            break;
        }
        case InjectionSubcategory::BasicNumeric: {
            yaml::Node* node = resolve_mut(root, site.segments, site.segments.size());
            outcome.original_value = node->scalar_text;
            const NumericRange& range = data_.numeric_ranges.at(site.segments.back().key);
            long long value;
            if (rng.pick(2) == 0) {
                value = range.max + 1 + static_cast<long long>(rng.pick(9));
            } else {
                value = range.min - 1 - static_cast<long long>(rng.pick(9));
            }
            node->scalar_text = std::to_string(value);
            node->scalar_kind = yaml::ScalarKind::Int;
            truth.category = FindingCategory::ConfigurationEntryValueError;
            truth.note = "numeric value outside [" + std::to_string(range.min) + ", " +
                         std::to_string(range.max) + "]";
            outcome.applied_rule.spec_text = "numeric value outside the valid range";
            break;
        }
        case InjectionSubcategory::Enum: {
            yaml::Node* node = resolve_mut(root, site.segments, site.segments.size());
            outcome.original_value = node->scalar_text;
            const EnumSpec* spec = nullptr;
            for (const EnumSpec& candidate : data_.enums) {
                if (candidate.key == site.segments.back().key &&
                    path_contains_segment(site, candidate.within)) {
                    spec = &candidate;
                    break;
                }
            }
            std::set<std::string> allowed(spec->values.begin(), spec->values.end());
            std::string bogus = pick_outside(rng, spec->bogus, allowed, node->scalar_text, seed);
            node->scalar_text = bogus;
            node->scalar_kind = yaml::ScalarKind::String;
            truth.category = FindingCategory::ConfigurationEntryValueError;
            truth.note = "value outside the allowed set for " + spec->key;
            outcome.applied_rule.spec_text = "value outside the allowed value set";
            break;
        }
        case InjectionSubcategory::EntryRelationship: {
            const CooccurPair* pair = nullptr;
            for (const CooccurPair& candidate : data_.cooccur_pairs) {
                if (candidate.first == site.segments.back().key &&
                    path_contains_segment(site, candidate.within)) {
                    ParameterPath sibling = site;
                    sibling.segments.back().key = candidate.second;
                    if (resolve(doc, sibling) != nullptr) {
                        pair = &candidate;
                        break;
                    }
                }
            }
            bool delete_first = rng.pick(2) == 0;
            const std::string& removed = delete_first ? pair->first : pair->second;
            const std::string& survivor = delete_first ? pair->second : pair->first;
            yaml::Node* owner = resolve_mut(root, site.segments, site.segments.size() - 1);
            for (std::size_t i = 0; i < owner->entries.size(); ++i) {
                if (owner->entries[i].first == removed) {
                    outcome.original_value =
                        removed + ": " + yaml::serialize(owner->entries[i].second);
                    while (!outcome.original_value.empty() &&
                           outcome.original_value.back() == '\n') {
                        outcome.original_value.pop_back();
                    }
                    owner->entries.erase(owner->entries.begin() +
                                         static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
            truth.path.segments.back().key = survivor;
            truth.path.kind = PathKind::EntryKey;
            truth.category = FindingCategory::EntryDependencyError;
            truth.note = pair->first + " and " + pair->second + " must appear together; " +
                         removed + " removed";
            outcome.applied_rule.spec_text = "co-occurrence relationship broken";
            break;
        }
        case InjectionSubcategory::ValueRelationship: {
            yaml::Node* node = resolve_mut(root, site.segments, site.segments.size());
            yaml::Node* scalar =
                (node->is_tagged() && node->tag == "Ref") ? &node->children.front() : node;
            outcome.original_value = scalar->scalar_text;
            std::set<std::string> logical_names;
            for (const ResourceDecl& decl : list_resources(doc)) {
                logical_names.insert(decl.logical_name);
            }
            std::string bogus = "NoSuch" + scalar->scalar_text;
            while (logical_names.count(bogus) > 0) bogus += std::to_string(seed % 97);
            scalar->scalar_text = bogus;
            scalar->scalar_kind = yaml::ScalarKind::String;
            truth.category = FindingCategory::ValueDependencyError;
            truth.note = "reference to undefined logical name";
            outcome.applied_rule.spec_text = "reference rewritten to a nonexistent logical name";
            break;
        }
    }

    outcome.ground_truth.origin = doc.origin;
    outcome.ground_truth.misconfigured.push_back(std::move(truth));
    outcome.ground_truth.note =
        std::string("injected ") + subcategory_name(subcategory) + " misconfiguration";

    outcome.mutated.root = std::move(root);
    outcome.mutated.source_text = yaml::serialize(outcome.mutated.root);
    outcome.mutated.origin = doc.origin;
    return outcome;
}

InjectionOutcome FaultInjector::inject_random(const ConfigDocument& doc,
                                              std::uint64_t seed) const {
    std::vector<InjectionSubcategory> eligible;
    for (InjectionSubcategory sub :
         {InjectionSubcategory::ResourceType, InjectionSubcategory::Entry,
          InjectionSubcategory::BasicNumeric, InjectionSubcategory::Enum,
          InjectionSubcategory::EntryRelationship, InjectionSubcategory::ValueRelationship}) {
        if (!eligible_sites(doc, sub).empty()) eligible.push_back(sub);
    }
    if (eligible.empty()) throw NoEligibleParameter("random");
    SeededRng rng(seed);
    return inject(doc, eligible[rng.pick(eligible.size())], seed);
}

}  // namespace sls
