#include "sls/eval_types.hpp"

#include <filesystem>

#include "json.hpp"
#include "sls/io.hpp"

namespace sls {

namespace {

using nlohmann::json;

}  // namespace

std::string GroundTruth::to_json() const {
    json j;
    j["origin"] = origin;
    j["misconfigured"] = json::array();
    for (const GroundTruthEntry& entry : misconfigured) {
        json item;
        item["path"] = entry.path.render();
        item["category"] = category_name(entry.category);
        if (!entry.note.empty()) item["note"] = entry.note;
        j["misconfigured"].push_back(std::move(item));
    }
    if (!note.empty()) j["note"] = note;
    return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json(const std::string& text) {
    json j = json::parse(text);
    GroundTruth truth;
    truth.origin = j.value("origin", std::string());
    for (const json& item : j.value("misconfigured", json::array())) {
        GroundTruthEntry entry;
        entry.path = ParameterPath::parse(item["path"].get<std::string>());
        entry.category = category_from_name(item.value("category", std::string("Uncategorized")));
        entry.note = item.value("note", std::string());
        truth.misconfigured.push_back(std::move(entry));
    }
    truth.note = j.value("note", std::string());
    return truth;
}

const char* cohort_name(Cohort cohort) {
    switch (cohort) {
        case Cohort::ErrorFree: return "ErrorFree";
        case Cohort::RealWorld: return "RealWorld";
        case Cohort::Injected: return "Injected";
    }
    return "RealWorld";
}

Cohort cohort_from_name(const std::string& name) {
    if (name == "ErrorFree") return Cohort::ErrorFree;
    if (name == "RealWorld") return Cohort::RealWorld;
    if (name == "Injected") return Cohort::Injected;
    throw std::invalid_argument("unknown cohort: " + name);
}

DatasetManifest DatasetManifest::load(const std::string& path) {
    json j = json::parse(read_file(path));
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve_path = [&](const std::string& p) {
        std::filesystem::path candidate(p);
        if (candidate.is_absolute()) return candidate.string();
        return (base / candidate).string();
    };

    DatasetManifest manifest;
    for (const json& item : j.value("entries", json::array())) {
        ManifestEntry entry;
        entry.label = item["template"].get<std::string>();
        entry.template_path = resolve_path(entry.label);
        entry.truth_path = resolve_path(item["truth"].get<std::string>());
        entry.cohort = cohort_from_name(item["cohort"].get<std::string>());
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

std::string DatasetManifest::to_json() const {
    json j;
    j["entries"] = json::array();
    for (const ManifestEntry& entry : entries) {
        j["entries"].push_back({{"template", entry.template_path},
                                {"truth", entry.truth_path},
                                {"cohort", cohort_name(entry.cohort)}});
    }
    return j.dump(2) + "\n";
}

}  // namespace sls
