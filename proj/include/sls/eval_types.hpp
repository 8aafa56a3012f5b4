#pragma once

// Shared evaluation data: ground truth, dataset manifests, confusion counts,
// and derived metrics.

#include <map>
#include <string>
#include <vector>

#include "sls/config_model.hpp"
#include "sls/findings.hpp"

namespace sls {

struct GroundTruthEntry {
    ParameterPath path;
    FindingCategory category = FindingCategory::Uncategorized;
    std::string note;
};

struct GroundTruth {
    std::string origin;
    std::vector<GroundTruthEntry> misconfigured;  // empty for error-free files
    std::string note;

    std::string to_json() const;
    static GroundTruth from_json(const std::string& text);
};

enum class Cohort { ErrorFree, RealWorld, Injected };

const char* cohort_name(Cohort cohort);
Cohort cohort_from_name(const std::string& name);

struct ManifestEntry {
    std::string template_path;  // resolved, for file access
    std::string truth_path;     // resolved, for file access
    std::string label;          // template path as written in the manifest
    Cohort cohort = Cohort::RealWorld;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    // Relative template/truth paths are resolved against the manifest's
    // directory.
    static DatasetManifest load(const std::string& path);
    std::string to_json() const;
};

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& other) {
        tp += other.tp;
        fp += other.fp;
        tn += other.tn;
        fn += other.fn;
        return *this;
    }
    bool operator==(const ConfusionCounts& other) const {
        return tp == other.tp && fp == other.fp && tn == other.tn && fn == other.fn;
    }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // set when any ratio was 0/0
};

}  // namespace sls
