#pragma once

// Parameter-level scoring of detectors against labeled datasets: confusion
// counts per file, precision/recall/F1, and the repeat-and-average protocol.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sls/eval_types.hpp"
#include "sls/findings.hpp"

namespace sls {

struct DetectedParameter {
    ParameterPath path;
    FindingCategory category = FindingCategory::Uncategorized;
};

// A detection report reduced to its scored form: matched findings collapsed
// to unique parameters (first category wins) plus the count of findings that
// aligned to nothing.
struct DetectionSummary {
    std::vector<DetectedParameter> detected;
    long long unmatched = 0;

    static DetectionSummary from_report(const DetectionReport& report);
};

// Confusion cells over one document. TP needs path identity only; category
// agreement feeds the optional per-category tally. Each unmatched finding
// counts as one false positive against a synthetic slot. Throws
// TruthPathMissing when the ground truth names an unknown parameter, and
// enforces tp+fn+fp+tn == |params| + unmatched on every call.
ConfusionCounts classify(const DetectionSummary& summary, const GroundTruth& truth,
                         const std::vector<ParameterPath>& all_params,
                         std::map<FindingCategory, long long>* per_category_tp = nullptr);

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = harmonic mean; 0/0 -> 0
// with the degenerate flag set.
Metrics compute_metrics(const ConfusionCounts& counts);

class Detector {
public:
    virtual ~Detector() = default;
    virtual std::string name() const = 0;
    virtual DetectionReport detect(const ConfigDocument& doc) = 0;
};

struct FileEval {
    std::string origin;
    Cohort cohort = Cohort::RealWorld;
    ConfusionCounts counts;
    std::map<FindingCategory, long long> per_category_tp;
    std::vector<std::string> warnings;
    bool failed = false;
    std::string failure;
};

struct RunReport {
    std::vector<FileEval> files;
    ConfusionCounts totals;
    Metrics metrics;
    std::map<std::string, ConfusionCounts> per_cohort;
    std::map<FindingCategory, long long> per_category_tp;
};

struct EvalReport {
    std::vector<RunReport> repetitions;
    Metrics mean;  // arithmetic mean of the per-run metric values
    bool any_failure = false;
    std::string provenance_json = "{}";
};

struct EvalOptions {
    int repetitions = 5;
    std::uint64_t seed = 0;
    int jobs = 1;  // files evaluated in parallel within one run
};

EvalReport run_eval(const DatasetManifest& manifest, Detector& detector,
                    const EvalOptions& options = {});

std::string eval_report_to_json(const EvalReport& report);

// Plain-text table: one row per metric, one column per repetition plus the
// mean, followed by the confusion totals.
std::string render_metrics_table(const EvalReport& report);

}  // namespace sls
