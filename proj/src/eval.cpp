#include "sls/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <thread>

#include "json.hpp"
#include "sls/io.hpp"

namespace sls {

namespace {

using nlohmann::json;

}  // namespace

DetectionSummary DetectionSummary::from_report(const DetectionReport& report) {
    DetectionSummary summary;
    std::set<std::string> seen;
    for (const Finding& finding : report.findings) {
        if (!finding.aligned_path.has_value()) {
            ++summary.unmatched;
            continue;
        }
        if (seen.insert(finding.aligned_path->render()).second) {
            summary.detected.push_back({*finding.aligned_path, finding.category});
        }
    }
    return summary;
}

ConfusionCounts classify(const DetectionSummary& summary, const GroundTruth& truth,
                         const std::vector<ParameterPath>& all_params,
                         std::map<FindingCategory, long long>* per_category_tp) {
    std::set<std::string> param_set;
    for (const ParameterPath& p : all_params) param_set.insert(p.render());

    std::map<std::string, FindingCategory> truth_map;
    for (const GroundTruthEntry& entry : truth.misconfigured) {
        std::string rendered = entry.path.render();
        if (param_set.count(rendered) == 0) throw TruthPathMissing(rendered);
        truth_map.emplace(rendered, entry.category);
    }

    ConfusionCounts counts;
    std::set<std::string> detected_set;
    for (const DetectedParameter& detected : summary.detected) {
        std::string rendered = detected.path.render();
        if (!detected_set.insert(rendered).second) continue;
        auto truth_it = truth_map.find(rendered);
        if (truth_it != truth_map.end()) {
            ++counts.tp;
            if (per_category_tp != nullptr && truth_it->second == detected.category) {
                ++(*per_category_tp)[detected.category];
            }
        } else {
            ++counts.fp;
        }
    }
    for (const auto& [rendered, category] : truth_map) {
        if (detected_set.count(rendered) == 0) ++counts.fn;
    }
    long long real_fp = counts.fp;
    counts.fp += summary.unmatched;
    counts.tn = static_cast<long long>(param_set.size()) -
                static_cast<long long>(truth_map.size()) - real_fp;

    // Accounting conservation, enforced on every classification.
    if (counts.tp + counts.fp + counts.tn + counts.fn !=
        static_cast<long long>(param_set.size()) + summary.unmatched) {
        throw std::logic_error("confusion counts do not conserve parameter accounting");
    }
    return counts;
}

Metrics compute_metrics(const ConfusionCounts& counts) {
    Metrics metrics;
    if (counts.tp + counts.fp > 0) {
        metrics.precision =
            static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    } else {
        metrics.degenerate = true;
    }
    if (counts.tp + counts.fn > 0) {
        metrics.recall =
            static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    } else {
        metrics.degenerate = true;
    }
    if (metrics.precision + metrics.recall > 0.0) {
        metrics.f1 =
            2.0 * metrics.precision * metrics.recall / (metrics.precision + metrics.recall);
    } else {
        metrics.degenerate = true;
    }
    return metrics;
}

namespace {

FileEval evaluate_file(const ManifestEntry& entry, Detector& detector) {
    FileEval file;
    file.cohort = entry.cohort;
    file.origin = entry.label.empty() ? entry.template_path : entry.label;
    try {
        ConfigDocument doc = parse_template(read_file(entry.template_path), file.origin);
        GroundTruth truth = GroundTruth::from_json(read_file(entry.truth_path));
        DetectionReport report = detector.detect(doc);
        for (const std::string& warning : report.warnings) file.warnings.push_back(warning);
        file.counts = classify(DetectionSummary::from_report(report), truth,
                               enumerate_parameters(doc), &file.per_category_tp);
    } catch (const std::exception& error) {
        file.failed = true;
        file.failure = std::string(error.what()) + " (" + entry.template_path + ")";
        file.warnings.push_back(file.failure);
    }
    return file;
}

RunReport aggregate_run(std::vector<FileEval> files) {
    RunReport run;
    run.files = std::move(files);
    for (const FileEval& file : run.files) {
        if (file.failed) continue;
        run.totals += file.counts;
        run.per_cohort[cohort_name(file.cohort)] += file.counts;
        for (const auto& [category, count] : file.per_category_tp) {
            run.per_category_tp[category] += count;
        }
    }
    run.metrics = compute_metrics(run.totals);
    return run;
}

}  // namespace

EvalReport run_eval(const DatasetManifest& manifest, Detector& detector,
                    const EvalOptions& options) {
    if (manifest.entries.empty()) throw EmptyDataset();

    EvalReport report;
    int repetitions = std::max(1, options.repetitions);
    for (int rep = 0; rep < repetitions; ++rep) {
        std::vector<FileEval> files(manifest.entries.size());
        int jobs = std::max(1, options.jobs);
        if (jobs == 1) {
            for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
                files[i] = evaluate_file(manifest.entries[i], detector);
            }
        } else {
            // Results land in manifest order regardless of completion order.
            std::atomic<std::size_t> next{0};
            auto worker = [&]() {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= manifest.entries.size()) break;
                    files[i] = evaluate_file(manifest.entries[i], detector);
                }
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }
        RunReport run = aggregate_run(std::move(files));
        for (const FileEval& file : run.files) {
            if (file.failed) report.any_failure = true;
        }
        report.repetitions.push_back(std::move(run));
    }

    double precision = 0.0, recall = 0.0, f1 = 0.0;
    for (const RunReport& run : report.repetitions) {
        precision += run.metrics.precision;
        recall += run.metrics.recall;
        f1 += run.metrics.f1;
    }
    auto reps = static_cast<double>(report.repetitions.size());
    report.mean.precision = precision / reps;
    report.mean.recall = recall / reps;
    report.mean.f1 = f1 / reps;
    return report;
}

namespace {

json counts_to_json(const ConfusionCounts& counts) {
    return {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
}

json run_to_json(const RunReport& run, int index) {
    json j;
    j["run"] = index;
    j["totals"] = counts_to_json(run.totals);
    j["precision"] = run.metrics.precision;
    j["recall"] = run.metrics.recall;
    j["f1"] = run.metrics.f1;
    j["per_cohort"] = json::object();
    for (const auto& [cohort, counts] : run.per_cohort) {
        j["per_cohort"][cohort] = counts_to_json(counts);
    }
    j["per_category_tp"] = json::object();
    for (const auto& [category, count] : run.per_category_tp) {
        j["per_category_tp"][category_name(category)] = count;
    }
    j["per_file"] = json::object();
    for (const FileEval& file : run.files) {
        if (file.failed) {
            j["per_file"][file.origin] = {{"failed", true}, {"error", file.failure}};
        } else {
            j["per_file"][file.origin] = counts_to_json(file.counts);
        }
    }
    json warnings = json::array();
    for (const FileEval& file : run.files) {
        for (const std::string& warning : file.warnings) {
            warnings.push_back(file.origin + ": " + warning);
        }
    }
    j["warnings"] = std::move(warnings);
    return j;
}

std::string percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", value * 100.0);
    return buf;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
    json j;
    j["provenance"] = json::parse(report.provenance_json, nullptr, false).is_discarded()
                          ? json(report.provenance_json)
                          : json::parse(report.provenance_json);
    // Top-level counts mirror the first repetition; deterministic detectors
    // make all repetitions identical anyway.
    json first = run_to_json(report.repetitions.front(), 1);
    j["totals"] = first["totals"];
    j["precision"] = first["precision"];
    j["recall"] = first["recall"];
    j["f1"] = first["f1"];
    j["per_cohort"] = first["per_cohort"];
    j["per_category_tp"] = first["per_category_tp"];
    j["per_file"] = first["per_file"];
    j["repetitions"] = json::array();
    for (std::size_t i = 0; i < report.repetitions.size(); ++i) {
        j["repetitions"].push_back(run_to_json(report.repetitions[i], static_cast<int>(i + 1)));
    }
    j["mean"] = {{"precision", report.mean.precision},
                 {"recall", report.mean.recall},
                 {"f1", report.mean.f1}};
    j["any_failure"] = report.any_failure;
    return j.dump(2) + "\n";
}

std::string render_metrics_table(const EvalReport& report) {
    std::string out;
    out += "Metric     ";
    for (std::size_t i = 0; i < report.repetitions.size(); ++i) {
        out += "  Repetition " + std::to_string(i + 1);
    }
    out += "      Mean\n";

    auto row = [&](const char* label, auto metric_of, double mean_value) {
        std::string line = label;
        while (line.size() < 11) line += ' ';
        for (const RunReport& run : report.repetitions) {
            std::string cell = percent(metric_of(run.metrics));
            while (cell.size() < 14) cell.insert(cell.begin(), ' ');
            line += cell;
        }
        std::string cell = percent(mean_value);
        while (cell.size() < 10) cell.insert(cell.begin(), ' ');
        line += cell;
        out += line + "\n";
    };
    row("precision", [](const Metrics& m) { return m.precision; }, report.mean.precision);
    row("recall", [](const Metrics& m) { return m.recall; }, report.mean.recall);
    row("F1-score", [](const Metrics& m) { return m.f1; }, report.mean.f1);

    const ConfusionCounts& totals = report.repetitions.front().totals;
    out += "\nTotals (repetition 1): TP=" + std::to_string(totals.tp) +
           " FN=" + std::to_string(totals.fn) + " FP=" + std::to_string(totals.fp) +
           " TN=" + std::to_string(totals.tn) + "\n";
    return out;
}

}  // namespace sls
