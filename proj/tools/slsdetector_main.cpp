// slsdetector: misconfiguration detection for AWS SAM templates.
//
// Subcommands: detect, mine, inject, eval, prompt-dump. Configuration
// precedence is flags > environment (SLSDETECTOR_*) > --config file.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "sls/detectors.hpp"
#include "sls/injector.hpp"
#include "sls/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Settings {
    std::string config_path;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o";
    std::string credential_env = "OPENAI_API_KEY";
    std::string cache_path;
    std::string cache_mode = "passthrough";
    double temperature = 0.0;
    int max_tokens = 4096;
    double timeout = 120.0;
    double alpha = 0.05;
    double min_confidence = 0.95;
    std::uint64_t seed = 0;
    int repetitions = 5;
    int jobs = 1;
    std::string dd_channels = "rt,entry,value";
    std::string out;
};

sls::DdOptions parse_dd_channels(const std::string& csv) {
    sls::DdOptions options;
    options.flag_unknown_resource_types = csv.find("rt") != std::string::npos;
    options.flag_unknown_entries = csv.find("entry") != std::string::npos;
    options.flag_unknown_values = csv.find("value") != std::string::npos;
    return options;
}

void apply_config_file(Settings& s, const std::string& path) {
    json j = json::parse(sls::read_file(path));
    s.endpoint = j.value("endpoint", s.endpoint);
    s.model = j.value("model", s.model);
    s.credential_env = j.value("credential_env", s.credential_env);
    s.cache_path = j.value("cache", s.cache_path);
    s.cache_mode = j.value("cache_mode", s.cache_mode);
    s.temperature = j.value("temperature", s.temperature);
    s.max_tokens = j.value("max_tokens", s.max_tokens);
    s.timeout = j.value("timeout", s.timeout);
    s.alpha = j.value("alpha", s.alpha);
    s.min_confidence = j.value("min_confidence", s.min_confidence);
    s.seed = j.value("seed", s.seed);
    s.repetitions = j.value("repetitions", s.repetitions);
    s.jobs = j.value("jobs", s.jobs);
}

void apply_env(Settings& s) {
    auto env = [](const char* name) -> std::string {
        const char* value = std::getenv(name);
        return value == nullptr ? std::string() : std::string(value);
    };
    if (auto v = env("SLSDETECTOR_ENDPOINT"); !v.empty()) s.endpoint = v;
    if (auto v = env("SLSDETECTOR_MODEL"); !v.empty()) s.model = v;
    if (auto v = env("SLSDETECTOR_CREDENTIAL_ENV"); !v.empty()) s.credential_env = v;
    if (auto v = env("SLSDETECTOR_CACHE"); !v.empty()) s.cache_path = v;
    if (auto v = env("SLSDETECTOR_CACHE_MODE"); !v.empty()) s.cache_mode = v;
}

json provenance_json(const Settings& s, const std::string& command) {
    return json{{"command", command},
                {"model", s.model},
                {"endpoint", s.endpoint},
                {"cache", s.cache_path},
                {"cache_mode", s.cache_mode},
                {"temperature", s.temperature},
                {"alpha", s.alpha},
                {"min_confidence", s.min_confidence},
                {"seed", s.seed},
                {"repetitions", s.repetitions},
                {"jobs", s.jobs}};
}

sls::ProviderConfig provider_config(const Settings& s) {
    sls::ProviderConfig cfg;
    cfg.endpoint_url = s.endpoint;
    cfg.model_name = s.model;
    cfg.temperature = s.temperature;
    cfg.max_output_tokens = s.max_tokens;
    cfg.credential_env_var = s.credential_env;
    cfg.timeout_seconds = s.timeout;
    return cfg;
}

std::unique_ptr<sls::LlmGateway> make_gateway(const Settings& s) {
    sls::CacheMode mode = sls::parse_cache_mode(s.cache_mode);
    if (mode != sls::CacheMode::Passthrough && s.cache_path.empty()) {
        throw std::runtime_error("--cache is required for cache mode " + s.cache_mode);
    }
    sls::ResponseCache cache = s.cache_path.empty()
                                   ? sls::ResponseCache()
                                   : sls::ResponseCache(s.cache_path, mode);
    return std::make_unique<sls::LlmGateway>(provider_config(s), std::move(cache));
}

std::vector<sls::Transaction> load_corpus(const std::string& dir,
                                          std::vector<std::string>& warnings) {
    std::vector<std::string> paths;
    for (const fs::directory_entry& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        if (ext == ".yaml" || ext == ".yml" || ext == ".template") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());

    std::vector<sls::Transaction> transactions;
    for (const std::string& path : paths) {
        try {
            sls::ConfigDocument doc = sls::parse_template(sls::read_file(path), path);
            transactions.push_back(sls::make_transaction(doc));
        } catch (const std::exception& error) {
            warnings.push_back(path + ": " + error.what());
        }
    }
    if (transactions.empty()) throw sls::EmptyCorpus();
    return transactions;
}

void print_detection_summary(const sls::DetectionReport& report) {
    std::cout << "Detector: " << report.detector << "\n";
    std::cout << "Template: " << report.origin << "\n";
    if (report.findings.empty()) {
        std::cout << "No misconfigurations detected.\n";
    } else {
        std::map<std::string, std::vector<const sls::Finding*>> grouped;
        for (const sls::Finding& finding : report.findings) {
            grouped[sls::category_name(finding.category)].push_back(&finding);
        }
        for (const auto& [category, findings] : grouped) {
            std::cout << category << ":\n";
            for (const sls::Finding* finding : findings) {
                std::cout << "  - " << finding->mention_text;
                if (finding->aligned_path.has_value()) {
                    std::cout << "  [" << finding->aligned_path->render() << "]";
                } else {
                    std::cout << "  [unmatched]";
                }
                std::cout << "\n";
            }
        }
    }
    for (const std::string& warning : report.warnings) {
        std::cout << "warning: " << warning << "\n";
    }
}

int cmd_detect(Settings& s, const std::string& template_path, const std::string& detector_name,
               const std::string& rulebase_path) {
    sls::ConfigDocument doc =
        sls::parse_template(sls::read_file(template_path), template_path);

    std::unique_ptr<sls::LlmGateway> gateway;
    std::unique_ptr<sls::Detector> detector;
    if (detector_name == "dd") {
        if (rulebase_path.empty()) throw std::runtime_error("detector dd requires --rulebase");
        detector = std::make_unique<sls::DataDrivenDetector>(
            sls::RuleBase::from_json(sls::read_file(rulebase_path)),
            parse_dd_channels(s.dd_channels));
    } else {
        gateway = make_gateway(s);
        detector = std::make_unique<sls::LlmDetector>(*gateway,
                                                      detector_name == "sls"
                                                          ? sls::PromptVariant::SlsDetector
                                                          : sls::PromptVariant::Basic);
    }

    sls::DetectionReport report = detector->detect(doc);
    std::string out_path = s.out.empty() ? template_path + ".report.json" : s.out;
    json out = json::parse(report.to_json());
    out["provenance"] = provenance_json(s, "detect");
    sls::write_file(out_path, out.dump(2) + "\n");
    print_detection_summary(report);
    std::cout << "Report written to " << out_path << "\n";
    return 0;
}

int cmd_mine(Settings& s, const std::string& corpus_dir) {
    std::vector<std::string> warnings;
    std::vector<sls::Transaction> transactions = load_corpus(corpus_dir, warnings);
    sls::RuleBase rulebase =
        sls::mine_rulebase(transactions, s.alpha, s.min_confidence, corpus_dir);

    std::string out_path = s.out.empty() ? "rulebase.json" : s.out;
    sls::write_file(out_path, rulebase.to_json());

    std::cout << "Transactions: " << transactions.size() << "\n";
    std::cout << "Catalog items: " << rulebase.catalog.known_items.size() << "\n";
    std::cout << "Frequent itemsets: " << rulebase.frequent_itemsets << "\n";
    std::cout << "Rules: " << rulebase.rules.size() << "\n";
    for (const std::string& warning : warnings) std::cout << "warning: " << warning << "\n";
    if (rulebase.rules.empty()) {
        std::cout << "warning: no rules at alpha " << s.alpha
                  << "; consider lowering the threshold\n";
    }
    std::cout << "Rule base written to " << out_path << "\n";
    return 0;
}

int cmd_inject(Settings& s, const std::string& template_path, const std::string& subcategory,
               const std::string& out_dir, const std::string& spec_data_path) {
    sls::ConfigDocument doc =
        sls::parse_template(sls::read_file(template_path), template_path);
    sls::FaultInjector injector(spec_data_path.empty()
                                    ? sls::SamSpecData::builtin()
                                    : sls::SamSpecData::from_json(sls::read_file(spec_data_path)));

    sls::InjectionOutcome outcome;
    if (subcategory == "random") {
        outcome = injector.inject_random(doc, s.seed);
    } else {
        auto sub = sls::subcategory_from_name(subcategory);
        if (!sub.has_value()) throw std::runtime_error("unknown subcategory: " + subcategory);
        outcome = injector.inject(doc, *sub, s.seed);
    }

    fs::create_directories(out_dir);
    std::string stem = fs::path(template_path).stem().string();
    std::string mutated_path = (fs::path(out_dir) / (stem + ".injected.yaml")).string();
    std::string truth_path = (fs::path(out_dir) / (stem + ".injected.truth.json")).string();
    outcome.ground_truth.origin = stem + ".injected.yaml";
    sls::write_file(mutated_path, outcome.mutated.source_text);
    sls::write_file(truth_path, outcome.ground_truth.to_json());

    std::cout << "Applied " << sls::subcategory_name(outcome.applied_rule.subcategory)
              << " rule at " << outcome.ground_truth.misconfigured.front().path.render() << "\n";
    std::cout << "Mutated template: " << mutated_path << "\n";
    std::cout << "Ground truth: " << truth_path << "\n";
    return 0;
}

int eval_once(Settings& s, const sls::DatasetManifest& manifest,
              const std::string& detector_name, const std::string& rulebase_path,
              const std::string& corpus_dir, double alpha, const std::string& out_path) {
    std::unique_ptr<sls::LlmGateway> gateway;
    std::unique_ptr<sls::Detector> detector;
    if (detector_name == "dd") {
        sls::RuleBase rulebase;
        if (!rulebase_path.empty()) {
            rulebase = sls::RuleBase::from_json(sls::read_file(rulebase_path));
        } else if (!corpus_dir.empty()) {
            std::vector<std::string> warnings;
            rulebase = sls::mine_rulebase(load_corpus(corpus_dir, warnings), alpha,
                                          s.min_confidence, corpus_dir);
        } else {
            throw std::runtime_error("detector dd requires --rulebase or --corpus");
        }
        detector = std::make_unique<sls::DataDrivenDetector>(std::move(rulebase),
                                                          parse_dd_channels(s.dd_channels));
    } else {
        gateway = make_gateway(s);
        detector = std::make_unique<sls::LlmDetector>(*gateway,
                                                      detector_name == "sls"
                                                          ? sls::PromptVariant::SlsDetector
                                                          : sls::PromptVariant::Basic);
    }

    sls::EvalOptions options;
    options.repetitions = s.repetitions;
    options.seed = s.seed;
    options.jobs = s.jobs;
    sls::EvalReport report = sls::run_eval(manifest, *detector, options);

    json prov = provenance_json(s, "eval");
    prov["detector"] = detector_name;
    prov["alpha"] = alpha;
    report.provenance_json = prov.dump();
    sls::write_file(out_path, sls::eval_report_to_json(report));

    std::cout << "Detector: " << detector_name << "  (alpha " << alpha << ")\n";
    std::cout << sls::render_metrics_table(report);
    std::cout << "Report written to " << out_path << "\n";
    return report.any_failure ? 2 : 0;
}

int cmd_eval(Settings& s, const std::string& manifest_path, const std::string& detector_name,
             const std::string& rulebase_path, const std::string& corpus_dir,
             const std::string& alpha_sweep) {
    sls::DatasetManifest manifest = sls::DatasetManifest::load(manifest_path);
    for (const sls::ManifestEntry& entry : manifest.entries) {
        if (!fs::exists(entry.template_path)) {
            throw std::runtime_error("manifest references missing template: " +
                                     entry.template_path);
        }
        if (!fs::exists(entry.truth_path)) {
            throw std::runtime_error("manifest references missing ground truth: " +
                                     entry.truth_path);
        }
    }

    std::string out_path = s.out.empty() ? "eval_report.json" : s.out;
    if (alpha_sweep.empty()) {
        return eval_once(s, manifest, detector_name, rulebase_path, corpus_dir, s.alpha,
                         out_path);
    }

    if (detector_name != "dd" || corpus_dir.empty()) {
        throw std::runtime_error("--alpha-sweep requires detector dd with --corpus");
    }
    int status = 0;
    std::string sweep = alpha_sweep;
    std::replace(sweep.begin(), sweep.end(), ',', ' ');
    std::istringstream stream(sweep);
    double alpha = 0.0;
    while (stream >> alpha) {
        std::string suffixed = out_path + ".alpha" + std::to_string(alpha);
        status |= eval_once(s, manifest, detector_name, rulebase_path, corpus_dir, alpha,
                            suffixed);
    }
    return status;
}

int cmd_prompt_dump(const std::string& template_path, const std::string& variant) {
    sls::ConfigDocument doc =
        sls::parse_template(sls::read_file(template_path), template_path);
    if (variant == "basic") {
        std::cout << sls::build_basic_prompt(doc.source_text);
    } else {
        std::cout << sls::build_slsdetector_prompt(doc.source_text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Settings settings;

    // --config is honored before flag parsing so flags can override it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") settings.config_path = argv[i + 1];
    }
    try {
        if (!settings.config_path.empty()) apply_config_file(settings, settings.config_path);
        apply_env(settings);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }

    CLI::App app{"Misconfiguration detection for AWS SAM templates"};
    app.add_option("--config", settings.config_path, "JSON config file");
    app.add_option("--endpoint", settings.endpoint, "Chat-completion endpoint URL");
    app.add_option("--model", settings.model, "Model name");
    app.add_option("--credential-env", settings.credential_env,
                   "Environment variable holding the API key");
    app.add_option("--cache", settings.cache_path, "Response cache file");
    app.add_option("--cache-mode", settings.cache_mode, "record|replay|passthrough");
    app.add_option("--temperature", settings.temperature, "Sampling temperature (default 0)");
    app.add_option("--max-tokens", settings.max_tokens, "Maximum output tokens");
    app.add_option("--timeout", settings.timeout, "Request timeout in seconds");
    app.add_option("--alpha", settings.alpha, "Support threshold fraction");
    app.add_option("--min-confidence", settings.min_confidence, "Rule confidence threshold");
    app.add_option("--seed", settings.seed, "Random seed");
    app.add_option("--repetitions", settings.repetitions, "Evaluation repetitions");
    app.add_option("--jobs", settings.jobs, "Parallel files per evaluation run");
    app.add_option("--dd-channels", settings.dd_channels,
                   "Unknown-item channels for the dd detector (subset of rt,entry,value)");
    app.add_option("--out", settings.out, "Output path");
    app.require_subcommand(1);

    std::string template_path, detector_name = "sls", rulebase_path, corpus_dir;
    std::string subcategory = "random", out_dir = ".", spec_data_path, manifest_path;
    std::string variant = "sls", alpha_sweep;

    // Global flags may appear after the subcommand.
    app.fallthrough();

    CLI::App* detect = app.add_subcommand("detect", "Detect misconfigurations in one template");
    detect->add_option("template", template_path, "Template file")->required();
    detect->add_option("--detector", detector_name, "sls|basic|dd");
    detect->add_option("--rulebase", rulebase_path, "Rule base file (detector dd)");

    CLI::App* mine = app.add_subcommand("mine", "Mine a rule base from a corpus directory");
    mine->add_option("corpus", corpus_dir, "Corpus directory")->required();

    CLI::App* inject = app.add_subcommand("inject", "Generate a misconfigured template");
    inject->add_option("template", template_path, "Template file")->required();
    inject->add_option("--subcategory", subcategory,
                       "resource-type|entry|basic-numeric|enum|entry-relationship|"
                       "value-relationship|random");
    inject->add_option("--out-dir", out_dir, "Output directory");
    inject->add_option("--spec-data", spec_data_path, "Alternate allowed-value data file");

    CLI::App* eval = app.add_subcommand("eval", "Score a detector against a labeled dataset");
    eval->add_option("manifest", manifest_path, "Dataset manifest file")->required();
    eval->add_option("--detector", detector_name, "sls|basic|dd");
    eval->add_option("--rulebase", rulebase_path, "Rule base file (detector dd)");
    eval->add_option("--corpus", corpus_dir, "Corpus directory to mine (detector dd)");
    eval->add_option("--alpha-sweep", alpha_sweep, "Comma-separated alpha fractions");

    CLI::App* prompt_dump = app.add_subcommand("prompt-dump", "Print the rendered prompt");
    prompt_dump->add_option("template", template_path, "Template file")->required();
    prompt_dump->add_option("--variant", variant, "sls|basic");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return cmd_detect(settings, template_path, detector_name,
                                                rulebase_path);
        if (mine->parsed()) return cmd_mine(settings, corpus_dir);
        if (inject->parsed()) return cmd_inject(settings, template_path, subcategory, out_dir,
                                                spec_data_path);
        if (eval->parsed()) return cmd_eval(settings, manifest_path, detector_name,
                                            rulebase_path, corpus_dir, alpha_sweep);
        if (prompt_dump->parsed()) return cmd_prompt_dump(template_path, variant);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
