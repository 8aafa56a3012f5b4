#include "sls/detectors.hpp"

namespace sls {

DetectionReport LlmDetector::detect(const ConfigDocument& doc) {
    std::string prompt = render_prompt(make_prompt_spec(variant_, doc.source_text));
    LlmRequest request = LlmRequest::make(gateway_.config(), std::move(prompt));
    LlmResponse response = gateway_.complete(request);

    DetectionReport report;
    report.origin = doc.origin;
    report.detector = variant_ == PromptVariant::SlsDetector ? "SlsDetector" : "BasicLLM";
    report.raw_response = response.raw_text;

    Extraction extraction = extract_delimited(response.raw_text);
    if (extraction.missing_delimiters) report.warnings.push_back("MissingDelimiters");
    report.findings = parse_findings(extraction.text);
    align_findings(report.findings, doc);
    return report;
}

}  // namespace sls
