#pragma once

// Concrete detectors behind the common Detector interface: the two
// prompt-based variants and the data-driven rule checker.

#include "sls/eval.hpp"
#include "sls/gateway.hpp"
#include "sls/miner.hpp"
#include "sls/prompts.hpp"

namespace sls {

class DataDrivenDetector : public Detector {
public:
    DataDrivenDetector(RuleBase rulebase, DdOptions options = {})
        : rulebase_(std::move(rulebase)), options_(options) {}

    std::string name() const override { return "dd"; }
    DetectionReport detect(const ConfigDocument& doc) override {
        return detect_dd(doc, rulebase_, options_);
    }

private:
    RuleBase rulebase_;
    DdOptions options_;
};

class LlmDetector : public Detector {
public:
    LlmDetector(LlmGateway& gateway, PromptVariant variant)
        : gateway_(gateway), variant_(variant) {}

    std::string name() const override { return prompt_variant_name(variant_); }
    DetectionReport detect(const ConfigDocument& doc) override;

private:
    LlmGateway& gateway_;
    PromptVariant variant_;
};

}  // namespace sls
