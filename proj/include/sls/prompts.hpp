#pragma once

// Prompt construction for the two LLM detectors: the constraint-guided
// variant (five constraint dimensions, entry checks phrased as explicit
// steps) and the plain baseline variant. Block wording is frozen in
// assets/prompts/ and embedded at build time; rendering is byte-deterministic.

#include <string>
#include <vector>

#include "sls/errors.hpp"

namespace sls {

enum class PromptVariant { SlsDetector, Basic };

enum class ConstraintDimension { ResourceType, Entry, Value, EntryDependency, ValueDependency };

struct ConstraintBlock {
    ConstraintDimension dimension;
    std::string instruction_text;
    std::vector<std::string> cot_steps;  // non-empty only for the Entry dimension
};

struct PromptSpec {
    PromptVariant variant;
    std::string config_text;
    std::vector<ConstraintBlock> constraint_blocks;  // empty for Basic
    std::string response_demand;
};

PromptSpec make_prompt_spec(PromptVariant variant, const std::string& config_text);

std::string render_prompt(const PromptSpec& spec);

std::string build_slsdetector_prompt(const std::string& config_text);
std::string build_basic_prompt(const std::string& config_text);

const char* prompt_variant_name(PromptVariant variant);

}  // namespace sls
