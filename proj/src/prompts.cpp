#include "sls/prompts.hpp"

#include <cctype>

#include "sls/assets.gen.hpp"

namespace sls {

namespace {

std::string block_text(std::string_view asset) {
    std::string text(asset);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

bool only_whitespace(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) == 0) return false;
    }
    return true;
}

std::vector<std::string> extract_steps(const std::string& text) {
    std::vector<std::string> steps;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line =
            eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        if (line.rfind("Step ", 0) == 0) steps.push_back(line);
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    return steps;
}

}  // namespace

const char* prompt_variant_name(PromptVariant variant) {
    return variant == PromptVariant::SlsDetector ? "sls" : "basic";
}

PromptSpec make_prompt_spec(PromptVariant variant, const std::string& config_text) {
    if (config_text.empty() || only_whitespace(config_text)) throw EmptyConfig();

    PromptSpec spec;
    spec.variant = variant;
    spec.config_text = config_text;

    const std::string format_demand = block_text(assets::response_format);
    if (variant == PromptVariant::Basic) {
        spec.response_demand = format_demand;
        return spec;
    }

    std::string entry_text = block_text(assets::constraint_entry);
    spec.constraint_blocks = {
        {ConstraintDimension::ResourceType, block_text(assets::constraint_resource_type), {}},
        {ConstraintDimension::Entry, entry_text, extract_steps(entry_text)},
        {ConstraintDimension::Value, block_text(assets::constraint_value), {}},
        {ConstraintDimension::EntryDependency, block_text(assets::constraint_entry_dependency), {}},
        {ConstraintDimension::ValueDependency, block_text(assets::constraint_value_dependency), {}},
    };
    spec.response_demand = block_text(assets::response_content) + "\n" + format_demand;
    return spec;
}

std::string render_prompt(const PromptSpec& spec) {
    std::string out = spec.config_text;
    if (out.empty() || out.back() != '\n') out += '\n';
    out += '\n';
    out += block_text(assets::role_task);
    out += '\n';
    for (const ConstraintBlock& block : spec.constraint_blocks) {
        out += '\n';
        out += block.instruction_text;
        out += '\n';
    }
    out += '\n';
    out += spec.response_demand;
    out += '\n';
    return out;
}

std::string build_slsdetector_prompt(const std::string& config_text) {
    return render_prompt(make_prompt_spec(PromptVariant::SlsDetector, config_text));
}

std::string build_basic_prompt(const std::string& config_text) {
    return render_prompt(make_prompt_spec(PromptVariant::Basic, config_text));
}

}  // namespace sls
