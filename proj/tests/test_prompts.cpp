#include "doctest.h"

#include "sls/prompts.hpp"
#include "support/fixtures.hpp"

using namespace sls;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

const char* kConstraintHeadings[] = {
    "Resource Type Constraint:", "Entry Constraint:", "Value Constraint:",
    "Entry Dependency Constraint:", "Value Dependency Constraint:"};

const char* kCategoryHeadings[] = {
    "Resource Type Errors", "Configuration Entry Errors", "Configuration Entry Value Errors",
    "Entry Dependency Errors", "Value Dependency Errors"};

}  // namespace

TEST_CASE("constraint-guided prompt matches the committed golden byte for byte") {
    std::string config = test::read_fixture("fixtures/s3_event_lambda.yaml");
    std::string prompt = build_slsdetector_prompt(config);
    CHECK(prompt == test::read_fixture("golden/prompt_sls_canonical.txt"));
}

TEST_CASE("basic prompt matches the committed golden byte for byte") {
    std::string config = test::read_fixture("fixtures/s3_event_lambda.yaml");
    std::string prompt = build_basic_prompt(config);
    CHECK(prompt == test::read_fixture("golden/prompt_basic_canonical.txt"));
}

TEST_CASE("constraint-guided prompt carries every structural element") {
    std::string config = test::read_fixture("fixtures/s3_event_lambda.yaml");
    std::string prompt = build_slsdetector_prompt(config);

    CHECK(count_occurrences(prompt, config) == 1);
    CHECK(prompt.find("You are an expert at writing AWS SAM configurations for serverless "
                      "applications") != std::string::npos);
    CHECK(prompt.find("Are there any misconfigurations in the above configuration file?") !=
          std::string::npos);
    for (const char* heading : kConstraintHeadings) {
        CHECK(count_occurrences(prompt, heading) == 1);
    }
    for (const char* heading : kCategoryHeadings) {
        CHECK(prompt.find(heading) != std::string::npos);
    }
    CHECK(prompt.find("Step 1:") != std::string::npos);
    CHECK(prompt.find("Step 2:") != std::string::npos);
    CHECK(prompt.find("Step 3:") != std::string::npos);
    CHECK(prompt.find("case sensitivity, and the use of singular or plural forms") !=
          std::string::npos);
    CHECK(prompt.find("special attention to indentation") != std::string::npos);
    CHECK(prompt.find("the value cannot be defined as null") != std::string::npos);
    CHECK(prompt.find("Check if there are dependencies between configuration entries") !=
          std::string::npos);
    CHECK(prompt.find("possibly implicit") != std::string::npos);
    CHECK(prompt.find("Please summarize the misconfigurations that are absolutely certain") !=
          std::string::npos);
    CHECK(prompt.find("<START>") != std::string::npos);
    CHECK(prompt.find("<END>") != std::string::npos);

    // The config comes first, then role/task, then the blocks in fixed order.
    std::size_t config_pos = prompt.find(config);
    std::size_t role_pos = prompt.find("You are an expert");
    CHECK(config_pos < role_pos);
    std::size_t previous = role_pos;
    for (const char* heading : kConstraintHeadings) {
        std::size_t pos = prompt.find(heading);
        CHECK(pos > previous);
        previous = pos;
    }
    CHECK(prompt.find("Please summarize") > previous);
}

TEST_CASE("basic prompt shares role/task/format and has no constraint text") {
    std::string config = test::read_fixture("fixtures/s3_event_lambda.yaml");
    std::string prompt = build_basic_prompt(config);

    CHECK(count_occurrences(prompt, config) == 1);
    CHECK(prompt.find("You are an expert at writing AWS SAM configurations") !=
          std::string::npos);
    CHECK(prompt.find("<START>") != std::string::npos);
    CHECK(prompt.find("<END>") != std::string::npos);
    CHECK(prompt.find("Check whether the resource type") == std::string::npos);
    for (const char* heading : kConstraintHeadings) {
        CHECK(prompt.find(heading) == std::string::npos);
    }
}

TEST_CASE("single-line config is embedded verbatim exactly once") {
    std::string config = "Transform: AWS::Serverless-2016-10-31";
    std::string prompt = build_slsdetector_prompt(config);
    CHECK(count_occurrences(prompt, config + "\n") == 1);
}

TEST_CASE("empty config is rejected") {
    CHECK_THROWS_AS(build_slsdetector_prompt(""), EmptyConfig);
    CHECK_THROWS_AS(build_slsdetector_prompt("  \n "), EmptyConfig);
    CHECK_THROWS_AS(build_basic_prompt(""), EmptyConfig);
}

TEST_CASE("prompt spec invariants: five ordered blocks, three entry steps") {
    PromptSpec spec = make_prompt_spec(PromptVariant::SlsDetector, "Transform: x");
    REQUIRE(spec.constraint_blocks.size() == 5);
    CHECK(spec.constraint_blocks[0].dimension == ConstraintDimension::ResourceType);
    CHECK(spec.constraint_blocks[1].dimension == ConstraintDimension::Entry);
    CHECK(spec.constraint_blocks[2].dimension == ConstraintDimension::Value);
    CHECK(spec.constraint_blocks[3].dimension == ConstraintDimension::EntryDependency);
    CHECK(spec.constraint_blocks[4].dimension == ConstraintDimension::ValueDependency);
    CHECK(spec.constraint_blocks[1].cot_steps.size() == 3);
    for (std::size_t i = 0; i < 5; ++i) {
        if (i != 1) CHECK(spec.constraint_blocks[i].cot_steps.empty());
    }

    PromptSpec basic = make_prompt_spec(PromptVariant::Basic, "Transform: x");
    CHECK(basic.constraint_blocks.empty());
}

TEST_CASE("rendering is deterministic") {
    std::string config = test::read_fixture("fixtures/s3_event_lambda.yaml");
    CHECK(build_slsdetector_prompt(config) == build_slsdetector_prompt(config));
    CHECK(build_basic_prompt(config) == build_basic_prompt(config));
}
