#include "doctest.h"

#include <set>

#include "sls/injector.hpp"
#include "sls/miner.hpp"
#include "support/fixtures.hpp"

using namespace sls;

namespace {

const InjectionSubcategory kAllSubcategories[] = {
    InjectionSubcategory::ResourceType,     InjectionSubcategory::Entry,
    InjectionSubcategory::BasicNumeric,     InjectionSubcategory::Enum,
    InjectionSubcategory::EntryRelationship, InjectionSubcategory::ValueRelationship,
};

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        lines.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return lines;
}

// Line diff via common prefix/suffix; single-line mutations always reduce to
// one removed and/or one added line.
struct LineDiff {
    std::vector<std::string> removed;
    std::vector<std::string> added;
};

LineDiff diff_lines(const std::string& before, const std::string& after) {
    std::vector<std::string> a = split_lines(before);
    std::vector<std::string> b = split_lines(after);
    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
        ++suffix;
    }
    LineDiff diff;
    for (std::size_t i = prefix; i < a.size() - suffix; ++i) diff.removed.push_back(a[i]);
    for (std::size_t i = prefix; i < b.size() - suffix; ++i) diff.added.push_back(b[i]);
    return diff;
}

std::string fixture_name(int index) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "fx%02d", index);
    return std::string("inject_fixtures/") + buf + ".yaml";
}

}  // namespace

TEST_CASE("canonical fixture eligible sites per subcategory") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;

    std::vector<ParameterPath> types =
        injector.eligible_sites(doc, InjectionSubcategory::ResourceType);
    REQUIRE(types.size() == 2);
    CHECK(types[0].render() == "Resources.BucketEventConsumer.Type=!");
    CHECK(types[1].render() == "Resources.SomeBucket.Type=!");

    std::vector<ParameterPath> enums = injector.eligible_sites(doc, InjectionSubcategory::Enum);
    std::set<std::string> enum_renders;
    for (const ParameterPath& p : enums) enum_renders.insert(p.render());
    CHECK(enum_renders.count("Resources.BucketEventConsumer.Properties.Runtime=") == 1);

    // The canonical fixture has no numeric parameter with a known range.
    CHECK(injector.eligible_sites(doc, InjectionSubcategory::BasicNumeric).empty());
    CHECK_THROWS_AS(injector.inject(doc, InjectionSubcategory::BasicNumeric, 1),
                    NoEligibleParameter);

    std::vector<ParameterPath> pairs =
        injector.eligible_sites(doc, InjectionSubcategory::EntryRelationship);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].segments.back().key == "Name");

    std::vector<ParameterPath> refs =
        injector.eligible_sites(doc, InjectionSubcategory::ValueRelationship);
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].render() ==
          "Resources.BucketEventConsumer.Properties.Events.CreateMetaEvent.Properties.Bucket=");
}

TEST_CASE("enum injection replaces the runtime with an out-of-set token") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome outcome = injector.inject(doc, InjectionSubcategory::Enum, 7);

    REQUIRE(outcome.ground_truth.misconfigured.size() == 1);
    const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
    CHECK(truth.category == FindingCategory::ConfigurationEntryValueError);

    const yaml::Node* mutated_value = resolve(outcome.mutated, truth.path);
    REQUIRE(mutated_value != nullptr);
    const EnumSpec* runtime_spec = nullptr;
    for (const EnumSpec& spec : injector.data().enums) {
        if (spec.key == truth.path.segments.back().key) runtime_spec = &spec;
    }
    REQUIRE(runtime_spec != nullptr);
    for (const std::string& allowed : runtime_spec->values) {
        CHECK(mutated_value->scalar_text != allowed);
    }
    CHECK(mutated_value->scalar_text != outcome.original_value);
}

TEST_CASE("entry-relationship injection removes one pair member, truth names the survivor") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome outcome =
        injector.inject(doc, InjectionSubcategory::EntryRelationship, 3);

    const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
    CHECK(truth.category == FindingCategory::EntryDependencyError);
    std::string survivor = truth.path.segments.back().key;
    CHECK((survivor == "Name" || survivor == "Value"));
    CHECK(resolve(outcome.mutated, truth.path) != nullptr);

    // The removed partner is gone from the mutated document.
    ParameterPath removed = truth.path;
    removed.segments.back().key = survivor == "Name" ? "Value" : "Name";
    CHECK(resolve(outcome.mutated, removed) == nullptr);
    CHECK(resolve(doc, removed) != nullptr);
}

TEST_CASE("value-relationship injection rewrites the reference to a missing name") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome outcome =
        injector.inject(doc, InjectionSubcategory::ValueRelationship, 11);

    const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
    CHECK(truth.category == FindingCategory::ValueDependencyError);
    CHECK(outcome.original_value == "SomeBucket");

    const yaml::Node* node = resolve(outcome.mutated, truth.path);
    REQUIRE(node != nullptr);
    REQUIRE(node->is_tagged());
    std::string referent = node->payload().scalar_text;
    CHECK(referent != "SomeBucket");
    std::set<std::string> names;
    for (const ResourceDecl& decl : list_resources(outcome.mutated)) {
        names.insert(decl.logical_name);
    }
    CHECK(names.count(referent) == 0);
}

TEST_CASE("resource-type injection stays outside the supported set") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome outcome = injector.inject(doc, InjectionSubcategory::ResourceType, 5);
    const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
    CHECK(truth.category == FindingCategory::ResourceTypeError);
    CHECK(truth.path.kind == PathKind::ResourceTypeDecl);
    const yaml::Node* node = resolve(outcome.mutated, truth.path);
    CHECK(injector.data().resource_types.count(node->scalar_text) == 0);
}

TEST_CASE("entry injection adds a key invalid for the resource type") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome outcome = injector.inject(doc, InjectionSubcategory::Entry, 9);
    const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
    CHECK(truth.category == FindingCategory::ConfigurationEntryError);
    CHECK(resolve(doc, truth.path) == nullptr);
    CHECK(resolve(outcome.mutated, truth.path) != nullptr);

    const std::string& resource_type =
        list_resources(outcome.mutated)[truth.path.segments[1].key == "BucketEventConsumer" ? 0
                                                                                             : 1]
            .resource_type;
    const std::vector<std::string>& allowed = injector.data().entries.at(resource_type);
    const std::string& injected = truth.path.segments.back().key;
    CHECK(std::find(allowed.begin(), allowed.end(), injected) == allowed.end());
}

TEST_CASE("random subcategory choice is seeded and deterministic") {
    ConfigDocument doc = test::load_canonical_fixture();
    FaultInjector injector;
    InjectionOutcome first = injector.inject_random(doc, 7);
    InjectionOutcome second = injector.inject_random(doc, 7);
    CHECK(first.applied_rule.subcategory == second.applied_rule.subcategory);
    CHECK(first.mutated.source_text == second.mutated.source_text);
    CHECK(first.ground_truth.to_json() == second.ground_truth.to_json());
}

TEST_CASE("relationship spec operators form a closed set") {
    RelationshipSpec spec{"Name", "Value", "occurrence", "entry"};
    const std::set<std::string> ops = {">", ">=", "=", "!=", "<", "<=", "occurrence"};
    CHECK(ops.count(spec.op) == 1);
}

// The full matrix: six subcategories x ten fixtures x three seeds. Mutations
// must re-parse, be byte-reproducible per seed, and differ from the original
// only at the injected lines.
TEST_CASE("injection round-trip matrix over the fixture set") {
    FaultInjector injector;
    for (int index = 1; index <= 10; ++index) {
        ConfigDocument doc =
            parse_template(test::read_fixture(fixture_name(index)), fixture_name(index));
        std::string original = serialize(doc);
        for (InjectionSubcategory subcategory : kAllSubcategories) {
            CAPTURE(fixture_name(index));
            CAPTURE(subcategory_name(subcategory));
            REQUIRE_FALSE(injector.eligible_sites(doc, subcategory).empty());
            for (std::uint64_t seed : {1ULL, 42ULL, 20260810ULL}) {
                InjectionOutcome outcome = injector.inject(doc, subcategory, seed);

                // Mutated output re-parses and is reproducible.
                ConfigDocument reparsed =
                    parse_template(outcome.mutated.source_text, "mutated");
                CHECK(reparsed.root == outcome.mutated.root);
                InjectionOutcome again = injector.inject(doc, subcategory, seed);
                CHECK(again.mutated.source_text == outcome.mutated.source_text);

                // Minimality: at most one line replaced, added, or removed.
                LineDiff diff = diff_lines(original, outcome.mutated.source_text);
                CHECK(diff.removed.size() <= 1);
                CHECK(diff.added.size() <= 1);
                CHECK(diff.removed.size() + diff.added.size() >= 1);

                // The changed lines belong to the ground-truth parameter (or
                // its removed co-occurrence partner).
                const GroundTruthEntry& truth = outcome.ground_truth.misconfigured.front();
                std::string key_token = truth.path.segments.back().key;
                for (const std::string& line : diff.added) {
                    CHECK(line.find(key_token) != std::string::npos);
                }
                if (subcategory == InjectionSubcategory::EntryRelationship) {
                    REQUIRE(diff.removed.size() == 1);
                    CHECK(diff.added.empty());
                } else if (subcategory == InjectionSubcategory::Entry) {
                    CHECK(diff.removed.empty());
                    REQUIRE(diff.added.size() == 1);
                } else {
                    REQUIRE(diff.removed.size() == 1);
                    REQUIRE(diff.added.size() == 1);
                }

                // Parameters away from the injection site are untouched.
                std::set<std::string> before_params, after_params;
                for (const ParameterPath& p : enumerate_parameters(doc)) {
                    before_params.insert(p.render());
                }
                for (const ParameterPath& p : enumerate_parameters(outcome.mutated)) {
                    after_params.insert(p.render());
                }
                std::vector<std::string> symmetric;
                std::set_symmetric_difference(before_params.begin(), before_params.end(),
                                              after_params.begin(), after_params.end(),
                                              std::back_inserter(symmetric));
                CHECK(symmetric.size() <= 2);
            }
        }
    }
}

TEST_CASE("self-consistency: unknown-item channel flags injected faults") {
    FaultInjector injector;
    std::vector<Transaction> corpus;
    std::vector<ConfigDocument> docs;
    for (int index = 1; index <= 10; ++index) {
        docs.push_back(
            parse_template(test::read_fixture(fixture_name(index)), fixture_name(index)));
        corpus.push_back(make_transaction(docs.back()));
    }
    RuleBase base = mine_rulebase(corpus, 1.0, 0.95, "fixtures");

    for (InjectionSubcategory subcategory :
         {InjectionSubcategory::ResourceType, InjectionSubcategory::Entry,
          InjectionSubcategory::Enum}) {
        InjectionOutcome outcome = injector.inject(docs[0], subcategory, 99);
        DetectionReport report = detect_dd(outcome.mutated, base);
        const std::string expected = outcome.ground_truth.misconfigured.front().path.render();
        bool flagged = false;
        for (const Finding& finding : report.findings) {
            if (finding.aligned_path.has_value() &&
                finding.aligned_path->render() == expected) {
                flagged = true;
            }
        }
        CAPTURE(subcategory_name(subcategory));
        CHECK(flagged);
    }
}
