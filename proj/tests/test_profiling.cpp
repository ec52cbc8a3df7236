#include "toolcal/profile.hpp"

#include "toolcal/parse.hpp"

#include <doctest.h>

using namespace toolcal;

namespace {

SchemaMap one_schema() {
    ToolSchema s;
    s.function_name = "f";
    s.params = {{"a", ValueKind::Integer, true, {Constraint::range(0.0, 10.0)}}};
    return schema_map({s});
}

Trajectory traj_for(const std::string & args_json) {
    return parse_trajectory("<think>r</think><tool_call>[{\"name\":\"f\",\"arguments\":" + args_json +
                            "}]</tool_call>");
}

}  // namespace

TEST_CASE("hardness follows the two-branch rule") {
    CHECK(hardness(true, 0.2) == 0.0);
    CHECK(hardness(true, 7.0) == 0.0);  // judge ignored on the pass branch
    CHECK(hardness(false, 0.7) == doctest::Approx(0.3));
    CHECK(hardness(false, 0.0) == 1.0);
    CHECK_THROWS_AS(hardness(false, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(hardness(false, -0.1), std::invalid_argument);
}

TEST_CASE("verify demands format, exactness, and schema cleanliness") {
    const auto schemas = one_schema();
    const std::vector<ToolCall> refs = {{"f", json{{"a", 3}}}};
    CHECK(verify(traj_for("{\"a\":3}"), refs, schemas));
    CHECK_FALSE(verify(traj_for("{\"a\":4}"), refs, schemas));
    CHECK_FALSE(verify(parse_trajectory("<think>r</think>"), refs, schemas));

    // exact value match but the value violates its own constraint
    const std::vector<ToolCall> bad_refs = {{"f", json{{"a", 30}}}};
    CHECK_FALSE(verify(traj_for("{\"a\":30}"), bad_refs, schemas));
}

TEST_CASE("stub_judge rubric arithmetic") {
    Trajectory valid;
    valid.format_valid = true;
    const JudgeVerdict v = stub_judge(valid, {1, 1, 0.5, 0.5, 0.5, 0});
    CHECK(v.coherence == 1.0);
    CHECK(v.parameterization == doctest::Approx(0.75));
    CHECK(v.schema_adherence == doctest::Approx(0.5));
    CHECK(v.aggregate == doctest::Approx(0.75));

    Trajectory invalid;
    invalid.format_valid = false;
    CHECK(stub_judge(invalid, {0, 0, 0, 0, 0, 0}).aggregate == 0.0);

    const JudgeVerdict w = stub_judge(valid, {1, 1, 1, 1, 1, 0});
    CHECK(w.aggregate == 1.0);
}

TEST_CASE("band_of uses thirds by default and stays monotone") {
    CHECK(band_of(0.0) == 0);
    CHECK(band_of(0.5) == 1);
    CHECK(band_of(1.0) == 2);
    CHECK(band_of(1.0 / 3.0) == 1);
    CHECK(band_of(2.0 / 3.0) == 2);
    CHECK_THROWS_AS(band_of(1.5), std::invalid_argument);
    int prev = 0;
    for (double h = 0.0; h <= 1.0; h += 0.01) {
        const int b = band_of(h);
        CHECK(b >= prev);
        prev = b;
    }
    CHECK(band_of(0.5, {0.9}) == 0);  // custom thresholds
}

TEST_CASE("partition splits at the threshold and preserves order") {
    auto mk = [](const std::string & id, double h) {
        ExecutionCase c;
        c.id = id;
        c.profile = CaseProfile{h, band_of(h), {}};
        return c;
    };
    const std::vector<ExecutionCase> cases = {mk("a", 0.0), mk("b", 0.3), mk("c", 0.9)};
    const auto [easy, hard] = partition(cases, 0.5);
    REQUIRE(easy.size() == 2);
    REQUIRE(hard.size() == 1);
    CHECK(easy[0].id == "a");
    CHECK(easy[1].id == "b");
    CHECK(hard[0].id == "c");

    const auto [all_easy, none] = partition({mk("a", 0.0), mk("b", 0.0)}, 0.5);
    CHECK(all_easy.size() == 2);
    CHECK(none.empty());

    const auto [zeros, rest] = partition(cases, 0.0);
    CHECK(zeros.size() == 1);  // only H = 0 goes easy at threshold 0
    CHECK(rest.size() == 2);

    ExecutionCase unprofiled;
    unprofiled.id = "u";
    CHECK_THROWS_AS(partition({unprofiled}, 0.5), std::invalid_argument);
}

TEST_CASE("profile_case: verifier pass pins hardness to zero") {
    ExecutionCase c;
    c.id = "x";
    ToolSchema s;
    s.function_name = "f";
    s.params = {{"a", ValueKind::Integer, true, {Constraint::range(0.0, 10.0)}}};
    c.schemas = {s};
    c.reference_calls = {{"f", json{{"a", 3}}}};
    c.trajectory = traj_for("{\"a\":3}");
    StubJudge judge;
    const CaseProfile pass = profile_case(c, judge);
    CHECK(pass.hardness == 0.0);
    CHECK(pass.band == 0);
    CHECK_FALSE(pass.failure.any());

    c.trajectory = traj_for("{\"a\":4}");
    const CaseProfile fail = profile_case(c, judge);
    // judge: coherence 1, parameterization (1 + 0)/2, schema (1 + 1)/2 -> 5/6
    CHECK(fail.hardness == doctest::Approx(1.0 - 5.0 / 6.0));
    CHECK(fail.failure.value_error);
    CHECK_FALSE(fail.failure.name_error);
}
