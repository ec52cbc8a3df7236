#include "toolcal/parse.hpp"
#include "toolcal/validate.hpp"
#include "toolcal/values.hpp"

#include <doctest.h>

#include <random>

using namespace toolcal;

TEST_CASE("parse_trajectory accepts the canonical form") {
    const auto t = parse_trajectory("<think>ok</think><tool_call>[{\"name\":\"f\",\"arguments\":{}}]</tool_call>");
    CHECK(t.format_valid);
    CHECK(t.reasoning == "ok");
    REQUIRE(t.calls.size() == 1);
    CHECK(t.calls[0].function_name == "f");
    CHECK(t.calls[0].arguments.empty());
}

TEST_CASE("parse_trajectory flags missing call block") {
    const auto t = parse_trajectory("<think>ok</think>");
    CHECK_FALSE(t.format_valid);
    CHECK(t.calls.empty());
}

TEST_CASE("parse_trajectory flags duplicate reasoning blocks") {
    const auto t = parse_trajectory("<think>a</think><think>b</think><tool_call>[]</tool_call>");
    CHECK_FALSE(t.format_valid);
}

TEST_CASE("parse_trajectory tolerates surrounding whitespace only") {
    CHECK(parse_trajectory("  <think>x</think>\n<tool_call>[]</tool_call>\n").format_valid);
    CHECK_FALSE(parse_trajectory("hm <think>x</think><tool_call>[]</tool_call>").format_valid);
    CHECK_FALSE(parse_trajectory("<think>x</think><tool_call>[]</tool_call> trailing").format_valid);
    CHECK_FALSE(parse_trajectory("<tool_call>[]</tool_call><think>x</think>").format_valid);
}

TEST_CASE("parse_trajectory never throws on arbitrary text") {
    std::mt19937_64 rng(7);
    const std::string pieces[] = {"<think>", "</think>", "<tool_call>", "</tool_call>",
                                  "[", "]", "{", "}", "\"name\"", ":", "x y", " ", "\n", "\\"};
    for (int i = 0; i < 3000; i++) {
        std::string s;
        const int n = static_cast<int>(rng() % 12);
        for (int k = 0; k < n; k++) {
            s += pieces[rng() % (sizeof(pieces) / sizeof(pieces[0]))];
        }
        const auto t = parse_trajectory(s);
        CHECK(t.length_tokens == count_tokens(s));
        if (!t.format_valid) {
            CHECK(t.calls.empty());
        }
    }
}

TEST_CASE("parse_tool_calls keeps duplicate calls distinct") {
    const auto calls =
        parse_tool_calls("[{\"name\":\"g\",\"arguments\":{\"x\":1}},{\"name\":\"g\",\"arguments\":{\"x\":1}}]");
    REQUIRE(calls.size() == 2);
    CHECK(calls[0].function_name == "g");
    CHECK(calls[1].function_name == "g");
    CHECK(calls[0].arguments == calls[1].arguments);
}

TEST_CASE("parse_tool_calls on empty and truncated payloads") {
    auto ok = parse_call_block("[]");
    CHECK(ok.ok);
    CHECK(ok.calls.empty());
    auto bad = parse_call_block("[{\"name\":\"g\"");
    CHECK_FALSE(bad.ok);
    CHECK(bad.calls.empty());
}

TEST_CASE("call list round-trips through the canonical text form") {
    std::mt19937_64 rng(11);
    auto random_value = [&](auto && self, int depth) -> json {
        switch (rng() % (depth > 1 ? 4 : 6)) {
            case 0: return json(static_cast<std::int64_t>(rng() % 100));
            case 1: return json(double(rng() % 400) / 4.0);
            case 2: return json(rng() % 2 == 0);
            case 3: return json("  v" + std::to_string(rng() % 9) + " ");
            case 4: {
                json arr = json::array();
                for (int i = 0; i < int(rng() % 3); i++) arr.push_back(self(self, depth + 1));
                return arr;
            }
            default: {
                json obj = json::object();
                for (int i = 0; i < int(rng() % 3); i++) {
                    obj["k" + std::to_string(rng() % 5)] = self(self, depth + 1);
                }
                return obj;
            }
        }
    };
    for (int trial = 0; trial < 300; trial++) {
        std::vector<ToolCall> calls;
        for (int c = 0; c < int(rng() % 4); c++) {
            ToolCall call;
            call.function_name = "fn" + std::to_string(rng() % 3);
            for (int a = 0; a < int(rng() % 4); a++) {
                call.arguments["a" + std::to_string(rng() % 6)] = random_value(random_value, 0);
            }
            calls.push_back(std::move(call));
        }
        const auto parsed = parse_call_block(serialize_calls(calls));
        REQUIRE(parsed.ok);
        REQUIRE(parsed.calls.size() == calls.size());
        for (size_t i = 0; i < calls.size(); i++) {
            CHECK(canonical_call(parsed.calls[i]) == canonical_call(calls[i]));
        }
    }
}

TEST_CASE("count_tokens splits on whitespace runs") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("   ") == 0);
    CHECK(count_tokens("one") == 1);
    CHECK(count_tokens(" a  b\tc\nd ") == 4);
}

TEST_CASE("canonicalize trims strings and keeps case") {
    const ParamSpec spec{"s", ValueKind::String, true, {}};
    CHECK(canonicalize_value(json("  Paris "), spec) == json("Paris"));
}

TEST_CASE("canonical numbers compare across representations") {
    CHECK(values_equal(json(5), json::parse("5.00")));
    CHECK(values_equal(json(5.0), json(5)));
    CHECK_FALSE(values_equal(json(5.5), json(5)));
    CHECK_FALSE(values_equal(json("5"), json(5)));  // no cross-kind coercion
}

TEST_CASE("canonical objects sort keys") {
    const json v = json::parse(R"({"b":1,"a":2})");
    CHECK(canonical_value(v).dump() == "{\"a\":2,\"b\":1}");
}

TEST_CASE("canonicalization is idempotent") {
    std::mt19937_64 rng(3);
    auto random_value = [&](auto && self, int depth) -> json {
        switch (rng() % (depth > 1 ? 4 : 6)) {
            case 0: return json(static_cast<std::int64_t>(rng() % 50));
            case 1: return json(double(rng() % 100) / 8.0);
            case 2: return json(rng() % 2 == 0);
            case 3: return json(" x " + std::to_string(rng() % 5) + "\t");
            case 4: {
                json arr = json::array();
                for (int i = 0; i < int(rng() % 4); i++) arr.push_back(self(self, depth + 1));
                return arr;
            }
            default: {
                json obj = json::object();
                for (int i = 0; i < int(rng() % 4); i++) {
                    obj["z" + std::to_string(rng() % 7)] = self(self, depth + 1);
                }
                return obj;
            }
        }
    };
    for (int i = 0; i < 500; i++) {
        const json v = random_value(random_value, 0);
        const json once = canonical_value(v);
        CHECK(canonical_value(once) == once);
    }
}

TEST_CASE("validate_call classifies each key and missing requireds") {
    ToolSchema schema;
    schema.function_name = "g";
    schema.params = {{"x", ValueKind::Integer, true, {}}};

    ToolCall ok{"g", json{{"x", 1}}};
    auto report = validate_call(ok, schema);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].finding == Finding::Ok);
    CHECK(report.all_ok());

    ToolCall mismatch{"g", json{{"x", "1"}}};
    report = validate_call(mismatch, schema);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].finding == Finding::TypeMismatch);

    ToolCall missing{"g", json::object()};
    report = validate_call(missing, schema);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].finding == Finding::MissingRequired);

    ToolCall wrong_name{"h", json::object()};
    CHECK_THROWS_AS(validate_call(wrong_name, schema), std::invalid_argument);
}

TEST_CASE("validate_call emits exactly |arguments| + |missing required| findings") {
    ToolSchema schema;
    schema.function_name = "g";
    schema.params = {{"a", ValueKind::Integer, true, {}},
                     {"b", ValueKind::String, true, {}},
                     {"c", ValueKind::Number, false, {}}};
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; i++) {
        ToolCall call;
        call.function_name = "g";
        const char * keys[] = {"a", "b", "c", "d", "e"};
        for (int k = 0; k < 5; k++) {
            if (rng() % 2) call.arguments[keys[k]] = static_cast<std::int64_t>(rng() % 5);
        }
        int missing = 0;
        if (!call.arguments.contains("a")) missing++;
        if (!call.arguments.contains("b")) missing++;
        const auto report = validate_call(call, schema);
        CHECK(report.findings.size() == call.arguments.size() + static_cast<size_t>(missing));
    }
}

TEST_CASE("constraints: enum, range, pattern") {
    const ParamSpec unit{"unit", ValueKind::String, true,
                         {Constraint::enum_set({json("celsius"), json("fahrenheit")})}};
    CHECK(satisfies_all(json("celsius"), unit));
    CHECK_FALSE(satisfies_all(json(7), unit));

    const ParamSpec ranged{"n", ValueKind::Number, true, {Constraint::range(0.0, 10.0)}};
    CHECK(satisfies_all(json(10.0), ranged));
    CHECK_FALSE(satisfies_all(json(10.5), ranged));
    CHECK_FALSE(satisfies_all(json("3"), ranged));

    const ParamSpec coded{"code", ValueKind::String, true, {Constraint::regex("[A-Z]{3}-\\d+")}};
    CHECK(satisfies_all(json("ABC-42"), coded));
    CHECK_FALSE(satisfies_all(json("abc-42"), coded));
}

TEST_CASE("schema invariants are enforced") {
    ToolSchema dup;
    dup.function_name = "f";
    dup.params = {{"x", ValueKind::Integer, true, {}}, {"x", ValueKind::String, false, {}}};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
    CHECK_THROWS_AS(Constraint::range(3.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Constraint::enum_set({}), std::invalid_argument);
}
