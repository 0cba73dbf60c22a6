// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/errors.hpp"
#include "agentee/toolcall.hpp"
#include "agentee/tools.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agentee;
using testutil::thrown_code;

TEST_CASE("tool directives parse names and arguments") {
  ToolCall call = parse_tool_directive(
      "TOOL:currency-mock:{amount: 100 , from:USD, to : EUR}");
  CHECK(call.name == "currency-mock");
  REQUIRE(call.args.size() == 3);
  CHECK(call.args[0] == std::pair<std::string, std::string>{"amount", "100"});
  CHECK(call.args[1] == std::pair<std::string, std::string>{"from", "USD"});
  CHECK(call.args[2] == std::pair<std::string, std::string>{"to", "EUR"});

  ToolCall empty = parse_tool_directive("TOOL:echo-args:{}");
  CHECK(empty.name == "echo-args");
  CHECK(empty.args.empty());

  ToolCall spaced = parse_tool_directive("TOOL:echo-args:{  }");
  CHECK(spaced.args.empty());

  // Values keep inner spaces, keys allow digits and underscores.
  ToolCall v = parse_tool_directive("TOOL:t1:{max_n: two words here}");
  CHECK(v.name == "t1");
  CHECK(v.args[0].second == "two words here");

  // Empty value is legal.
  ToolCall ev = parse_tool_directive("TOOL:t:{k:}");
  CHECK(ev.args[0] == std::pair<std::string, std::string>{"k", ""});
}

TEST_CASE("malformed tool directives are rejected") {
  const char* bad[] = {
      "TOOLX:echo:{}",            // wrong prefix
      "TOOL::{}",                 // missing name
      "TOOL:UPPER:{}",            // uppercase name
      "TOOL:echo-args{}",         // missing ':' after name
      "TOOL:echo-args:",          // missing braces
      "TOOL:echo-args:{",         // unterminated
      "TOOL:echo-args:{a b}",     // argument without ':'
      "TOOL:echo-args:{:1}",      // empty key
      "TOOL:echo-args:{A:1}",     // uppercase key
      "TOOL:echo-args:{k-ey:1}",  // '-' not allowed in keys
  };
  for (const char* line : bad) {
    CAPTURE(line);
    CHECK(thrown_code([&] { parse_tool_directive(line); }) ==
          Errc::bad_arguments);
  }
}

TEST_CASE("directive scanning finds the first TOOL: line") {
  CHECK(!find_tool_directive("no directive in this output").has_value());
  CHECK(!find_tool_directive("").has_value());

  auto found = find_tool_directive(
      "let me think\nTOOL:weather-mock:{city:Paris}\ntrailing text");
  REQUIRE(found.has_value());
  CHECK(found->name == "weather-mock");
  CHECK(found->args[0].second == "Paris");

  // Carriage returns are stripped before parsing.
  auto crlf = find_tool_directive("TOOL:echo-args:{}\r\nmore");
  REQUIRE(crlf.has_value());
  CHECK(crlf->name == "echo-args");

  // A directive line must start the line; indented mentions are prose.
  CHECK(!find_tool_directive(" TOOL:echo-args:{}").has_value());

  // Malformed directives on a directive line are errors, not prose.
  CHECK(thrown_code([] { find_tool_directive("TOOL:bad"); }) ==
        Errc::bad_arguments);
}

TEST_CASE("tool request encoding round-trips") {
  ToolCall call;
  call.name = "currency-mock";
  call.args = {{"amount", "12.5"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(decode_tool_request(encode_tool_request(call)) == call);

  ToolCall no_args;
  no_args.name = "echo-args";
  CHECK(decode_tool_request(encode_tool_request(no_args)) == no_args);

  // Odd key/value count and alien tags are protocol errors.
  CHECK(thrown_code([] {
          decode_tool_request(encode_fields(
              {to_bytes("CALL"), to_bytes("t"), to_bytes("dangling-key")}));
        }) == Errc::protocol);
  CHECK(thrown_code([] {
          decode_tool_request(encode_fields({to_bytes("NOPE")}));
        }) == Errc::protocol);
}

TEST_CASE("rate tables parse strict tab-separated triples") {
  RateTable rates = parse_rates(
      "# comment\n"
      "USD\tEUR\t0.92\n"
      "\n"
      "EUR\tJPY\t160.00\n");
  REQUIRE(rates.size() == 2);
  CHECK(rates.at({"USD", "EUR"}) == doctest::Approx(0.92));
  CHECK(rates.at({"EUR", "JPY"}) == doctest::Approx(160.0));

  CHECK(thrown_code([] { parse_rates("USD EUR 0.9\n"); }) == Errc::config);
  CHECK(thrown_code([] { parse_rates("USD\tEUR\tzero\n"); }) == Errc::config);
  CHECK(thrown_code([] { parse_rates("USD\tEUR\t0\n"); }) == Errc::config);

  RateTable fixture = load_rates(testutil::fixture_path("rates.tsv"));
  CHECK(fixture.size() == 4);
  CHECK(fixture.at({"USD", "EUR"}) == doctest::Approx(0.92));
  CHECK(thrown_code([] { load_rates("/nonexistent.tsv"); }) == Errc::io);
}

TEST_CASE("echo-args needs no credential and sorts its arguments") {
  ToolRegistry registry;
  ToolCall call;
  call.name = "echo-args";
  call.args = {{"b", "2"}, {"a", "1"}, {"c", "3"}};
  CHECK(registry.call(call) == "a=1;b=2;c=3");
  CHECK(registry.calls_served() == 1);

  call.args.clear();
  CHECK(registry.call(call) == "");
  CHECK(registry.calls_served() == 2);
}

TEST_CASE("credentialed tools are deny-by-default") {
  ToolRegistry registry;
  ToolCall currency;
  currency.name = "currency-mock";
  currency.args = {{"amount", "100"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(thrown_code([&] { registry.call(currency); }) == Errc::tool_denied);

  ToolCall weather;
  weather.name = "weather-mock";
  weather.args = {{"city", "Paris"}};
  CHECK(thrown_code([&] { registry.call(weather); }) == Errc::tool_denied);

  CHECK(registry.calls_served() == 0);  // failures do not count
}

TEST_CASE("currency-mock converts via the provisioned table") {
  ToolRegistry registry;
  registry.set_credential("secret-cred");
  registry.set_rates({{{"USD", "EUR"}, 0.92}});

  ToolCall call;
  call.name = "currency-mock";
  call.args = {{"amount", "100"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(registry.call(call) == "100.00 USD = 92.00 EUR");

  call.args = {{"amount", "12.5"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(registry.call(call) == "12.50 USD = 11.50 EUR");

  call.args = {{"amount", "100"}, {"from", "USD"}, {"to", "GBP"}};
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);

  call.args = {{"amount", "abc"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);

  call.args = {{"amount", "-5"}, {"from", "USD"}, {"to", "EUR"}};
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);

  call.args = {{"from", "USD"}, {"to", "EUR"}};
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);

  CHECK(registry.calls_served() == 2);
}

TEST_CASE("weather-mock answers for a city") {
  ToolRegistry registry;
  registry.set_credential("secret-cred");
  ToolCall call;
  call.name = "weather-mock";
  call.args = {{"city", "Paris"}};
  CHECK(registry.call(call) == "Weather in Paris: 21C, clear skies");

  call.args = {{"city", ""}};
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);
  call.args.clear();
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::bad_arguments);
}

TEST_CASE("unknown tools are rejected by name") {
  ToolRegistry registry;
  registry.set_credential("c");
  ToolCall call;
  call.name = "rm-rf";
  CHECK(thrown_code([&] { registry.call(call); }) == Errc::unknown_tool);
  CHECK(registry.calls_served() == 0);

  auto names = ToolRegistry::builtin_names();
  CHECK(names ==
        std::vector<std::string>{"echo-args", "currency-mock",
                                 "weather-mock"});
}
