// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/tools.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

RateTable parse_rates(const std::string& text) {
  RateTable rates;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string from, to, rate_str;
    if (!std::getline(row, from, '\t') || !std::getline(row, to, '\t') ||
        !std::getline(row, rate_str))
      raise(Errc::config, "rates line " + std::to_string(lineno) +
                              ": expected FROM/TO/RATE");
    char* end = nullptr;
    double rate = std::strtod(rate_str.c_str(), &end);
    if (end == rate_str.c_str() || rate <= 0)
      raise(Errc::config, "rates line " + std::to_string(lineno) +
                              ": bad rate " + rate_str);
    rates[{from, to}] = rate;
  }
  return rates;
}

RateTable load_rates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open rates: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rates(buf.str());
}

void ToolRegistry::set_credential(std::string credential) {
  credential_ = std::move(credential);
}

void ToolRegistry::set_rates(RateTable rates) { rates_ = std::move(rates); }

std::vector<std::string> ToolRegistry::builtin_names() {
  return {"echo-args", "currency-mock", "weather-mock"};
}

std::string ToolRegistry::call(const ToolCall& call) {
  std::string out;
  if (call.name == "echo-args")
    out = run_echo_args(call);
  else if (call.name == "currency-mock")
    out = run_currency(call);
  else if (call.name == "weather-mock")
    out = run_weather(call);
  else
    raise(Errc::unknown_tool, "no such tool: " + call.name);
  ++calls_served_;
  return out;
}

void ToolRegistry::require_credential(const std::string& tool) {
  if (credential_.empty())
    raise(Errc::tool_denied, tool + " requires a provisioned credential");
}

std::string ToolRegistry::run_echo_args(const ToolCall& call) {
  auto args = call.args;
  std::sort(args.begin(), args.end());
  std::string out;
  for (const auto& [k, v] : args) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

namespace {

const std::string& arg_of(const ToolCall& call, const std::string& key) {
  for (const auto& [k, v] : call.args) {
    if (k == key) return v;
  }
  raise(Errc::bad_arguments, call.name + " needs argument '" + key + "'");
}

}  // namespace

std::string ToolRegistry::run_currency(const ToolCall& call) {
  require_credential(call.name);
  const std::string& amount_str = arg_of(call, "amount");
  const std::string& from = arg_of(call, "from");
  const std::string& to = arg_of(call, "to");
  char* end = nullptr;
  double amount = std::strtod(amount_str.c_str(), &end);
  if (end == amount_str.c_str() || *end != '\0' || amount < 0)
    raise(Errc::bad_arguments, "bad amount: " + amount_str);
  auto it = rates_.find({from, to});
  if (it == rates_.end())
    raise(Errc::bad_arguments, "no rate for " + from + "->" + to);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.2f %s = %.2f %s", amount, from.c_str(),
                amount * it->second, to.c_str());
  return buf;
}

std::string ToolRegistry::run_weather(const ToolCall& call) {
  require_credential(call.name);
  const std::string& city = arg_of(call, "city");
  if (city.empty()) raise(Errc::bad_arguments, "city must not be empty");
  return "Weather in " + city + ": 21C, clear skies";
}

}  // namespace agentee
