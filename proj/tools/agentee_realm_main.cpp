// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

#include "agentee/worker.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: agentee-realm <launch-file>\n");
    return 2;
  }
  return agentee::run_realm(argv[1]);
}
