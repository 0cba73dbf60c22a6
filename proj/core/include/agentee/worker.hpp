// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace agentee {

// Entry point of the realm worker process. Reads the launch file written
// by the host, maps its shared regions, acquires its secrets (attested
// provisioning or in-band push depending on mode), announces READY on the
// control stream (fd 3) and serves until SHUT or peer loss.
// Returns the process exit code.
int run_realm(const std::string& launch_path);

}  // namespace agentee
