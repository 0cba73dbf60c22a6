// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentee/bytes.hpp"

namespace agentee {

// The adversary's eye: a host-privileged process that maps every shared
// region of a run read-only and greps the raw bytes for probe strings.
// Under plain rings private prompts and credentials show up here; under
// sealed rings nothing does.

struct ProbeHit {
  std::string probe;
  std::string region;
  size_t offset = 0;
};

struct ObserverReport {
  size_t regions_scanned = 0;
  std::map<std::string, size_t> counts;  // probe -> total hits
  std::vector<ProbeHit> hits;
};

// Shared-memory object names of the run, e.g. "agentee.<run>.1.2".
std::vector<std::string> discover_regions(const std::string& run_id);

// Scans all regions of the run for every probe. Throws
// Errc::region_unmappable when the run has no mappable regions.
ObserverReport scan_regions(const std::string& run_id,
                            const std::vector<std::string>& probes);

// One probe per line; blank lines and '#' comments skipped.
std::vector<std::string> load_probes(const std::string& path);

}  // namespace agentee
