// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/observer.hpp"

#include <dirent.h>

#include <algorithm>
#include <fstream>

#include "agentee/errors.hpp"
#include "agentee/region.hpp"

namespace agentee {

std::vector<std::string> discover_regions(const std::string& run_id) {
  std::vector<std::string> names;
  std::string prefix = "agentee." + run_id + ".";
  DIR* dir = opendir("/dev/shm");
  if (dir == nullptr) return names;
  while (dirent* entry = readdir(dir)) {
    std::string name = entry->d_name;
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  }
  closedir(dir);
  std::sort(names.begin(), names.end());
  return names;
}

ObserverReport scan_regions(const std::string& run_id,
                            const std::vector<std::string>& probes) {
  std::vector<std::string> names = discover_regions(run_id);
  if (names.empty())
    raise(Errc::region_unmappable,
          "no shared regions found for run " + run_id);

  ObserverReport report;
  for (const std::string& probe : probes) report.counts[probe] = 0;

  for (const std::string& name : names) {
    ShmRegion region = ShmRegion::open_existing(name);
    const uint8_t* begin = region.data();
    const uint8_t* end = begin + region.size();
    ++report.regions_scanned;
    for (const std::string& probe : probes) {
      if (probe.empty()) continue;
      const uint8_t* needle =
          reinterpret_cast<const uint8_t*>(probe.data());
      const uint8_t* at = begin;
      for (;;) {
        at = std::search(at, end, needle, needle + probe.size());
        if (at == end) break;
        report.counts[probe]++;
        report.hits.push_back(
            {probe, name, static_cast<size_t>(at - begin)});
        ++at;
      }
    }
  }
  return report;
}

std::vector<std::string> load_probes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open probes: " + path);
  std::vector<std::string> probes;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    probes.push_back(line);
  }
  if (probes.empty()) raise(Errc::empty_list, "probes file is empty");
  return probes;
}

}  // namespace agentee
