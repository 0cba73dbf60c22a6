// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "agentee/bytes.hpp"

namespace agentee {

// POSIX shared-memory object mapped read-write into this process.
// The host creates one region per communicating realm pair; both realms
// of the pair open it by name. Names follow
//   agentee.<run-id>.<realm-a>.<realm-b>
// with realm ids in ascending order.
class ShmRegion {
 public:
  // Creates a fresh region (fails if the name exists) and zeroes it.
  // Throws Errc::region_allocation_failure.
  static ShmRegion create(const std::string& name, size_t size);
  // Maps an existing region. Throws Errc::region_unmappable when the name
  // does not resolve, Errc::io on map failure.
  static ShmRegion open_existing(const std::string& name);
  // Removes the name; established mappings stay valid.
  static void unlink(const std::string& name);

  ShmRegion() = default;
  ShmRegion(ShmRegion&& other) noexcept;
  ShmRegion& operator=(ShmRegion&& other) noexcept;
  ShmRegion(const ShmRegion&) = delete;
  ShmRegion& operator=(const ShmRegion&) = delete;
  ~ShmRegion();

  uint8_t* data() { return base_; }
  const uint8_t* data() const { return base_; }
  size_t size() const { return size_; }
  const std::string& name() const { return name_; }
  bool valid() const { return base_ != nullptr; }

 private:
  ShmRegion(std::string name, uint8_t* base, size_t size)
      : name_(std::move(name)), base_(base), size_(size) {}

  std::string name_;
  uint8_t* base_ = nullptr;
  size_t size_ = 0;
};

// Canonical region name for a realm pair within a run.
std::string region_name(const std::string& run_id, uint32_t realm_a,
                        uint32_t realm_b);

}  // namespace agentee
