// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/region.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

std::string shm_path(const std::string& name) {
  return name.empty() || name[0] == '/' ? name : "/" + name;
}

}  // namespace

ShmRegion ShmRegion::create(const std::string& name, size_t size) {
  std::string path = shm_path(name);
  int fd = shm_open(path.c_str(), O_CREAT | O_EXCL | O_RDWR, 0600);
  if (fd < 0)
    raise(Errc::region_allocation_failure,
          "shm_open " + name + ": " + std::strerror(errno));
  if (ftruncate(fd, static_cast<off_t>(size)) != 0) {
    int err = errno;
    close(fd);
    shm_unlink(path.c_str());
    raise(Errc::region_allocation_failure,
          "ftruncate " + name + ": " + std::strerror(err));
  }
  void* base =
      mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  close(fd);
  if (base == MAP_FAILED) {
    shm_unlink(path.c_str());
    raise(Errc::region_allocation_failure,
          "mmap " + name + ": " + std::strerror(errno));
  }
  std::memset(base, 0, size);
  return ShmRegion(name, static_cast<uint8_t*>(base), size);
}

ShmRegion ShmRegion::open_existing(const std::string& name) {
  std::string path = shm_path(name);
  int fd = shm_open(path.c_str(), O_RDWR, 0600);
  if (fd < 0)
    raise(Errc::region_unmappable,
          "shm_open " + name + ": " + std::strerror(errno));
  struct stat st {};
  if (fstat(fd, &st) != 0) {
    int err = errno;
    close(fd);
    raise(Errc::io, "fstat " + name + ": " + std::strerror(err));
  }
  size_t size = static_cast<size_t>(st.st_size);
  void* base =
      mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  close(fd);
  if (base == MAP_FAILED)
    raise(Errc::io, "mmap " + name + ": " + std::strerror(errno));
  return ShmRegion(name, static_cast<uint8_t*>(base), size);
}

void ShmRegion::unlink(const std::string& name) {
  shm_unlink(shm_path(name).c_str());
}

ShmRegion::ShmRegion(ShmRegion&& other) noexcept
    : name_(std::move(other.name_)), base_(other.base_), size_(other.size_) {
  other.base_ = nullptr;
  other.size_ = 0;
}

ShmRegion& ShmRegion::operator=(ShmRegion&& other) noexcept {
  if (this != &other) {
    if (base_ != nullptr) munmap(base_, size_);
    name_ = std::move(other.name_);
    base_ = other.base_;
    size_ = other.size_;
    other.base_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

ShmRegion::~ShmRegion() {
  if (base_ != nullptr) munmap(base_, size_);
}

std::string region_name(const std::string& run_id, uint32_t realm_a,
                        uint32_t realm_b) {
  if (realm_a > realm_b) std::swap(realm_a, realm_b);
  std::ostringstream out;
  out << "agentee." << run_id << "." << realm_a << "." << realm_b;
  return out.str();
}

}  // namespace agentee
