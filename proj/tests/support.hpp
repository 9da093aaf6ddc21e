#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "vtpalm/error.hpp"

namespace testing {

// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vtpalm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
vtpalm::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const vtpalm::Error& e) {
    return e.kind();
  }
  FAIL("expected vtpalm::Error");
  return vtpalm::ErrorKind::InvalidArgument;
}

}  // namespace testing

#define CHECK_ERROR_KIND(expr, kind) CHECK(testing::error_kind_of([&] { (void)(expr); }) == (kind))
