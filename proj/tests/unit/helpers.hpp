#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>

namespace besense::test {

// Scratch directory unique to one test case.
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("BESENSE_TMP");
  auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) /
             name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace besense::test
