#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "dpcp/error.hpp"

namespace dpcp::testing {

/// Runs `statement` and checks that it throws dpcp::Error of the given kind.
#define EXPECT_DPCP_ERROR(statement, expected_kind)                                   \
  do {                                                                                \
    try {                                                                             \
      statement;                                                                      \
      ADD_FAILURE() << "expected " << ::dpcp::to_string(expected_kind) << ", nothing thrown"; \
    } catch (const ::dpcp::Error& e) {                                                \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                                 \
    }                                                                                 \
  } while (false)

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dpcp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace dpcp::testing
