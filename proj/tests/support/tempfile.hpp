#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

namespace igmd::testing {

/// Scratch file under the system temp directory, removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& stem = "igmd") {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    path_ = (dir / (stem + "-test-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++)))
                .string();
    std::ofstream out(path_, std::ios::binary);
    out << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace igmd::testing
