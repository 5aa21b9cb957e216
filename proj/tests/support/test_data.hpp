#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "blurbkit/tokenizer.hpp"
#include "blurbkit/vocab.hpp"

namespace fixture {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(BLURBKIT_TEST_DATA) / name;
}

inline std::shared_ptr<const blurbkit::Vocabulary> bert_vocab() {
  static const auto vocab = std::make_shared<const blurbkit::Vocabulary>(
      blurbkit::load_vocab(data_path("bert-base-uncased-vocab.txt")));
  return vocab;
}

inline blurbkit::Tokenizer bert_tokenizer(std::size_t max_seq_len = 512) {
  blurbkit::TokenizerConfig config;
  config.max_seq_len = max_seq_len;
  return blurbkit::Tokenizer(bert_vocab(), config);
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("blurbkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
