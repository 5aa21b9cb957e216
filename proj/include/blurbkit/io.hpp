#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

namespace blurbkit::io {

// Calls `fn(line, line_number)` for each line (1-based), stripping "\n" and
// a trailing "\r". Throws IoError if the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place.
class AtomicWriter {
 public:
  explicit AtomicWriter(std::filesystem::path target);
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;
  ~AtomicWriter();

  std::ofstream& stream() { return out_; }
  // Flushes and renames; without commit() the temporary is removed.
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace blurbkit::io
