#include "blurbkit/io.hpp"

#include <atomic>
#include <sstream>

#include <unistd.h>

#include "blurbkit/error.hpp"

namespace blurbkit::io {

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    fn(view, number);
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::filesystem::path temp_path_for(const std::filesystem::path& target) {
  static std::atomic<unsigned> counter{0};
  auto name = target.filename().string();
  name += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  return target.parent_path() / name;
}

}  // namespace

AtomicWriter::AtomicWriter(std::filesystem::path target)
    : target_(std::move(target)), temp_(temp_path_for(target_)) {
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open '" + temp_.string() + "' for writing");
}

AtomicWriter::~AtomicWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicWriter::commit() {
  out_.flush();
  if (!out_) throw IoError("write error on '" + temp_.string() + "'");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, target_, ec);
  if (ec) {
    std::filesystem::remove(temp_, ec);
    throw IoError("cannot move output into place at '" + target_.string() + "'");
  }
  committed_ = true;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  AtomicWriter writer(path);
  writer.stream().write(contents.data(), static_cast<std::streamsize>(contents.size()));
  writer.commit();
}

}  // namespace blurbkit::io
