// Minimal CSV table reader and atomic file writing.
//
// The on-disk formats used here are plain comma-separated tables without
// quoting; identifiers never contain commas.  Writers go through a
// temp-file-plus-rename so a crashed run never leaves a half-written
// artifact behind.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace excerptlab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index for `name`; throws DataError when absent.
  std::size_t col(const std::string& name) const;
  bool has_col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Writes `content` to `path` atomically (temp file in the same directory,
// then rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::vector<unsigned char> read_file_bytes(const std::string& path);
void write_file_bytes_atomic(const std::string& path,
                             const std::vector<unsigned char>& bytes);

}  // namespace excerptlab
