#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clearsheet::detail {

class ZipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Read-only view of a ZIP container held in memory. Supports stored and
// deflated members; ZIP64 archives are rejected.
class ZipArchive {
 public:
  explicit ZipArchive(std::string bytes);

  bool contains(const std::string& member) const { return entries_.contains(member); }
  std::vector<std::string> members() const;
  // Throws ZipError naming the member on corrupt data.
  std::string read(const std::string& member) const;

 private:
  struct Entry {
    std::uint16_t method = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
  };

  std::string bytes_;
  std::map<std::string, Entry> entries_;
};

}  // namespace clearsheet::detail
