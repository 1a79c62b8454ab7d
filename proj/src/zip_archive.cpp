#include "zip_archive.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>

namespace clearsheet::detail {

namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

std::uint16_t u16(const std::string& b, std::size_t at) {
  if (at + 2 > b.size()) throw ZipError("truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint32_t u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(u16(b, at)) | (static_cast<std::uint32_t>(u16(b, at + 2)) << 16);
}

}  // namespace

ZipArchive::ZipArchive(std::string bytes) : bytes_(std::move(bytes)) {
  if (bytes_.size() < 22) throw ZipError("not a zip archive");
  // The end-of-central-directory record sits within the last 64 KiB + 22 bytes.
  std::size_t min_pos = bytes_.size() > 65557 ? bytes_.size() - 65557 : 0;
  std::optional<std::size_t> eocd;
  for (std::size_t pos = bytes_.size() - 22 + 1; pos-- > min_pos;) {
    if (u32(bytes_, pos) == kEndOfCentralDir) {
      eocd = pos;
      break;
    }
  }
  if (!eocd) throw ZipError("not a zip archive");
  std::uint16_t count = u16(bytes_, *eocd + 10);
  std::uint32_t cd_offset = u32(bytes_, *eocd + 16);
  if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) throw ZipError("zip64 archives are not supported");

  std::size_t pos = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (u32(bytes_, pos) != kCentralHeader) throw ZipError("corrupt central directory");
    Entry e;
    e.method = u16(bytes_, pos + 10);
    e.compressed_size = u32(bytes_, pos + 20);
    e.uncompressed_size = u32(bytes_, pos + 24);
    std::uint16_t name_len = u16(bytes_, pos + 28);
    std::uint16_t extra_len = u16(bytes_, pos + 30);
    std::uint16_t comment_len = u16(bytes_, pos + 32);
    e.local_header_offset = u32(bytes_, pos + 42);
    if (pos + 46 + name_len > bytes_.size()) throw ZipError("corrupt central directory");
    std::string name = bytes_.substr(pos + 46, name_len);
    entries_.emplace(std::move(name), e);
    pos += 46u + name_len + extra_len + comment_len;
  }
}

std::vector<std::string> ZipArchive::members() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::string ZipArchive::read(const std::string& member) const {
  auto it = entries_.find(member);
  if (it == entries_.end()) throw ZipError(member + ": no such archive member");
  const Entry& e = it->second;
  std::size_t at = e.local_header_offset;
  if (u32(bytes_, at) != kLocalHeader) throw ZipError(member + ": bad local header");
  std::size_t data = at + 30 + u16(bytes_, at + 26) + u16(bytes_, at + 28);
  if (data + e.compressed_size > bytes_.size()) throw ZipError(member + ": truncated data");

  if (e.method == 0) return bytes_.substr(data, e.compressed_size);
  if (e.method != 8) throw ZipError(member + ": unsupported compression method " + std::to_string(e.method));

  std::string out(e.uncompressed_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ZipError(member + ": inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes_.data() + data));
  zs.avail_in = e.compressed_size;
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != e.uncompressed_size) throw ZipError(member + ": corrupt deflate data");
  return out;
}

}  // namespace clearsheet::detail
