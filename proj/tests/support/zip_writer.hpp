#pragma once

// Test-only ZIP writer: enough of the format (stored + deflated entries,
// central directory, end record) to build .slx fixtures in memory.

#include <cstdint>
#include <string>
#include <vector>

#include <zlib.h>

namespace testsupport {

class ZipWriter {
 public:
  void add_stored(const std::string& name, const std::string& data) {
    add(name, data, /*deflate=*/false);
  }

  void add_deflated(const std::string& name, const std::string& data) {
    add(name, data, /*deflate=*/true);
  }

  std::string finish() {
    std::string out = payload_;
    const auto cd_offset = static_cast<uint32_t>(out.size());
    for (const CentralEntry& e : central_) {
      put32(out, 0x02014b50);
      put16(out, 20);  // version made by
      put16(out, 20);  // version needed
      put16(out, 0);   // flags
      put16(out, e.method);
      put16(out, 0);  // mod time
      put16(out, 0);  // mod date
      put32(out, e.crc);
      put32(out, e.comp_size);
      put32(out, e.uncomp_size);
      put16(out, static_cast<uint16_t>(e.name.size()));
      put16(out, 0);  // extra
      put16(out, 0);  // comment
      put16(out, 0);  // disk
      put16(out, 0);  // internal attrs
      put32(out, 0);  // external attrs
      put32(out, e.offset);
      out += e.name;
    }
    const auto cd_size = static_cast<uint32_t>(out.size()) - cd_offset;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<uint16_t>(central_.size()));
    put16(out, static_cast<uint16_t>(central_.size()));
    put32(out, cd_size);
    put32(out, cd_offset);
    put16(out, 0);  // comment length
    return out;
  }

 private:
  struct CentralEntry {
    std::string name;
    uint16_t method;
    uint32_t crc;
    uint32_t comp_size;
    uint32_t uncomp_size;
    uint32_t offset;
  };

  static void put16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
  }
  static void put32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }

  static std::string raw_deflate(const std::string& data) {
    z_stream strm{};
    deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                 Z_DEFAULT_STRATEGY);
    std::string out(deflateBound(&strm, data.size()), '\0');
    strm.next_in =
        reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm.avail_in = static_cast<uInt>(data.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    deflate(&strm, Z_FINISH);
    out.resize(strm.total_out);
    deflateEnd(&strm);
    return out;
  }

  void add(const std::string& name, const std::string& data, bool deflate) {
    CentralEntry e;
    e.name = name;
    e.method = deflate ? 8 : 0;
    e.crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
              static_cast<uInt>(data.size())));
    e.uncomp_size = static_cast<uint32_t>(data.size());
    const std::string body = deflate ? raw_deflate(data) : data;
    e.comp_size = static_cast<uint32_t>(body.size());
    e.offset = static_cast<uint32_t>(payload_.size());

    put32(payload_, 0x04034b50);
    put16(payload_, 20);
    put16(payload_, 0);
    put16(payload_, e.method);
    put16(payload_, 0);
    put16(payload_, 0);
    put32(payload_, e.crc);
    put32(payload_, e.comp_size);
    put32(payload_, e.uncomp_size);
    put16(payload_, static_cast<uint16_t>(name.size()));
    put16(payload_, 0);
    payload_ += name;
    payload_ += body;
    central_.push_back(std::move(e));
  }

  std::string payload_;
  std::vector<CentralEntry> central_;
};

}  // namespace testsupport
