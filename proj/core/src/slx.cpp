#include "cpsarch/slx.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <expat.h>
#include <zlib.h>

namespace cpsarch {

namespace {

// --- minimal ZIP reading (central directory walk + raw inflate) ---

uint16_t rd16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0]) | static_cast<uint16_t>(p[1]) << 8;
}

uint32_t rd32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

constexpr uint32_t kEocdSig = 0x06054b50;
constexpr uint32_t kCentralSig = 0x02014b50;
constexpr uint32_t kLocalSig = 0x04034b50;

struct EntryInfo {
  uint16_t flags = 0;
  uint16_t method = 0;
  uint32_t comp_size = 0;
  uint32_t uncomp_size = 0;
  uint32_t local_offset = 0;
};

std::string inflate_raw(const unsigned char* data, std::size_t comp_size,
                        std::size_t uncomp_size) {
  std::string out(uncomp_size, '\0');
  z_stream strm{};
  if (inflateInit2(&strm, -MAX_WBITS) != Z_OK) {
    throw NotZip("zip: inflate initialization failed");
  }
  strm.next_in = const_cast<Bytef*>(data);
  strm.avail_in = static_cast<uInt>(comp_size);
  strm.next_out = reinterpret_cast<Bytef*>(out.data());
  strm.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&strm, Z_FINISH);
  inflateEnd(&strm);
  if (rc != Z_STREAM_END || strm.total_out != uncomp_size) {
    throw NotZip("zip: corrupt deflate stream");
  }
  return out;
}

std::optional<EntryInfo> find_central_entry(std::string_view zip,
                                            std::string_view wanted) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(zip.data());
  const std::size_t n = zip.size();
  if (n < 22) throw NotZip("zip: file too small");

  // End-of-central-directory record: fixed 22 bytes plus a comment of up
  // to 64 KiB; scan backwards for its signature.
  std::size_t eocd = std::string::npos;
  const std::size_t scan_limit = n >= 22 + 65535 ? n - 22 - 65535 : 0;
  for (std::size_t i = n - 22 + 1; i-- > scan_limit;) {
    if (rd32(bytes + i) == kEocdSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) {
    throw NotZip("zip: end-of-central-directory record not found");
  }

  const uint16_t entry_count = rd16(bytes + eocd + 10);
  const uint32_t cd_offset = rd32(bytes + eocd + 16);
  std::size_t pos = cd_offset;
  for (uint16_t i = 0; i < entry_count; ++i) {
    if (pos + 46 > n || rd32(bytes + pos) != kCentralSig) {
      throw NotZip("zip: truncated central directory");
    }
    const uint16_t name_len = rd16(bytes + pos + 28);
    const uint16_t extra_len = rd16(bytes + pos + 30);
    const uint16_t comment_len = rd16(bytes + pos + 32);
    if (pos + 46 + name_len > n) throw NotZip("zip: truncated entry name");
    std::string_view name(zip.data() + pos + 46, name_len);
    if (name == wanted) {
      EntryInfo info;
      info.flags = rd16(bytes + pos + 8);
      info.method = rd16(bytes + pos + 10);
      info.comp_size = rd32(bytes + pos + 20);
      info.uncomp_size = rd32(bytes + pos + 24);
      info.local_offset = rd32(bytes + pos + 42);
      return info;
    }
    pos += 46u + name_len + extra_len + comment_len;
  }
  return std::nullopt;
}

}  // namespace

std::string read_zip_entry(std::string_view zip, std::string_view entry_name) {
  auto info = find_central_entry(zip, entry_name);
  if (!info) {
    throw MissingEntry("zip: no entry named '" + std::string(entry_name) +
                       "'");
  }
  if (info->flags & 0x1) throw NotZip("zip: encrypted entries unsupported");

  const auto* bytes = reinterpret_cast<const unsigned char*>(zip.data());
  const std::size_t n = zip.size();
  const std::size_t lh = info->local_offset;
  if (lh + 30 > n || rd32(bytes + lh) != kLocalSig) {
    throw NotZip("zip: bad local file header");
  }
  const uint16_t name_len = rd16(bytes + lh + 26);
  const uint16_t extra_len = rd16(bytes + lh + 28);
  const std::size_t data = lh + 30 + name_len + extra_len;
  if (data + info->comp_size > n) throw NotZip("zip: truncated entry data");

  switch (info->method) {
    case 0:  // stored
      if (info->comp_size != info->uncomp_size) {
        throw NotZip("zip: stored entry with mismatched sizes");
      }
      return std::string(zip.substr(data, info->comp_size));
    case 8:  // deflate
      return inflate_raw(bytes + data, info->comp_size, info->uncomp_size);
    default:
      throw NotZip("zip: unsupported compression method " +
                   std::to_string(info->method));
  }
}

namespace {

// --- blockdiagram.xml subset parser ---

struct LineContext {
  std::string src_block;
  int src_port = 0;
  bool have_src = false;
  std::vector<Connection> pending;
};

struct SlxParseState {
  Model model;
  std::vector<std::string> element_stack;
  std::vector<std::string> system_stack;      // containment context
  std::vector<std::string> block_sid_stack;   // SIDs of enclosing <Block>s
  std::vector<LineContext> line_stack;
  std::string p_name;
  std::string p_text;
  bool in_p = false;
  std::string error;
};

const char* attr_value(const char** attrs, const char* key) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], key) == 0) return attrs[i + 1];
  }
  return nullptr;
}

// Endpoint strings look like "3#out:1" or "4#in:2"; the port index is
// optional and defaults to 0.
bool parse_endpoint(const std::string& text, std::string& sid, int& port) {
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    auto e = s.find_last_not_of(ws);
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string t = trim(text);
  auto hash = t.find('#');
  if (hash == std::string::npos || hash == 0) return false;
  sid = t.substr(0, hash);
  port = 0;
  auto colon = t.find(':', hash);
  if (colon != std::string::npos) {
    try {
      port = std::stoi(t.substr(colon + 1));
    } catch (...) {
      return false;
    }
    if (port < 0) return false;
  }
  return true;
}

void XMLCALL on_start(void* user, const char* name, const char** attrs) {
  auto& st = *static_cast<SlxParseState*>(user);
  if (!st.error.empty()) return;
  std::string_view el(name);

  if (el == "System") {
    // A System directly inside a SubSystem block opens that block's scope;
    // the top-level System is the root scope.
    if (!st.element_stack.empty() && st.element_stack.back() == "Block" &&
        !st.block_sid_stack.empty()) {
      st.system_stack.push_back(st.block_sid_stack.back());
    } else {
      st.system_stack.emplace_back(kRootId);
    }
  } else if (el == "Block") {
    const char* sid = attr_value(attrs, "SID");
    const char* type = attr_value(attrs, "BlockType");
    if (sid == nullptr || type == nullptr) {
      st.error = "Block element without SID or BlockType attribute";
      return;
    }
    const char* blk_name = attr_value(attrs, "Name");
    Block b;
    b.id = sid;
    b.block_type = type;
    b.name = blk_name != nullptr ? blk_name : "";
    b.parent = st.system_stack.empty() ? std::string(kRootId)
                                       : st.system_stack.back();
    st.model.blocks.push_back(std::move(b));
    st.block_sid_stack.emplace_back(sid);
  } else if (el == "Line") {
    st.line_stack.emplace_back();
  } else if (el == "P") {
    const char* pn = attr_value(attrs, "Name");
    st.p_name = pn != nullptr ? pn : "";
    st.p_text.clear();
    st.in_p = true;
  }
  st.element_stack.emplace_back(el);
}

void XMLCALL on_end(void* user, const char* name) {
  auto& st = *static_cast<SlxParseState*>(user);
  if (!st.error.empty()) return;
  std::string_view el(name);
  if (!st.element_stack.empty()) st.element_stack.pop_back();

  if (el == "P") {
    st.in_p = false;
    if (!st.line_stack.empty()) {
      LineContext& line = st.line_stack.back();
      if (st.p_name == "Src") {
        std::string sid;
        int port = 0;
        if (!parse_endpoint(st.p_text, sid, port)) {
          st.error = "malformed line source '" + st.p_text + "'";
          return;
        }
        line.src_block = sid;
        line.src_port = port;
        line.have_src = true;
      } else if (st.p_name == "Dst") {
        std::string sid;
        int port = 0;
        if (!parse_endpoint(st.p_text, sid, port)) {
          st.error = "malformed line destination '" + st.p_text + "'";
          return;
        }
        Connection c;
        c.dst_block = sid;
        c.dst_port = port;
        line.pending.push_back(std::move(c));
      }
    }
  } else if (el == "Line") {
    LineContext line = std::move(st.line_stack.back());
    st.line_stack.pop_back();
    // One connection per (line, destination) pair. Lines without a source
    // (dangling wires) contribute nothing.
    if (line.have_src) {
      for (Connection& c : line.pending) {
        c.src_block = line.src_block;
        c.src_port = line.src_port;
        st.model.connections.push_back(std::move(c));
      }
    }
  } else if (el == "Block") {
    if (!st.block_sid_stack.empty()) st.block_sid_stack.pop_back();
  } else if (el == "System") {
    if (!st.system_stack.empty()) st.system_stack.pop_back();
  }
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
  auto& st = *static_cast<SlxParseState*>(user);
  if (st.in_p) st.p_text.append(s, static_cast<std::size_t>(len));
}

Model parse_system_xml(std::string_view xml, std::string_view model_name) {
  SlxParseState st;
  st.model.name = model_name;

  XML_Parser parser = XML_ParserCreate(nullptr);
  if (parser == nullptr) throw XmlError("could not create XML parser");
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, on_start, on_end);
  XML_SetCharacterDataHandler(parser, on_text);

  XML_Status status = XML_Parse(parser, xml.data(),
                                static_cast<int>(xml.size()), /*isFinal=*/1);
  if (status != XML_STATUS_OK) {
    std::ostringstream os;
    os << "blockdiagram.xml: " << XML_ErrorString(XML_GetErrorCode(parser))
       << " at line " << XML_GetCurrentLineNumber(parser);
    XML_ParserFree(parser);
    throw XmlError(os.str());
  }
  XML_ParserFree(parser);

  if (!st.error.empty()) {
    throw XmlError("blockdiagram.xml: " + st.error);
  }

  ValidationReport report = validate(st.model);
  if (!report.ok()) {
    throw InvalidModel("slx model '" + st.model.name + "': " +
                       report.violations.front().kind + " (" +
                       report.violations.front().subject + ")");
  }
  return std::move(st.model);
}

}  // namespace

Model parse_slx_bytes(std::string_view zip_bytes,
                      std::string_view model_name) {
  std::string xml = read_zip_entry(zip_bytes, kSlxSystemEntry);
  return parse_system_xml(xml, model_name);
}

Model parse_slx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw NotZip("cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_slx_bytes(buf.str(), path.stem().string());
}

}  // namespace cpsarch
