#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cpsarch/model.hpp"

namespace cpsarch {

/// The archive entry holding the block diagram of an .slx container.
inline constexpr std::string_view kSlxSystemEntry = "simulink/blockdiagram.xml";

/// File is unreadable, not a ZIP container, or uses unsupported ZIP
/// features (encryption, compression methods other than store/deflate).
class NotZip : public std::runtime_error {
 public:
  explicit NotZip(const std::string& what) : std::runtime_error(what) {}
};

/// The archive lacks simulink/blockdiagram.xml.
class MissingEntry : public std::runtime_error {
 public:
  explicit MissingEntry(const std::string& what) : std::runtime_error(what) {}
};

class XmlError : public std::runtime_error {
 public:
  explicit XmlError(const std::string& what) : std::runtime_error(what) {}
};

/// Extracts one entry from an in-memory ZIP archive.
/// Throws NotZip / MissingEntry.
std::string read_zip_entry(std::string_view zip_bytes,
                           std::string_view entry_name);

/// Reads a Simulink .slx container: maps <Block> elements (SID, BlockType,
/// Name) to blocks, nested <System> elements to subsystem containment, and
/// <Line>/<Branch> destinations to connections (one connection per line
/// destination). Masked and variant subsystem contents parse like ordinary
/// subsystems. The model name is the file stem.
Model parse_slx(const std::filesystem::path& path);

/// Same, over in-memory archive bytes.
Model parse_slx_bytes(std::string_view zip_bytes, std::string_view model_name);

}  // namespace cpsarch
