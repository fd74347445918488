#include "cpsarch/catalog.hpp"

#include <set>

#include <json.hpp>

#include "embedded_data.hpp"

namespace cpsarch {

namespace {

constexpr std::array<std::string_view, 8> kCodes = {"C1", "C2", "C3", "C4",
                                                    "C5", "C6", "C7", "C8"};

constexpr std::array<std::string_view, 8> kNames = {
    "Continuous",      "Discontinuities",
    "Discrete",        "Logic and Bit Operations",
    "Math Operations", "Ports & Subsystems",
    "Sources",         "User-Defined Functions"};

}  // namespace

std::string_view category_code(CategoryId id) {
  return kCodes[static_cast<std::size_t>(id)];
}

std::string_view category_name(CategoryId id) {
  return kNames[static_cast<std::size_t>(id)];
}

std::optional<CategoryId> parse_category_code(std::string_view code) {
  for (std::size_t i = 0; i < kCodes.size(); ++i) {
    if (kCodes[i] == code) return static_cast<CategoryId>(i);
  }
  return std::nullopt;
}

std::optional<CategoryId> CatalogTable::find(std::string_view block_type) const {
  auto it = entries_.find(std::string(block_type));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<BlockCategory> categorize(std::string_view block_type,
                                        const CatalogTable& table) {
  auto id = table.find(block_type);
  if (!id) return std::nullopt;
  return BlockCategory{*id, category_name(*id)};
}

RelevanceClass relevance(std::string_view block_type,
                         const CatalogTable& table) {
  return table.find(block_type) ? RelevanceClass::Relevant
                                : RelevanceClass::Irrelevant;
}

CatalogTable load_catalog(std::string_view bytes) {
  using nlohmann::json;

  // nlohmann silently keeps the last of duplicate keys, so the keys are
  // counted through the parser callback to catch repeats.
  std::set<std::string> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event,
                                   json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      auto key = parsed.get<std::string>();
      if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(bytes, cb);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  if (!duplicate.empty()) {
    throw DuplicateEntry("catalog: block type '" + duplicate +
                         "' listed more than once");
  }
  if (!doc.is_object()) {
    throw ParseError("catalog: top level must be a JSON object");
  }

  std::map<std::string, CategoryId> entries;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) {
      throw UnknownCategory("catalog: entry '" + key +
                            "' must map to a category code string");
    }
    auto id = parse_category_code(value.get<std::string>());
    if (!id) {
      throw UnknownCategory("catalog: entry '" + key +
                            "' maps to unknown category '" +
                            value.get<std::string>() + "'");
    }
    entries.emplace(key, *id);
  }
  return CatalogTable(std::move(entries));
}

const CatalogTable& builtin_catalog() {
  static const CatalogTable table = load_catalog(embedded::kDefaultCatalog);
  return table;
}

}  // namespace cpsarch
