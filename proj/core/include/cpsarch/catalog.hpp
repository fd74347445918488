#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cpsarch/errors.hpp"

namespace cpsarch {

/// The eight block categories (C1..C8). Block types outside every category
/// are irrelevant to the architectural analysis (sinks, signal attributes,
/// formatting elements).
enum class CategoryId { C1, C2, C3, C4, C5, C6, C7, C8 };

inline constexpr std::array<CategoryId, 8> kAllCategories = {
    CategoryId::C1, CategoryId::C2, CategoryId::C3, CategoryId::C4,
    CategoryId::C5, CategoryId::C6, CategoryId::C7, CategoryId::C8};

struct BlockCategory {
  CategoryId id;
  std::string_view name;

  friend bool operator==(const BlockCategory&, const BlockCategory&) = default;
};

/// "C1".."C8"
std::string_view category_code(CategoryId id);

/// Fixed bijection between ids and display names.
std::string_view category_name(CategoryId id);

/// Parses "C1".."C8"; nullopt for anything else.
std::optional<CategoryId> parse_category_code(std::string_view code);

enum class RelevanceClass { Relevant, Irrelevant };

class DuplicateEntry : public std::runtime_error {
 public:
  explicit DuplicateEntry(const std::string& what)
      : std::runtime_error(what) {}
};

class UnknownCategory : public std::runtime_error {
 public:
  explicit UnknownCategory(const std::string& what)
      : std::runtime_error(what) {}
};

/// Map from block type string to its category. Each type belongs to at most
/// one category; lookups are exact and case-sensitive.
class CatalogTable {
 public:
  CatalogTable() = default;
  explicit CatalogTable(std::map<std::string, CategoryId> entries)
      : entries_(std::move(entries)) {}

  std::optional<CategoryId> find(std::string_view block_type) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, CategoryId>& entries() const { return entries_; }

  friend bool operator==(const CatalogTable&, const CatalogTable&) = default;

 private:
  std::map<std::string, CategoryId> entries_;
};

/// Category of a block type, or nullopt when the type is not cataloged.
std::optional<BlockCategory> categorize(std::string_view block_type,
                                        const CatalogTable& table);

/// Relevant iff the type maps to some category.
RelevanceClass relevance(std::string_view block_type,
                         const CatalogTable& table);

/// Parses a catalog data file: a JSON object of {"block_type": "C1".."C8"}.
/// Throws ParseError on malformed JSON, DuplicateEntry on repeated keys and
/// UnknownCategory on category codes outside C1..C8.
CatalogTable load_catalog(std::string_view bytes);

/// The catalog shipped with the toolkit (compiled-in copy of
/// data/default_catalog.json). Types not listed there classify as
/// Irrelevant; users can extend the table via their own data file.
const CatalogTable& builtin_catalog();

}  // namespace cpsarch
