// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

enum class ObjectCategory { food, household };

struct CatalogEntry {
    std::string name;
    ObjectCategory category = ObjectCategory::household;
    std::optional<std::string> irregular_plural;

    bool operator==(const CatalogEntry&) const = default;
};

/// Named objects that may be placed in the world.
///
/// The text form is one `name,category[,plural]` entry per line. Blank lines
/// and lines starting with `#` are ignored. Names must be unique, lowercase
/// and non-empty.
class ObjectCatalog {
public:
    ObjectCatalog() = default;
    explicit ObjectCatalog(std::vector<CatalogEntry> entries);

    static ObjectCatalog parse(std::string_view text);
    static ObjectCatalog load(const std::filesystem::path& path);

    /// The catalog shipped in data/catalog.csv, compiled into the binary.
    static const ObjectCatalog& builtin();

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(std::string_view name) const;
    const CatalogEntry* find(std::string_view name) const;

    /// Plural form; names outside the catalog get a trailing "s".
    std::string plural(std::string_view name) const;

    /// "3 sponges", "1 sponge", "0 sponges".
    std::string count_phrase(std::string_view name, int count) const;

    std::string to_text() const;

    bool operator==(const ObjectCatalog&) const = default;

private:
    std::vector<CatalogEntry> entries_;
};

/// "a pen", "an orange".
std::string with_article(std::string_view noun);

} // namespace housebot
