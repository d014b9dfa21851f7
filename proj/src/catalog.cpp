// SPDX-License-Identifier: Apache-2.0
#include "housebot/catalog.hpp"

#include "housebot/errors.hpp"
#include "housebot/resources.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace housebot {

namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(" \t\r");
    return std::string{s.substr(first, last - first + 1)};
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

bool valid_name(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || c == ' ' || c == '-';
    });
}

} // namespace

ObjectCatalog::ObjectCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string, std::less<>> seen;
    for (const auto& entry : entries_) {
        if (!valid_name(entry.name))
            throw ConfigError("catalog: invalid object name '" + entry.name + "'");
        if (!seen.insert(entry.name).second)
            throw ConfigError("catalog: duplicate object name '" + entry.name + "'");
        if (entry.irregular_plural && entry.irregular_plural->empty())
            throw ConfigError("catalog: empty plural for '" + entry.name + "'");
    }
}

ObjectCatalog ObjectCatalog::parse(std::string_view text) {
    std::vector<CatalogEntry> entries;
    std::istringstream in{std::string{text}};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;
        auto fields = split_fields(stripped);
        if (fields.size() < 2 || fields.size() > 3)
            throw ConfigError("catalog line " + std::to_string(line_no) + ": expected name,category[,plural]");
        CatalogEntry entry;
        entry.name = fields[0];
        if (fields[1] == "food")
            entry.category = ObjectCategory::food;
        else if (fields[1] == "household")
            entry.category = ObjectCategory::household;
        else
            throw ConfigError("catalog line " + std::to_string(line_no) + ": unknown category '" + fields[1] + "'");
        if (fields.size() == 3)
            entry.irregular_plural = fields[2];
        entries.push_back(std::move(entry));
    }
    return ObjectCatalog{std::move(entries)};
}

ObjectCatalog ObjectCatalog::load(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in)
        throw ConfigError("cannot open catalog file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

const ObjectCatalog& ObjectCatalog::builtin() {
    static const ObjectCatalog catalog = parse(resources::catalog_csv());
    return catalog;
}

const CatalogEntry* ObjectCatalog::find(std::string_view name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
    return it == entries_.end() ? nullptr : &*it;
}

bool ObjectCatalog::contains(std::string_view name) const { return find(name) != nullptr; }

std::string ObjectCatalog::plural(std::string_view name) const {
    if (const auto* entry = find(name); entry && entry->irregular_plural)
        return *entry->irregular_plural;
    return std::string{name} + "s";
}

std::string ObjectCatalog::count_phrase(std::string_view name, int count) const {
    return std::to_string(count) + " " + (count == 1 ? std::string{name} : plural(name));
}

std::string ObjectCatalog::to_text() const {
    std::string out;
    for (const auto& entry : entries_) {
        out += entry.name;
        out += entry.category == ObjectCategory::food ? ",food" : ",household";
        if (entry.irregular_plural)
            out += "," + *entry.irregular_plural;
        out += "\n";
    }
    return out;
}

std::string with_article(std::string_view noun) {
    constexpr std::string_view vowels = "aeiou";
    bool vowel = !noun.empty() && vowels.find(noun.front()) != std::string_view::npos;
    return (vowel ? "an " : "a ") + std::string{noun};
}

} // namespace housebot
