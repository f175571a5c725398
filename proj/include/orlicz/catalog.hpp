#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct UnknownYoungFunction : ConfigurationError {
    using ConfigurationError::ConfigurationError;
};

struct CatalogEntry {
    std::string name;
    YoungFunction fn;
};

// A named (A, B) pair with the expected verdicts for cond11 and cond12.
struct CatalogPair {
    std::string id;
    std::string a;
    std::string b;
    bool expect_11 = true;
    bool expect_12 = true;
    std::string params;
};

class Catalog {
public:
    static const Catalog& builtin();
    static Catalog from_json(const nlohmann::json& j);

    const YoungFunction& get(std::string_view name) const;
    std::optional<YoungFunction> find(std::string_view name) const;
    // A catalog name, or an inline JSON object {"kind": ..., "params": ...}.
    YoungFunction resolve(const std::string& name_or_json) const;

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    const std::vector<CatalogPair>& examples() const { return examples_; }
    const std::vector<CatalogPair>& controls() const { return controls_; }
    const std::string& version() const { return version_; }
    std::vector<std::string> names() const;
    const nlohmann::json& source() const { return source_; }

private:
    std::string version_;
    std::vector<CatalogEntry> entries_;
    std::vector<CatalogPair> examples_;
    std::vector<CatalogPair> controls_;
    nlohmann::json source_;
};

}  // namespace orlicz
