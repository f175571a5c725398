#include "orlicz/catalog.hpp"

#include "catalog_data.hpp"

namespace orlicz {

namespace {

CatalogPair parse_pair(const nlohmann::json& j, bool default_expect) {
    CatalogPair p;
    p.id = j.at("id").get<std::string>();
    p.a = j.at("A").get<std::string>();
    p.b = j.at("B").get<std::string>();
    p.expect_11 = j.value("cond11", default_expect);
    p.expect_12 = j.value("cond12", default_expect);
    p.params = j.value("params", std::string{});
    return p;
}

}  // namespace

const Catalog& Catalog::builtin() {
    static const Catalog cat = from_json(nlohmann::json::parse(detail::kCatalogJson));
    return cat;
}

Catalog Catalog::from_json(const nlohmann::json& j) {
    Catalog c;
    c.source_ = j;
    c.version_ = j.value("version", std::string{"unversioned"});
    for (const auto& f : j.at("functions")) {
        c.entries_.push_back({f.at("name").get<std::string>(), YoungFunction::from_json(f)});
    }
    if (j.contains("examples"))
        for (const auto& e : j.at("examples")) c.examples_.push_back(parse_pair(e, true));
    if (j.contains("controls"))
        for (const auto& e : j.at("controls")) c.controls_.push_back(parse_pair(e, true));
    for (const auto* list : {&c.examples_, &c.controls_}) {
        for (const auto& p : *list) {
            c.get(p.a);
            c.get(p.b);
        }
    }
    return c;
}

std::optional<YoungFunction> Catalog::find(std::string_view name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.fn;
    return std::nullopt;
}

const YoungFunction& Catalog::get(std::string_view name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.fn;
    std::string msg = "unknown Young function '" + std::string(name) + "'; catalog:";
    for (const auto& e : entries_) msg += " " + e.name;
    throw UnknownYoungFunction(msg);
}

YoungFunction Catalog::resolve(const std::string& name_or_json) const {
    auto first = name_or_json.find_first_not_of(" \t\n");
    if (first != std::string::npos && name_or_json[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(name_or_json);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigurationError(std::string("malformed Young function JSON: ") + e.what());
        }
        try {
            return YoungFunction::from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigurationError(std::string("malformed Young function JSON: ") + e.what());
        }
    }
    return get(name_or_json);
}

std::vector<std::string> Catalog::names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

}  // namespace orlicz
