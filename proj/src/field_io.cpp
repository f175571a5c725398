#include "orlicz/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace orlicz {

nlohmann::json grid_to_json(const Grid& g) {
    return {{"dim", g.dim},
            {"cells", std::vector<int>(g.cells.begin(), g.cells.begin() + g.dim)},
            {"h", std::vector<double>(g.h.begin(), g.h.begin() + g.dim)},
            {"origin", std::vector<double>(g.origin.begin(), g.origin.begin() + g.dim)}};
}

Grid grid_from_json(const nlohmann::json& j) {
    Grid g;
    g.dim = j.at("dim").get<int>();
    if (g.dim != 2 && g.dim != 3) throw ConfigurationError("grid: dim must be 2 or 3");
    auto cells = j.at("cells").get<std::vector<int>>();
    auto h = j.at("h").get<std::vector<double>>();
    auto origin = j.value("origin", std::vector<double>(g.dim, 0.0));
    if (cells.size() != static_cast<std::size_t>(g.dim) || h.size() != cells.size() || origin.size() != cells.size())
        throw ConfigurationError("grid: cells, h and origin need dim entries");
    g.cells = {1, 1, 1};
    g.h = {1.0, 1.0, 1.0};
    g.origin = {0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim; ++d) {
        g.cells[d] = cells[d];
        g.h[d] = h[d];
        g.origin[d] = origin[d];
    }
    g.validate();
    return g;
}

void write_field(const GridField& u, const std::filesystem::path& stem, FieldFormat fmt) {
    u.validate();
    std::filesystem::path data = stem;
    data += fmt == FieldFormat::Csv ? ".csv" : ".bin";
    std::filesystem::path header = stem;
    header += ".json";
    nlohmann::json j{{"grid", grid_to_json(u.grid)},
                     {"components", u.components()},
                     {"zero_bc", u.zero_bc},
                     {"format", fmt == FieldFormat::Csv ? "csv" : "binary"},
                     {"data", data.filename().string()},
                     {"layout", "node-major, x fastest"}};
    std::ofstream(header) << j.dump(2) << '\n';
    const std::size_t nodes = u.grid.node_count();
    if (fmt == FieldFormat::Csv) {
        std::ofstream out(data);
        out << std::setprecision(17);
        for (int c = 0; c < u.components(); ++c) out << (c ? "," : "") << "u" << c;
        out << '\n';
        for (std::size_t i = 0; i < nodes; ++i) {
            for (int c = 0; c < u.components(); ++c) out << (c ? "," : "") << u.comp[c][i];
            out << '\n';
        }
    } else {
        static_assert(std::endian::native == std::endian::little, "binary field output assumes little-endian");
        std::ofstream out(data, std::ios::binary);
        for (std::size_t i = 0; i < nodes; ++i)
            for (int c = 0; c < u.components(); ++c) out.write(reinterpret_cast<const char*>(&u.comp[c][i]), sizeof(double));
    }
}

GridField read_field(const std::filesystem::path& header) {
    std::ifstream hin(header);
    if (!hin) throw ConfigurationError("cannot open field header " + header.string());
    nlohmann::json j = nlohmann::json::parse(hin);
    GridField u = GridField::zeros(grid_from_json(j.at("grid")), j.at("components").get<int>());
    u.zero_bc = j.value("zero_bc", false);
    std::filesystem::path data = header.parent_path() / j.at("data").get<std::string>();
    const std::size_t nodes = u.grid.node_count();
    if (j.at("format") == "csv") {
        std::ifstream in(data);
        std::string line;
        if (!std::getline(in, line)) throw ConfigurationError("field data file is empty");
        for (std::size_t i = 0; i < nodes; ++i) {
            if (!std::getline(in, line)) throw ConfigurationError("field data file is truncated");
            std::stringstream ss(line);
            std::string cell;
            for (int c = 0; c < u.components(); ++c) {
                if (!std::getline(ss, cell, ',')) throw ConfigurationError("field row has too few columns");
                u.comp[c][i] = std::stod(cell);
            }
        }
    } else {
        std::ifstream in(data, std::ios::binary);
        for (std::size_t i = 0; i < nodes; ++i)
            for (int c = 0; c < u.components(); ++c)
                if (!in.read(reinterpret_cast<char*>(&u.comp[c][i]), sizeof(double)))
                    throw ConfigurationError("field data file is truncated");
    }
    u.validate();
    return u;
}

}  // namespace orlicz
