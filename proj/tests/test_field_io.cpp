#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "orlicz/field_io.hpp"

using namespace orlicz;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "orlicz_field_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(FieldIo, RoundTripIsBitExact) {
    Grid g = Grid::cube(3, 5, 2.0, -1.0);
    auto u = random_suite(g, 1, 12, true).front();
    for (auto fmt : {FieldFormat::Csv, FieldFormat::Binary}) {
        auto stem = scratch(fmt == FieldFormat::Csv ? "rt_csv" : "rt_bin");
        write_field(u, stem, fmt);
        auto v = read_field(stem.string() + ".json");
        EXPECT_EQ(v.grid, u.grid);
        EXPECT_EQ(v.comp, u.comp);
        EXPECT_EQ(v.zero_bc, u.zero_bc);
    }
}

TEST(FieldIo, GridJsonRoundTrip) {
    Grid g = Grid::cube(2, 7, 0.5, 0.25);
    EXPECT_EQ(grid_from_json(grid_to_json(g)), g);
}

TEST(FieldIo, CsvHasHeaderAndOneRowPerNode) {
    Grid g = Grid::cube(2, 3);
    auto u = GridField::zeros(g, 2);
    auto stem = scratch("rows");
    write_field(u, stem, FieldFormat::Csv);
    std::ifstream f(stem.string() + ".csv");
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "u0,u1");
    std::size_t rows = 0;
    while (std::getline(f, line)) ++rows;
    EXPECT_EQ(rows, g.node_count());
}

TEST(FieldIo, MissingOrCorruptInputs) {
    EXPECT_ANY_THROW(read_field(scratch("does_not_exist.json")));
    auto bad = scratch("bad.json");
    std::ofstream(bad) << "{\"grid\": 3}";
    EXPECT_ANY_THROW(read_field(bad));
}
