#include "scanstat/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace scanstat::io {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'L', 'D', '0', '0', '0', '1'};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

}  // namespace

void write_gf01(const std::string& path, const GridField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t d = static_cast<std::uint32_t>(field.dim());
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    for (const Index dim : field.dims()) {
        const std::uint32_t v = static_cast<std::uint32_t>(dim);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    out.write(reinterpret_cast<const char*>(field.data().data()),
              static_cast<std::streamsize>(field.cell_count() * sizeof(double)));
    if (!out) fail(path, "write failed");
}

GridField read_gf01(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        fail(path, "not a GF01 file (bad magic)");
    std::uint32_t d = 0;
    if (!in.read(reinterpret_cast<char*>(&d), sizeof(d)) || d == 0 || d > 16)
        fail(path, "bad dimension count");
    std::vector<Index> dims(d);
    for (std::uint32_t j = 0; j < d; ++j) {
        std::uint32_t v = 0;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)) || v == 0)
            fail(path, "bad extent");
        dims[j] = static_cast<Index>(v);
    }
    const std::size_t cells = checked_cell_count(dims);
    std::vector<double> data(cells);
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(cells * sizeof(double))))
        fail(path, "truncated data section");
    return GridField(std::move(dims), std::move(data));
}

void write_csv(const std::string& path, const GridField& field) {
    if (field.dim() != 2) throw std::invalid_argument("CSV grids are two-dimensional only");
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out.precision(17);
    const Index rows = field.dims()[0];
    const Index cols = field.dims()[1];
    const auto data = field.data();
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            if (c) out << ',';
            out << data[static_cast<std::size_t>(r * cols + c)];
        }
        out << '\n';
    }
    if (!out) fail(path, "write failed");
}

GridField read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open");
    std::vector<double> data;
    Index rows = 0;
    Index cols = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Index c = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                data.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(path, "row " + std::to_string(rows + 1) + ": malformed number '" + cell + "'");
            }
            ++c;
        }
        if (cols < 0)
            cols = c;
        else if (c != cols)
            fail(path, "row " + std::to_string(rows + 1) + ": ragged row width");
        ++rows;
    }
    if (rows == 0 || cols < 1) fail(path, "empty CSV grid");
    return GridField({rows, cols}, std::move(data));
}

GridField read_auto(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "cannot open");
    char magic[8] = {};
    probe.read(magic, sizeof(magic));
    probe.close();
    if (std::memcmp(magic, kMagic, sizeof(magic)) == 0) return read_gf01(path);
    return read_csv(path);
}

}  // namespace scanstat::io
