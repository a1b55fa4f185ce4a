#include <cstdio>
#include <fstream>
#include <sstream>

#include "pat/io.hpp"

namespace pat::io {

void write_mask_csv(const std::string& path, const masks::SensorMask& mask) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open for writing: " + path);
    os << (mask.lateral_dims == 2 ? "x,y,weight\n" : "x,weight\n");
    char buf[64];
    for (std::size_t m = 0; m < mask.size(); ++m) {
        for (std::size_t a = 0; a < mask.lateral_dims; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g,", mask.positions[m * mask.lateral_dims + a]);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", mask.weights[m]);
        os << buf;
    }
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

masks::SensorMask read_mask_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::io, "cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) fail(ErrorKind::io, "empty mask file: " + path);
    masks::SensorMask m;
    if (line.rfind("x,y,weight", 0) == 0) m.lateral_dims = 2;
    else if (line.rfind("x,weight", 0) == 0) m.lateral_dims = 1;
    else fail(ErrorKind::io, "unrecognized mask header in " + path);
    m.layout = "file";
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                fail(ErrorKind::io, "bad number in " + path + " row " + std::to_string(row));
            }
        }
        if (v.size() != m.lateral_dims + 1) fail(ErrorKind::io, "wrong column count in " + path + " row " + std::to_string(row));
        for (std::size_t a = 0; a < m.lateral_dims; ++a) m.positions.push_back(v[a]);
        m.weights.push_back(v.back());
    }
    return m;
}

}  // namespace pat::io
