#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "dispersionlab/errors.hpp"
#include "dispersionlab/version.hpp"

namespace dispersionlab::io {

// CSV with '#'-prefixed metadata header; fixed formatting keeps identical
// runs bit-identical.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& meta,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw invalid_argument_error("cannot open output file: " + path);
        out_ << "# dispersionlab " << DISPERSIONLAB_VERSION << " " << meta << "\n";
        out_ << "# columns:";
        for (const auto& c : columns) out_ << " " << c;
        out_ << "\n";
        out_ << std::setprecision(12);
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << vals[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

struct Sample {
    std::vector<double> x, u;
};

// Reads two-column CSV data (comments with '#'), as written by this tool.
inline Sample read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_argument_error("cannot open data file: " + path);
    Sample s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double a, b;
        char comma;
        if (ss >> a && ss >> comma && ss >> b) {
            s.x.push_back(a);
            s.u.push_back(b);
        }
    }
    if (s.x.size() < 2) throw invalid_argument_error("data file has fewer than 2 rows");
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
        if (!(s.x[i] < s.x[i + 1]))
            throw invalid_argument_error("data abscissae must be strictly increasing");
    return s;
}

}  // namespace dispersionlab::io
