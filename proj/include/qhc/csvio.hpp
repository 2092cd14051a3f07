#pragma once

#include "qhc/version.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhc::csvio {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Deterministic CSV: fixed column order, 17-significant-digit floats, and a
// provenance comment line embedding the tool version and config hash.
class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& columns,
           const std::string& config_hash)
        : f_(path) {
        if (!f_) throw std::runtime_error("csv: cannot open " + path);
        f_ << "# qhc " << kVersion << " config=" << config_hash << "\n";
        for (size_t i = 0; i < columns.size(); ++i)
            f_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            f_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream f_;
};

} // namespace qhc::csvio
