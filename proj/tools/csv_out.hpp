#pragma once

// Deterministic CSV emission: header row, run-metadata comment lines, fixed
// significant digits (17 for double, 32 for the extended-precision grid
// values), and a completion marker so partial files are recognizable.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hhsplit/dd.hpp"

namespace hhsplit::cli {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_dd(dd v) {
    if (v.hi == 0.0 && v.lo == 0.0) return "0";
    mpf_class x(v.hi, 160);
    x += v.lo;
    mp_exp_t e;
    std::string digits = x.get_str(e, 10, 32);
    bool neg = !digits.empty() && digits[0] == '-';
    if (neg) digits.erase(0, 1);
    std::ostringstream out;
    if (neg) out << '-';
    out << digits.substr(0, 1);
    if (digits.size() > 1) out << '.' << digits.substr(1);
    out << 'e' << (e - 1);
    return out.str();
}

class CsvFile {
  public:
    explicit CsvFile(const std::string& path) : path_(path) {
        if (path.empty() || path == "-") {
            out_ = &std::cout;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file: " + path);
            out_ = file_.get();
        }
    }

    void comment(const std::string& line) { (*out_) << "# " << line << "\n"; }
    void header(const std::vector<std::string>& cols) { row(cols); }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            (*out_) << (i ? "," : "") << cells[i];
        (*out_) << "\n";
    }
    // emitted only on success: its absence marks an interrupted run
    void complete() { (*out_) << "# complete\n"; out_->flush(); }

  private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_ = nullptr;
};

}  // namespace hhsplit::cli
