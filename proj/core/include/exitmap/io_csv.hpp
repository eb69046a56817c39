#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace exitmap {

/// Deterministic CSV writing: fixed %.12g formatting so identical inputs give
/// byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
    void write(const std::string& path) const;
    std::string to_string() const;

    static std::string num(double v);
    static std::string num(int v) { return std::to_string(v); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace exitmap
