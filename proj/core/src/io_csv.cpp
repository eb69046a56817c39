#include "exitmap/io_csv.hpp"

#include <sstream>
#include <stdexcept>

namespace exitmap {

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string CsvWriter::to_string() const {
    std::ostringstream os;
    auto put = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    put(header_);
    for (const auto& r : rows_) put(r);
    return os.str();
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_string();
}

} // namespace exitmap
