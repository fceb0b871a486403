#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace pcr {

/// Display width in code points (UTF-8 continuation bytes are not counted).
inline std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (char c : s) {
        w += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
    }
    return w;
}

/// Plain aligned-column text table. The first column is left-aligned, the
/// rest are right-aligned.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        row.resize(header_.size());
        rows_.push_back(std::move(row));
    }

    std::string render() const {
        std::vector<std::size_t> width(header_.size(), 0);
        auto widen = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                width[c] = std::max(width[c], display_width(row[c]));
            }
        };
        widen(header_);
        for (const auto& r : rows_) {
            widen(r);
        }

        std::ostringstream os;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                const std::string pad(width[c] - display_width(row[c]), ' ');
                if (c > 0) {
                    os << "  ";
                }
                os << (c == 0 ? row[c] + pad : pad + row[c]);
            }
            os << '\n';
        };
        emit(header_);
        std::size_t total = 0;
        for (std::size_t w : width) {
            total += w;
        }
        os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        for (const auto& r : rows_) {
            emit(r);
        }
        return os.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string pm(double mean, double std, int digits = 2) {
    return fixed(mean, digits) + " ± " + fixed(std, digits);
}

}  // namespace pcr
