#include "spectest/panel.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace spectest {

void validate(const TimeSeriesPanel& panel) {
    if (panel.block_dim < 1) throw std::invalid_argument("panel: block_dim must be >= 1");
    if (panel.groups < 2) throw std::invalid_argument("panel: need at least 2 groups");
    if (panel.dim() != panel.block_dim * panel.groups)
        throw std::invalid_argument("panel: dimension must equal block_dim * groups");
    if (panel.length() < 4) throw std::invalid_argument("panel: need at least 4 observations");
    if (!panel.data.allFinite()) throw std::invalid_argument("panel: entries must be finite");
}

TimeSeriesPanel demean(const TimeSeriesPanel& panel) {
    validate(panel);
    TimeSeriesPanel out = panel;
    out.data.rowwise() -= panel.data.colwise().mean();
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    std::size_t consumed = 0;
    try {
        out = std::stod(text, &consumed);
    } catch (const std::exception&) {
        return false;
    }
    while (consumed < text.size() && std::isspace(static_cast<unsigned char>(text[consumed]))) ++consumed;
    return consumed == text.size();
}

} // namespace

TimeSeriesPanel read_panel_csv(const std::string& path, int block_dim, int groups) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    const int dim = block_dim * groups;
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool ok = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double value = 0.0;
            if (!parse_double(fields[c], value)) {
                if (first_data_line) {
                    ok = false;  // header line
                    break;
                }
                throw std::runtime_error(path + ": parse error at row " + std::to_string(line_no) +
                                         ", column " + std::to_string(c + 1));
            }
            row.push_back(value);
        }
        if (!ok) {
            first_data_line = false;
            continue;
        }
        if (static_cast<int>(row.size()) != dim)
            throw std::runtime_error(path + ": row " + std::to_string(line_no) + " has " +
                                     std::to_string(row.size()) + " columns, expected " + std::to_string(dim));
        rows.push_back(std::move(row));
        first_data_line = false;
    }

    TimeSeriesPanel panel;
    panel.block_dim = block_dim;
    panel.groups = groups;
    panel.data.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < dim; ++c) panel.data(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    validate(panel);
    return panel;
}

void write_panel_csv(const TimeSeriesPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.precision(17);
    for (int t = 0; t < panel.length(); ++t) {
        for (int c = 0; c < panel.dim(); ++c) {
            if (c) out << ',';
            out << panel.data(t, c);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace spectest
