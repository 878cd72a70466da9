#include "bnorder/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "bnorder/errors.hpp"

namespace bnorder {

Dataset::Dataset(std::vector<std::string> names, std::vector<int> arities, DataMatrix values)
    : names_(std::move(names)), arities_(std::move(arities)), values_(std::move(values)) {
    const auto n = arities_.size();
    if (n == 0) throw DataError("dataset has no variables");
    if (names_.size() != n)
        throw DataError(fmt::format("{} names for {} variables", names_.size(), n));
    if (static_cast<std::size_t>(values_.cols()) != n)
        throw DataError(fmt::format("data has {} columns, expected {}", values_.cols(), n));
    if (values_.rows() == 0) throw DataError("dataset has no rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (arities_[i] < 1) throw DataError(fmt::format("variable {} has arity {}", names_[i], arities_[i]));
        const auto col = values_.col(static_cast<Eigen::Index>(i));
        if (col.minCoeff() < 0 || col.maxCoeff() >= arities_[i])
            throw DataError(fmt::format("variable {} has values outside [0, {})", names_[i], arities_[i]));
    }
}

Dataset Dataset::select_rows(std::span<const int> rows) const {
    DataMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = values_.row(rows[r]);
    return Dataset(names_, arities_, std::move(out));
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<int> parse_nonnegative(const std::string& text) {
    const std::string t = trim(text);
    int v = 0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc{} || ptr != end || v < 0) return std::nullopt;
    return v;
}

}  // namespace

Dataset parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: missing header");
    std::vector<std::string> names;
    std::vector<std::optional<int>> declared;
    for (const auto& cell : split_commas(line)) {
        const std::string c = trim(cell);
        const auto colon = c.find(':');
        if (colon == std::string::npos) {
            names.push_back(c);
            declared.emplace_back();
            continue;
        }
        auto arity = parse_nonnegative(c.substr(colon + 1));
        if (!arity || *arity < 1) throw DataError(fmt::format("bad arity declaration '{}'", c));
        names.push_back(trim(c.substr(0, colon)));
        declared.push_back(arity);
    }
    for (const auto& name : names)
        if (name.empty()) throw DataError("empty variable name in header");

    const std::size_t n = names.size();
    std::vector<int> flat;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_commas(line);
        if (cells.size() != n)
            throw DataError(fmt::format("row {} has {} cells, header has {}", row, cells.size(), n));
        for (std::size_t j = 0; j < n; ++j) {
            auto v = parse_nonnegative(cells[j]);
            if (!v)
                throw ParseError(row, names[j],
                                 fmt::format("parse error at row {}, column {}: '{}' is not a nonnegative integer",
                                             row, names[j], cells[j]));
            flat.push_back(*v);
        }
    }
    if (row == 0) throw DataError("CSV has no data rows");

    DataMatrix values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < row; ++r)
        for (std::size_t j = 0; j < n; ++j)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = flat[r * n + j];

    std::vector<int> arities(n);
    for (std::size_t j = 0; j < n; ++j) {
        const int observed = values.col(static_cast<Eigen::Index>(j)).maxCoeff() + 1;
        if (declared[j]) {
            if (*declared[j] < observed)
                throw DataError(fmt::format("variable {} declared arity {} but value {} observed", names[j],
                                            *declared[j], observed - 1));
            arities[j] = *declared[j];
        } else {
            arities[j] = observed;
        }
    }
    return Dataset(std::move(names), std::move(arities), std::move(values));
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (int j = 0; j < data.num_vars(); ++j)
        out << (j ? "," : "") << data.name(j) << ':' << data.arity(j);
    out << '\n';
    for (int r = 0; r < data.num_rows(); ++r) {
        for (int j = 0; j < data.num_vars(); ++j) out << (j ? "," : "") << data.value(r, j);
        out << '\n';
    }
}

CountTable::CountTable(int child, std::vector<int> parents, int child_arity, std::int64_t num_configs,
                       std::vector<std::uint32_t> cells)
    : child_(child),
      parents_(std::move(parents)),
      child_arity_(child_arity),
      num_configs_(num_configs),
      cells_(std::move(cells)) {
    if (static_cast<std::int64_t>(cells_.size()) != num_configs_ * child_arity_)
        throw std::invalid_argument("count table size does not match q * r");
}

std::uint64_t CountTable::config_total(std::int64_t config) const {
    std::uint64_t s = 0;
    for (int x = 0; x < child_arity_; ++x) s += count(config, x);
    return s;
}

std::uint64_t CountTable::total() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

std::int64_t parent_config(const Dataset& data, int row, std::span<const int> parents) {
    std::int64_t u = 0, stride = 1;
    for (int p : parents) {
        u += stride * data.value(row, p);
        stride *= data.arity(p);
    }
    return u;
}

CountTable counts(const Dataset& data, int child, std::span<const int> parents) {
    const int n = data.num_vars();
    if (child < 0 || child >= n) throw std::invalid_argument(fmt::format("child id {} out of range", child));
    std::int64_t q = 1;
    for (int p : parents) {
        if (p < 0 || p >= n) throw std::invalid_argument(fmt::format("parent id {} out of range", p));
        if (p == child) throw std::invalid_argument("child listed among its own parents");
        q *= data.arity(p);
        if (q * data.arity(child) > kMaxCountCells)
            throw std::length_error("family has too many parent configurations for a count table");
    }
    const int r = data.arity(child);
    std::vector<std::uint32_t> cells(static_cast<std::size_t>(q * r), 0);
    const auto rows = static_cast<Eigen::Index>(data.num_rows());
    const auto& v = data.values();
    std::vector<std::int64_t> cell(static_cast<std::size_t>(rows));
    for (Eigen::Index m = 0; m < rows; ++m) cell[static_cast<std::size_t>(m)] = v(m, child);
    std::int64_t stride = r;
    for (int p : parents) {
        for (Eigen::Index m = 0; m < rows; ++m) cell[static_cast<std::size_t>(m)] += stride * v(m, p);
        stride *= data.arity(p);
    }
    for (auto c : cell) ++cells[static_cast<std::size_t>(c)];
    return CountTable(child, std::vector<int>(parents.begin(), parents.end()), r, q, std::move(cells));
}

}  // namespace bnorder
