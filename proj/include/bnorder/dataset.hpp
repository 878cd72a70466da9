#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bnorder {

/// Observations, M x n. Column-major so per-variable scans are contiguous.
using DataMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

/// Fully observed discrete data: M rows over n variables, x_i in [0, r_i).
class Dataset {
public:
    /// Throws DataError if any invariant is violated.
    Dataset(std::vector<std::string> names, std::vector<int> arities, DataMatrix values);

    int num_vars() const { return static_cast<int>(arities_.size()); }
    int num_rows() const { return static_cast<int>(values_.rows()); }
    int arity(int var) const { return arities_[static_cast<std::size_t>(var)]; }
    const std::vector<int>& arities() const { return arities_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int var) const { return names_[static_cast<std::size_t>(var)]; }
    int value(int row, int var) const { return values_(row, var); }
    const DataMatrix& values() const { return values_; }

    /// New dataset made of the given rows (repeats allowed), same schema.
    Dataset select_rows(std::span<const int> rows) const;

private:
    std::vector<std::string> names_;
    std::vector<int> arities_;
    DataMatrix values_;
};

/// Parses the CSV format: header cells `name` or `name:arity`, body cells
/// nonnegative integers. Undeclared arities are inferred as max + 1.
Dataset parse_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

/// Writes the header with declared arities so a round trip preserves them.
void write_csv(std::ostream& out, const Dataset& data);

/// Sufficient statistics N_{ux} for one family.
///
/// The parent configuration index u is mixed radix over `parents` in the given
/// order, first parent least significant. Cells are stored at u * r + x.
class CountTable {
public:
    CountTable(int child, std::vector<int> parents, int child_arity, std::int64_t num_configs,
               std::vector<std::uint32_t> cells);

    int child() const { return child_; }
    const std::vector<int>& parents() const { return parents_; }
    int child_arity() const { return child_arity_; }
    std::int64_t num_configs() const { return num_configs_; }
    std::uint32_t count(std::int64_t config, int x) const {
        return cells_[static_cast<std::size_t>(config * child_arity_ + x)];
    }
    std::uint64_t config_total(std::int64_t config) const;
    std::uint64_t total() const;
    std::span<const std::uint32_t> cells() const { return cells_; }

private:
    int child_;
    std::vector<int> parents_;
    int child_arity_;
    std::int64_t num_configs_;
    std::vector<std::uint32_t> cells_;
};

/// Upper bound on q * r for a single count table.
inline constexpr std::int64_t kMaxCountCells = std::int64_t{1} << 26;

/// Mixed-radix index of the parent values in `row` (first parent least significant).
std::int64_t parent_config(const Dataset& data, int row, std::span<const int> parents);

/// Tallies N_{ux}. Throws std::invalid_argument if child is among parents or an
/// id is out of range, std::length_error if q * r exceeds kMaxCountCells.
CountTable counts(const Dataset& data, int child, std::span<const int> parents);

}  // namespace bnorder
