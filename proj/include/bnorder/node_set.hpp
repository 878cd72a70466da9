#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace bnorder {

/// Maximum number of variables a NodeSet can address.
inline constexpr int kMaxNodes = 64;

/// A set of variable ids in [0, 64), stored as a bit mask.
///
/// Iteration and `members()` yield ids in ascending order, which is also the
/// canonical ordering of parent sets throughout the library.
class NodeSet {
public:
    constexpr NodeSet() = default;
    constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr NodeSet single(int id) { return NodeSet(std::uint64_t{1} << id); }
    static NodeSet of(const std::vector<int>& ids) {
        NodeSet s;
        for (int id : ids) s.insert(id);
        return s;
    }
    /// {0, 1, ..., n-1}
    static constexpr NodeSet range(int n) {
        return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(int id) const { return (bits_ >> id) & 1u; }
    constexpr bool contains_all(NodeSet other) const { return (other.bits_ & ~bits_) == 0; }
    constexpr bool intersects(NodeSet other) const { return (bits_ & other.bits_) != 0; }

    constexpr void insert(int id) { bits_ |= std::uint64_t{1} << id; }
    constexpr void erase(int id) { bits_ &= ~(std::uint64_t{1} << id); }

    constexpr NodeSet with(int id) const { return NodeSet(bits_ | (std::uint64_t{1} << id)); }
    constexpr NodeSet without(int id) const { return NodeSet(bits_ & ~(std::uint64_t{1} << id)); }

    /// Largest member; -1 when empty.
    constexpr int max() const { return bits_ ? 63 - std::countl_zero(bits_) : -1; }

    std::vector<int> members() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
        return out;
    }

    /// Comma-separated ascending member list ("" for the empty set).
    std::string to_string() const {
        std::string s;
        for (int id : members()) {
            if (!s.empty()) s += ',';
            s += std::to_string(id);
        }
        return s;
    }

    friend constexpr NodeSet operator|(NodeSet a, NodeSet b) { return NodeSet(a.bits_ | b.bits_); }
    friend constexpr NodeSet operator&(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & b.bits_); }
    friend constexpr NodeSet operator-(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(NodeSet a, NodeSet b) = default;

    /// Lexicographic order on the ascending member lists.
    friend bool lex_less(NodeSet a, NodeSet b) {
        std::uint64_t x = a.bits_, y = b.bits_;
        while (x && y) {
            int ax = std::countr_zero(x), by = std::countr_zero(y);
            if (ax != by) return ax < by;
            x &= x - 1;
            y &= y - 1;
        }
        return x == 0 && y != 0;
    }

private:
    std::uint64_t bits_ = 0;
};

}  // namespace bnorder
