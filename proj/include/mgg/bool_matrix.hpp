#pragma once

// Boolean vectors and square matrices indexed by named element universes.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "mgg/error.hpp"

namespace mgg {

/// Opaque element identity. Equality and ordering use `id` only; `label` is
/// for display ("1:Mach").
struct ElemId {
  std::string id;
  std::string label;

  ElemId() = default;
  ElemId(std::string i) : id(std::move(i)) {}  // NOLINT(google-explicit-constructor)
  ElemId(const char* i) : id(i) {}             // NOLINT(google-explicit-constructor)
  ElemId(std::string i, std::string l) : id(std::move(i)), label(std::move(l)) {}

  const std::string& display() const { return label.empty() ? id : label; }

  friend bool operator==(const ElemId& a, const ElemId& b) { return a.id == b.id; }
  friend std::strong_ordering operator<=>(const ElemId& a, const ElemId& b) {
    return a.id <=> b.id;
  }
};

inline std::ostream& operator<<(std::ostream& os, const ElemId& e) { return os << e.id; }

/// Ordered list of distinct element ids.
class Universe {
public:
  Universe() = default;
  explicit Universe(std::vector<ElemId> elems) {
    for (auto& e : elems) push_back(std::move(e));
  }

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const ElemId& operator[](std::size_t i) const { return elems_[i]; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<ElemId>& elements() const { return elems_; }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t at(const std::string& id) const {
    auto i = find(id);
    if (!i) throw AlignmentError("element '" + id + "' is not in the universe");
    return *i;
  }

  /// Appends `e`; duplicates are an error.
  std::size_t push_back(ElemId e) {
    if (contains(e.id)) throw AlignmentError("duplicate element '" + e.id + "' in universe");
    index_.emplace(e.id, elems_.size());
    elems_.push_back(std::move(e));
    return elems_.size() - 1;
  }

  friend bool operator==(const Universe& a, const Universe& b) { return a.elems_ == b.elems_; }

private:
  std::vector<ElemId> elems_;
  std::unordered_map<std::string, std::size_t> index_;
};

class BoolVector {
public:
  BoolVector() = default;
  explicit BoolVector(Universe u) : universe_(std::move(u)), bits_(universe_.size(), 0) {}
  BoolVector(Universe u, const std::vector<int>& bits) : BoolVector(std::move(u)) {
    if (bits.size() != universe_.size()) throw AlignmentError("bit count does not match universe");
    for (std::size_t i = 0; i < bits.size(); ++i) bits_[i] = bits[i] != 0;
  }

  static BoolVector ones(Universe u) {
    BoolVector v(std::move(u));
    std::fill(v.bits_.begin(), v.bits_.end(), 1);
    return v;
  }

  const Universe& universe() const { return universe_; }
  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool get(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool b = true) { bits_[i] = b; }
  bool get(const std::string& id) const { return get(universe_.at(id)); }
  void set(const std::string& id, bool b = true) { set(universe_.at(id), b); }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  friend bool operator==(const BoolVector& a, const BoolVector& b) {
    return a.universe_ == b.universe_ && a.bits_ == b.bits_;
  }

private:
  Universe universe_;
  std::vector<std::uint8_t> bits_;
};

/// Square Boolean matrix; rows and columns share one universe.
class BoolMatrix {
public:
  BoolMatrix() = default;
  explicit BoolMatrix(Universe u)
      : universe_(std::move(u)), bits_(universe_.size() * universe_.size(), 0) {}
  BoolMatrix(Universe u, const std::vector<std::vector<int>>& rows) : BoolMatrix(std::move(u)) {
    if (rows.size() != size()) throw AlignmentError("row count does not match universe");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != size()) throw AlignmentError("column count does not match universe");
      for (std::size_t j = 0; j < rows[i].size(); ++j) set(i, j, rows[i][j] != 0);
    }
  }

  static BoolMatrix identity(Universe u) {
    BoolMatrix m(std::move(u));
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i, i);
    return m;
  }
  static BoolMatrix ones(Universe u) {
    BoolMatrix m(std::move(u));
    std::fill(m.bits_.begin(), m.bits_.end(), 1);
    return m;
  }

  const Universe& universe() const { return universe_; }
  std::size_t size() const { return universe_.size(); }
  bool get(std::size_t i, std::size_t j) const { return bits_[i * size() + j] != 0; }
  void set(std::size_t i, std::size_t j, bool b = true) { bits_[i * size() + j] = b; }
  bool get(const std::string& a, const std::string& b) const {
    return get(universe_.at(a), universe_.at(b));
  }
  void set(const std::string& a, const std::string& b, bool v = true) {
    set(universe_.at(a), universe_.at(b), v);
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }
  bool is_zero() const { return count() == 0; }

  /// Set positions as (row, col) index pairs in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> entries() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (get(i, j)) out.emplace_back(i, j);
    return out;
  }

  friend bool operator==(const BoolMatrix& a, const BoolMatrix& b) {
    return a.universe_ == b.universe_ && a.bits_ == b.bits_;
  }

private:
  Universe universe_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void require_same(const Universe& a, const Universe& b, const char* op) {
  if (!(a == b))
    throw AlignmentError(std::string(op) +
                         ": operands have different universes; complete them first");
}

template <class F>
BoolMatrix zip(const BoolMatrix& a, const BoolMatrix& b, const char* op, F f) {
  require_same(a.universe(), b.universe(), op);
  BoolMatrix out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out.set(i, j, f(a.get(i, j), b.get(i, j)));
  return out;
}

template <class F>
BoolVector zip(const BoolVector& a, const BoolVector& b, const char* op, F f) {
  require_same(a.universe(), b.universe(), op);
  BoolVector out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, f(a[i], b[i]));
  return out;
}

}  // namespace detail

inline BoolMatrix operator&(const BoolMatrix& a, const BoolMatrix& b) {
  return detail::zip(a, b, "and", [](bool x, bool y) { return x && y; });
}
inline BoolMatrix operator|(const BoolMatrix& a, const BoolMatrix& b) {
  return detail::zip(a, b, "or", [](bool x, bool y) { return x || y; });
}
inline BoolMatrix operator^(const BoolMatrix& a, const BoolMatrix& b) {
  return detail::zip(a, b, "xor", [](bool x, bool y) { return x != y; });
}
inline BoolMatrix operator~(const BoolMatrix& a) {
  BoolMatrix out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out.set(i, j, !a.get(i, j));
  return out;
}
inline BoolVector operator&(const BoolVector& a, const BoolVector& b) {
  return detail::zip(a, b, "and", [](bool x, bool y) { return x && y; });
}
inline BoolVector operator|(const BoolVector& a, const BoolVector& b) {
  return detail::zip(a, b, "or", [](bool x, bool y) { return x || y; });
}
inline BoolVector operator^(const BoolVector& a, const BoolVector& b) {
  return detail::zip(a, b, "xor", [](bool x, bool y) { return x != y; });
}
inline BoolVector operator~(const BoolVector& a) {
  BoolVector out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, !a[i]);
  return out;
}

inline BoolMatrix transpose(const BoolMatrix& a) {
  BoolMatrix out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out.set(j, i, a.get(i, j));
  return out;
}

/// c_i = OR_j (a_ij AND b_j)
inline BoolVector bool_product(const BoolMatrix& a, const BoolVector& b) {
  detail::require_same(a.universe(), b.universe(), "bool_product");
  BoolVector out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool acc = false;
    for (std::size_t j = 0; j < a.size() && !acc; ++j) acc = a.get(i, j) && b[j];
    out.set(i, acc);
  }
  return out;
}

/// m_ij = a_i AND b_j
inline BoolMatrix tensor(const BoolVector& a, const BoolVector& b) {
  detail::require_same(a.universe(), b.universe(), "tensor");
  BoolMatrix out(a.universe());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out.set(i, j, a[i] && b[j]);
  return out;
}

/// OR of all components; false on the empty universe.
inline bool norm1(const BoolVector& v) { return v.count() != 0; }

// ---------------------------------------------------------------------------
// Completion

/// Maps element ids of the operands onto canonical ids of the completed
/// universe. Ids absent from the map keep their own name.
using Identification = std::map<std::string, std::string>;

using Operand = std::variant<BoolMatrix, BoolVector>;

inline const Universe& universe_of(const Operand& o) {
  return std::visit([](const auto& x) -> const Universe& { return x.universe(); }, o);
}

inline std::string canonical_id(const Identification& ident, const std::string& id) {
  auto it = ident.find(id);
  return it == ident.end() ? id : it->second;
}

/// Union universe of the given universes under `ident`, in order of first
/// appearance. Throws if one universe has two elements sent to the same id.
inline Universe completed_universe(const std::vector<const Universe*>& parts,
                                   const Identification& ident) {
  Universe out;
  for (const Universe* u : parts) {
    std::map<std::string, std::string> seen;
    for (const ElemId& e : *u) {
      std::string c = canonical_id(ident, e.id);
      auto [it, fresh] = seen.emplace(c, e.id);
      if (!fresh)
        throw AlignmentError("identification is not injective: '" + it->second + "' and '" +
                             e.id + "' both map to '" + c + "'");
      if (!out.contains(c)) out.push_back(ElemId(c, e.label));
    }
  }
  return out;
}

/// Re-indexes `m` into `target`; missing positions are zero.
inline BoolMatrix embed(const BoolMatrix& m, const Universe& target, const Identification& ident) {
  BoolMatrix out(target);
  std::vector<std::size_t> pos(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) pos[i] = target.at(canonical_id(ident, m.universe()[i].id));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.get(i, j)) out.set(pos[i], pos[j]);
  return out;
}

inline BoolVector embed(const BoolVector& v, const Universe& target, const Identification& ident) {
  BoolVector out(target);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) out.set(target.at(canonical_id(ident, v.universe()[i].id)));
  return out;
}

/// Aligns all operands onto one universe. Added rows/columns are zero.
inline std::vector<Operand> complete(const std::vector<Operand>& items,
                                     const Identification& ident = {}) {
  std::vector<const Universe*> parts;
  for (const auto& it : items) parts.push_back(&universe_of(it));
  Universe u = completed_universe(parts, ident);
  std::vector<Operand> out;
  out.reserve(items.size());
  for (const auto& it : items)
    out.push_back(std::visit([&](const auto& x) -> Operand { return embed(x, u, ident); }, it));
  return out;
}

}  // namespace mgg
