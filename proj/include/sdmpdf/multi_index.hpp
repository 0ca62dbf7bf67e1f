#pragma once

#include <map>
#include <string>
#include <vector>

namespace sdmpdf {

// Integer lattice label of a basis function.  Entries are signed for the
// Fourier family and nonnegative for the Hermite family.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {}
  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

  int dim() const { return static_cast<int>(e_.size()); }
  int operator[](int i) const { return e_[i]; }
  const std::vector<int>& entries() const { return e_; }

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  MultiIndex operator-() const;

  // |k|^2 and |k|_inf, both as exact integers.
  long long squared_norm() const;
  int max_abs() const;
  // Sum of entries (Hermite total degree).
  int sum() const;

  // True if the first nonzero entry is positive (picks one member of each
  // conjugate pair {k, -k}).
  bool first_nonzero_positive() const;

  bool operator==(const MultiIndex& o) const { return e_ == o.e_; }
  bool operator!=(const MultiIndex& o) const { return e_ != o.e_; }
  // Lexicographic order, first coordinate most significant.
  bool operator<(const MultiIndex& o) const { return e_ < o.e_; }

  // "(k1,k2,...)" for messages; entries joined by sep for file names.
  std::string to_string() const;
  std::string join(char sep) const;

 private:
  std::vector<int> e_;
};

// Immutable, lexicographically sorted, duplicate-free list of multi-indices
// with O(log N) position lookup.  Positions are the canonical row/column
// order used by every matrix in the library.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<MultiIndex> indices);

  // All k with lo <= k_i <= hi, lexicographic order.
  static IndexSet cube(int dim, int lo, int hi);
  static IndexSet minkowski_sum(const IndexSet& a, const IndexSet& b);
  static IndexSet minkowski_difference(const IndexSet& a, const IndexSet& b);

  int size() const { return static_cast<int>(indices_.size()); }
  int dim() const { return indices_.empty() ? 0 : indices_.front().dim(); }
  const MultiIndex& operator[](int pos) const { return indices_[pos]; }
  // -1 if absent.
  int position(const MultiIndex& k) const;
  bool contains(const MultiIndex& k) const { return position(k) >= 0; }

  std::vector<MultiIndex>::const_iterator begin() const { return indices_.begin(); }
  std::vector<MultiIndex>::const_iterator end() const { return indices_.end(); }

 private:
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, int> pos_;
};

}  // namespace sdmpdf
