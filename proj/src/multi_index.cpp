#include "sdmpdf/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sdmpdf {

namespace {
void check_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("multi-index dimension mismatch");
}
}  // namespace

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  check_same_dim(*this, o);
  std::vector<int> r(e_.size());
  for (size_t i = 0; i < e_.size(); ++i) r[i] = e_[i] + o.e_[i];
  return MultiIndex(std::move(r));
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  check_same_dim(*this, o);
  std::vector<int> r(e_.size());
  for (size_t i = 0; i < e_.size(); ++i) r[i] = e_[i] - o.e_[i];
  return MultiIndex(std::move(r));
}

MultiIndex MultiIndex::operator-() const {
  std::vector<int> r(e_.size());
  for (size_t i = 0; i < e_.size(); ++i) r[i] = -e_[i];
  return MultiIndex(std::move(r));
}

long long MultiIndex::squared_norm() const {
  long long s = 0;
  for (int v : e_) s += static_cast<long long>(v) * v;
  return s;
}

int MultiIndex::max_abs() const {
  int m = 0;
  for (int v : e_) m = std::max(m, std::abs(v));
  return m;
}

int MultiIndex::sum() const {
  int s = 0;
  for (int v : e_) s += v;
  return s;
}

bool MultiIndex::first_nonzero_positive() const {
  for (int v : e_) {
    if (v != 0) return v > 0;
  }
  return false;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < e_.size(); ++i) {
    if (i) os << ',';
    os << e_[i];
  }
  os << ')';
  return os.str();
}

std::string MultiIndex::join(char sep) const {
  std::ostringstream os;
  for (size_t i = 0; i < e_.size(); ++i) {
    if (i) os << sep;
    os << e_[i];
  }
  return os.str();
}

IndexSet::IndexSet(std::vector<MultiIndex> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  for (size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i].dim() != indices_.front().dim())
      throw std::invalid_argument("index set entries must share one dimension");
    pos_[indices_[i]] = static_cast<int>(i);
  }
}

IndexSet IndexSet::cube(int dim, int lo, int hi) {
  if (dim <= 0 || lo > hi) throw std::invalid_argument("bad cube bounds");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<size_t>(std::pow(hi - lo + 1, dim)));
  std::vector<int> cur(dim, lo);
  while (true) {
    out.emplace_back(cur);
    int d = dim - 1;
    while (d >= 0 && cur[d] == hi) cur[d--] = lo;
    if (d < 0) break;
    ++cur[d];
  }
  return IndexSet(std::move(out));
}

IndexSet IndexSet::minkowski_sum(const IndexSet& a, const IndexSet& b) {
  std::set<MultiIndex> acc;
  for (const auto& x : a)
    for (const auto& y : b) acc.insert(x + y);
  return IndexSet(std::vector<MultiIndex>(acc.begin(), acc.end()));
}

IndexSet IndexSet::minkowski_difference(const IndexSet& a, const IndexSet& b) {
  std::set<MultiIndex> acc;
  for (const auto& x : a)
    for (const auto& y : b) acc.insert(x - y);
  return IndexSet(std::vector<MultiIndex>(acc.begin(), acc.end()));
}

int IndexSet::position(const MultiIndex& k) const {
  auto it = pos_.find(k);
  return it == pos_.end() ? -1 : it->second;
}

}  // namespace sdmpdf
