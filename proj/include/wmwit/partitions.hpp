// Copyright 2026 The wmwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Entanglement structures: combinations of modes, set partitions of the
// mode indices, and the block-size classes used to count separable pairs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wmwit/error.hpp"

namespace wmwit {

using ModeMask = std::uint64_t;

/// Non-empty set of 1-based mode indices, kept sorted.
class Combination {
 public:
  Combination() = default;
  Combination(std::initializer_list<int> members) : Combination(std::vector<int>(members)) {}
  explicit Combination(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (members_.empty()) throw DomainError("combination must be non-empty");
    if (members_.front() < 1 || members_.back() > 63)
      throw DomainError("combination members must lie in 1..63");
  }

  static Combination from_mask(ModeMask mask) {
    std::vector<int> m;
    for (int i = 0; i < 64; ++i)
      if (mask & (ModeMask{1} << i)) m.push_back(i + 1);
    return Combination(std::move(m));
  }

  const std::vector<int>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(int mode) const { return std::binary_search(members_.begin(), members_.end(), mode); }

  /// Bit i-1 set for each member i.
  ModeMask mask() const {
    ModeMask m = 0;
    for (int i : members_) m |= ModeMask{1} << (i - 1);
    return m;
  }

  bool within(int n_modes) const { return members_.back() <= n_modes; }

  /// "[1 2 3]"
  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < members_.size(); ++i) os << (i ? " " : "") << members_[i];
    os << ']';
    return os.str();
  }

  friend bool operator==(const Combination&, const Combination&) = default;
  friend auto operator<=>(const Combination&, const Combination&) = default;

 private:
  std::vector<int> members_;
};

/// Multiset of block sizes, sorted descending.
class ClassSignature {
 public:
  ClassSignature() = default;
  ClassSignature(std::initializer_list<int> sizes) : ClassSignature(std::vector<int>(sizes)) {}
  explicit ClassSignature(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DomainError("class signature must have at least one block");
    for (int s : sizes_)
      if (s < 1) throw DomainError("block sizes must be >= 1");
    std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int n_modes() const {
    int n = 0;
    for (int s : sizes_) n += s;
    return n;
  }
  int largest() const { return sizes_.front(); }

  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < sizes_.size(); ++i) os << (i ? "," : "") << sizes_[i];
    os << '}';
    return os.str();
  }

  friend bool operator==(const ClassSignature&, const ClassSignature&) = default;
  friend auto operator<=>(const ClassSignature&, const ClassSignature&) = default;

 private:
  std::vector<int> sizes_;
};

/// A set partition of {1..N}. Blocks are ordered by their smallest member.
class Structure {
 public:
  Structure() = default;
  Structure(int n_modes, std::vector<Combination> blocks) : n_modes_(n_modes), blocks_(std::move(blocks)) {
    std::sort(blocks_.begin(), blocks_.end(),
              [](const Combination& a, const Combination& b) { return a.members().front() < b.members().front(); });
    ModeMask seen = 0;
    for (const auto& b : blocks_) {
      if (!b.within(n_modes_)) throw DomainError("structure block references a mode beyond N");
      if (seen & b.mask()) throw DomainError("structure blocks must be pairwise disjoint");
      seen |= b.mask();
    }
    const ModeMask all = n_modes_ >= 64 ? ~ModeMask{0} : (ModeMask{1} << n_modes_) - 1;
    if (seen != all) throw DomainError("structure blocks must cover every mode");
  }

  /// The single-block structure {1..N}.
  static Structure whole(int n_modes) {
    std::vector<int> all(n_modes);
    for (int i = 0; i < n_modes; ++i) all[i] = i + 1;
    return Structure(n_modes, {Combination(std::move(all))});
  }

  int n_modes() const { return n_modes_; }
  const std::vector<Combination>& blocks() const { return blocks_; }

  ClassSignature signature() const {
    std::vector<int> s;
    for (const auto& b : blocks_) s.push_back(static_cast<int>(b.size()));
    return ClassSignature(std::move(s));
  }

  int largest_block() const { return signature().largest(); }

  /// "[1 2 3][4 5][6]"
  std::string to_string() const {
    std::string out;
    for (const auto& b : blocks_) out += b.to_string();
    return out;
  }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  int n_modes_ = 0;
  std::vector<Combination> blocks_;
};

/// Parses the bracketed rendering produced by Structure::to_string.
inline Structure parse_structure(int n_modes, const std::string& text) {
  std::vector<Combination> blocks;
  std::vector<int> current;
  bool open = false;
  std::string number;
  auto flush = [&] {
    if (!number.empty()) {
      current.push_back(std::stoi(number));
      number.clear();
    }
  };
  for (char ch : text) {
    if (ch == '[') {
      if (open) throw DomainError("nested '[' in structure text");
      open = true;
    } else if (ch == ']') {
      if (!open) throw DomainError("unbalanced ']' in structure text");
      flush();
      blocks.emplace_back(current);
      current.clear();
      open = false;
    } else if (ch >= '0' && ch <= '9') {
      number.push_back(ch);
    } else if (ch == ' ' || ch == ',') {
      flush();
    } else {
      throw DomainError(std::string("unexpected character '") + ch + "' in structure text");
    }
  }
  if (open) throw DomainError("unterminated block in structure text");
  return Structure(n_modes, std::move(blocks));
}

/// Bell number B(n) as a double (exact up to n = 25).
inline double bell_number(int n) {
  std::vector<double> row{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> next{row.back()};
    for (double v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

inline constexpr int kDefaultEnumerationCap = 10;

/// Every set partition of {1..N} whose blocks all have size <= max_block,
/// in lexicographic order of restricted growth strings.
inline std::vector<Structure> enumerate_structures(int n_modes, int max_block, int cap = kDefaultEnumerationCap) {
  if (n_modes < 1) throw DomainError("enumerate_structures: N must be >= 1");
  if (max_block < 1 || max_block > n_modes) throw DomainError("enumerate_structures: need 1 <= max_block <= N");
  if (n_modes > cap) {
    std::ostringstream os;
    os << "enumerate_structures: N = " << n_modes << " exceeds the enumeration cap " << cap
       << " (up to " << bell_number(n_modes) << " structures)";
    throw LimitError(os.str());
  }

  std::vector<Structure> out;
  std::vector<int> label(n_modes, 0);
  std::vector<int> block_size(n_modes + 1, 0);

  std::function<void(int, int)> recurse = [&](int pos, int n_blocks) {
    if (pos == n_modes) {
      std::vector<std::vector<int>> members(n_blocks);
      for (int i = 0; i < n_modes; ++i) members[label[i]].push_back(i + 1);
      std::vector<Combination> blocks;
      blocks.reserve(n_blocks);
      for (auto& m : members) blocks.emplace_back(std::move(m));
      out.emplace_back(n_modes, std::move(blocks));
      return;
    }
    for (int b = 0; b <= n_blocks; ++b) {
      if (block_size[b] == max_block) continue;
      label[pos] = b;
      ++block_size[b];
      recurse(pos + 1, b == n_blocks ? n_blocks + 1 : n_blocks);
      --block_size[b];
    }
  };
  recurse(0, 0);
  return out;
}

/// True iff merging any two blocks would exceed M modes.
inline bool is_irreducible(const ClassSignature& sig, int max_entangled) {
  const auto& s = sig.sizes();
  if (s.front() > max_entangled) throw DomainError("is_irreducible: signature has a block larger than M");
  // sizes are sorted descending, so the two smallest decide
  if (s.size() < 2) return true;
  return s[s.size() - 1] + s[s.size() - 2] > max_entangled;
}

/// Number of mode pairs split across different blocks.
inline std::int64_t n_sep(const ClassSignature& sig) {
  const std::int64_t n = sig.n_modes();
  std::int64_t inseparable = 0;
  for (int b : sig.sizes()) inseparable += std::int64_t{b} * (b - 1) / 2;
  return n * (n - 1) / 2 - inseparable;
}

/// Irreducible signatures of N under constraint M, lexicographically largest
/// first. At most one block may have size <= M/2, which keeps the search small
/// even for N in the hundreds.
inline std::vector<ClassSignature> irreducible_signatures(int n_modes, int max_entangled) {
  if (max_entangled < 1 || max_entangled >= n_modes)
    throw DomainError("irreducible_signatures: need 1 <= M < N");
  std::vector<ClassSignature> out;
  std::vector<int> parts;
  std::function<void(int, int)> recurse = [&](int remaining, int max_part) {
    if (remaining == 0) {
      out.emplace_back(parts);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      if (!parts.empty() && parts.back() + p <= max_entangled) break;  // smaller p only worse
      const bool small = 2 * p <= max_entangled;
      if (small && p != remaining) continue;  // a small block must be the last one
      parts.push_back(p);
      recurse(remaining - p, p);
      parts.pop_back();
    }
  };
  recurse(n_modes, max_entangled);
  return out;
}

struct SeparablePairMax {
  std::int64_t value = 0;
  ClassSignature argmax;  // lexicographically largest maximizer
};

/// Maximal number of separable pairs over irreducible classes with blocks <= M.
inline SeparablePairMax n_sep_max(int n_modes, int max_entangled) {
  SeparablePairMax best;
  bool first = true;
  for (auto& sig : irreducible_signatures(n_modes, max_entangled)) {
    const auto v = n_sep(sig);
    if (first || v > best.value || (v == best.value && sig > best.argmax)) {
      best.value = v;
      best.argmax = sig;
      first = false;
    }
  }
  return best;
}

/// N^2/4 (even N) or (N^2-1)/4 (odd N): the M = N-1 value.
inline std::int64_t n_sep_max_genuine(int n_modes) {
  const std::int64_t n = n_modes;
  return (n * n) / 4;
}

}  // namespace wmwit
