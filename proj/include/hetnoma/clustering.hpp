// Copyright 2026 The hetnoma Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Gain-level partitioning and cluster formation by sequential weighted
// bipartite matching between consecutive levels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/config.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma {

struct Partition {
  int bs_id = 0;
  int level = 1;  // 1-based
  std::vector<RankedUe> members;
};

// Dense row-major matrix of edge weights.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  WeightMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) throw DomainError("ragged weight matrix");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Sense { maximize, minimize };

inline int cluster_count(std::size_t num_ues, int cluster_size) {
  if (cluster_size < 1) throw DomainError("cluster size must be >= 1");
  const auto k = static_cast<std::size_t>(cluster_size);
  return static_cast<int>((num_ues + k - 1) / k);
}

// Splits a descending-gain UE list into at most K_c levels of R_c members.
inline std::vector<Partition> partition_ues(std::span<const RankedUe> sorted,
                                            int cluster_size, int bs_id = 0) {
  std::vector<Partition> levels;
  if (sorted.empty()) return levels;
  const auto r = static_cast<std::size_t>(cluster_count(sorted.size(), cluster_size));
  for (std::size_t start = 0; start < sorted.size(); start += r) {
    Partition p;
    p.bs_id = bs_id;
    p.level = static_cast<int>(levels.size()) + 1;
    const std::size_t stop = std::min(start + r, sorted.size());
    p.members.assign(sorted.begin() + static_cast<std::ptrdiff_t>(start),
                     sorted.begin() + static_cast<std::ptrdiff_t>(stop));
    levels.push_back(std::move(p));
  }
  return levels;
}

// E(i, j) = gain of upper member i / gain of lower member j.
inline WeightMatrix edge_weights(const Partition& upper, const Partition& lower) {
  WeightMatrix w(upper.members.size(), lower.members.size());
  for (std::size_t i = 0; i < upper.members.size(); ++i) {
    for (std::size_t j = 0; j < lower.members.size(); ++j) {
      const double gu = upper.members[i].gain;
      const double gl = lower.members[j].gain;
      if (!(gu > 0.0) || !(gl > 0.0)) {
        throw DomainError("edge_weights: channel gains must be positive");
      }
      w(i, j) = gu / gl;
    }
  }
  return w;
}

namespace detail {

// Kuhn-style search for an alternating path that frees a column for `row`,
// restricted to tight edges and to rows that are not yet fixed.
inline bool rematch(std::size_t row, const std::vector<std::vector<char>>& tight,
                    std::vector<int>& col_owner, std::vector<int>& row_col,
                    std::vector<char>& visited, const std::vector<char>& fixed) {
  const std::size_t n = tight.size();
  for (std::size_t c = 0; c < n; ++c) {
    if (!tight[row][c] || visited[c]) continue;
    visited[c] = 1;
    const int owner = col_owner[c];
    if (owner < 0 ||
        (!fixed[static_cast<std::size_t>(owner)] &&
         rematch(static_cast<std::size_t>(owner), tight, col_owner, row_col,
                 visited, fixed))) {
      col_owner[c] = static_cast<int>(row);
      row_col[row] = static_cast<int>(c);
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Optimal injective row -> column matching of a rectangular weight matrix
// (Hungarian method on the zero-padded square matrix). Among all optimal
// matchings the lexicographically smallest one (rows in order, lowest column
// first) is returned. Unmatched rows map to -1.
inline std::vector<int> rectangular_assignment(const WeightMatrix& weights,
                                               Sense sense = Sense::maximize) {
  const std::size_t rows = weights.rows();
  const std::size_t cols = weights.cols();
  if (weights.empty()) return std::vector<int>(rows, -1);
  const std::size_t n = std::max(rows, cols);

  double scale = 0.0;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double w = weights(i, j);
      if (!std::isfinite(w)) throw DomainError("assignment weight is not finite");
      a[i][j] = sense == Sense::maximize ? -w : w;
      scale = std::max(scale, std::abs(w));
    }
  }

  // Shortest augmenting path Hungarian method with row/column potentials,
  // 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  // Every optimal matching uses only edges with zero reduced cost, so the
  // tie-break only needs to search the tight subgraph.
  const double tol = 1e-9 * (1.0 + scale);
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      tight[i][j] = std::abs(a[i][j] - u[i + 1] - v[j + 1]) <= tol;
    }
  }
  std::vector<int> row_col(n, -1), col_owner(n, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    row_col[p[j] - 1] = static_cast<int>(j - 1);
    col_owner[j - 1] = static_cast<int>(p[j] - 1);
  }
  std::vector<char> fixed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < static_cast<std::size_t>(row_col[i]); ++c) {
      if (!tight[i][c]) continue;
      auto trial_rows = row_col;
      auto trial_owner = col_owner;
      const auto displaced = static_cast<std::size_t>(trial_owner[c]);
      if (fixed[displaced]) continue;
      const auto freed = static_cast<std::size_t>(trial_rows[i]);
      trial_owner[freed] = -1;
      trial_owner[c] = static_cast<int>(i);
      trial_rows[i] = static_cast<int>(c);
      trial_rows[displaced] = -1;
      auto fixed_trial = fixed;
      fixed_trial[i] = 1;
      std::vector<char> visited(n, 0);
      visited[c] = 1;
      if (detail::rematch(displaced, tight, trial_owner, trial_rows, visited,
                          fixed_trial)) {
        row_col = std::move(trial_rows);
        col_owner = std::move(trial_owner);
        break;
      }
    }
    fixed[i] = 1;
  }

  std::vector<int> out(rows, -1);
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_col[i] < static_cast<int>(cols)) out[i] = row_col[i];
  }
  return out;
}

inline double assignment_weight(const WeightMatrix& w,
                                std::span<const int> matching) {
  double total = 0.0;
  for (std::size_t i = 0; i < matching.size(); ++i) {
    if (matching[i] >= 0) total += w(i, static_cast<std::size_t>(matching[i]));
  }
  return total;
}

// Gain-disparity edge weight between a chain tail and a candidate. The ratio
// is consumed as an assignment cost: the Munkres step minimizes it, which is
// the setting in which the r-th/r-th pairing of consecutive levels is
// optimal.
struct GainDisparity {
  static constexpr Sense sense = Sense::minimize;
  double operator()(const RankedUe& upper, const RankedUe& lower) const {
    if (!(upper.gain > 0.0) || !(lower.gain > 0.0)) {
      throw DomainError("gain disparity needs positive gains");
    }
    return upper.gain / lower.gain;
  }
};

// Grows clusters level by level: chains rooted in level 1 are matched to the
// members of the next level by rectangular assignment on weight_fn(tail,
// candidate). Chains left unmatched stop growing; candidates left unmatched
// (only possible if a level is larger than the previous one) start new chains.
template <typename WeightFn>
std::vector<Cluster> sequential_wmm(std::span<const Partition> partitions,
                                    WeightFn&& weight_fn, Sense sense) {
  std::vector<Cluster> chains;
  if (partitions.empty()) return chains;
  const int bs = partitions.front().bs_id;
  for (const auto& ue : partitions.front().members) {
    chains.push_back({bs, 0, {ue}});
  }
  for (std::size_t s = 1; s < partitions.size(); ++s) {
    const auto& next = partitions[s].members;
    std::vector<std::size_t> open;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (chains[c].members.size() == s) open.push_back(c);
    }
    WeightMatrix w(open.size(), next.size());
    for (std::size_t i = 0; i < open.size(); ++i) {
      for (std::size_t j = 0; j < next.size(); ++j) {
        w(i, j) = weight_fn(chains[open[i]].members.back(), next[j]);
      }
    }
    const auto match = rectangular_assignment(w, sense);
    std::vector<char> taken(next.size(), 0);
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (match[i] < 0) continue;
      const auto j = static_cast<std::size_t>(match[i]);
      chains[open[i]].members.push_back(next[j]);
      taken[j] = 1;
    }
    for (std::size_t j = 0; j < next.size(); ++j) {
      if (!taken[j]) chains.push_back({bs, 0, {next[j]}});
    }
  }
  for (std::size_t r = 0; r < chains.size(); ++r) {
    chains[r].index = static_cast<int>(r);
  }
  return chains;
}

template <typename WeightFn>
std::vector<Cluster> sequential_wmm(std::span<const Partition> partitions,
                                    WeightFn&& weight_fn) {
  return sequential_wmm(partitions, std::forward<WeightFn>(weight_fn),
                        Sense::maximize);
}

inline std::vector<Cluster> sequential_wmm(std::span<const Partition> partitions) {
  return sequential_wmm(partitions, GainDisparity{}, GainDisparity::sense);
}

// Fast path: cluster r takes the r-th member of every level.
inline std::vector<Cluster> index_clustering(std::span<const Partition> partitions) {
  std::vector<Cluster> clusters;
  if (partitions.empty()) return clusters;
  const int bs = partitions.front().bs_id;
  const std::size_t r_count = partitions.front().members.size();
  for (std::size_t r = 0; r < r_count; ++r) {
    Cluster c{bs, static_cast<int>(r), {}};
    for (const auto& level : partitions) {
      if (r < level.members.size()) c.members.push_back(level.members[r]);
    }
    clusters.push_back(std::move(c));
  }
  return clusters;
}

// True when both clusterings group the same UEs together, regardless of
// cluster order and numbering.
inline bool same_cluster_sets(std::span<const Cluster> a, std::span<const Cluster> b) {
  const auto canon = [](std::span<const Cluster> cs) {
    std::vector<std::vector<int>> sets;
    for (const auto& c : cs) {
      std::vector<int> ids;
      for (const auto& m : c.members) ids.push_back(m.id);
      std::sort(ids.begin(), ids.end());
      sets.push_back(std::move(ids));
    }
    std::sort(sets.begin(), sets.end());
    return sets;
  };
  return canon(a) == canon(b);
}

inline std::vector<Cluster> cluster_bs(const NetworkScenario& sc, int bs,
                                       int cluster_size, ClusteringMethod method) {
  const auto ues = sc.served_by(bs);
  const auto levels = partition_ues(ues, cluster_size, bs);
  return method == ClusteringMethod::wmm ? sequential_wmm(levels)
                                         : index_clustering(levels);
}

inline void write_clusters_csv(std::ostream& os,
                               std::span<const Cluster> clusters) {
  os << "bs_id,cluster_index,rank,ue_id,gain\n";
  const auto old = os.precision(17);
  for (const auto& c : clusters) {
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      os << c.bs_id << ',' << c.index << ',' << i + 1 << ','
         << c.members[i].id << ',' << c.members[i].gain << '\n';
    }
  }
  os.precision(old);
}

}  // namespace hetnoma
