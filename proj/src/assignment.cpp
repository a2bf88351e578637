#include "crowdctl/assignment.hpp"

#include "crowdctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crowdctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DualSolution {
  Permutation row_to_col;
  VecX u;  // row potentials
  VecX v;  // column potentials
};

// Shortest augmenting path Hungarian method with potentials. Forbidden
// entries never become tight, so the sentinel never enters the arithmetic.
DualSolution hungarian(const CostMatrix& cost) {
  const Index n = cost.size();
  VecX u = VecX::Zero(n + 1);
  VecX v = VecX::Zero(n + 1);
  std::vector<Index> p(n + 1, 0);    // column -> row (1-based, 0 = free)
  std::vector<Index> way(n + 1, 0);

  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = p[j0];
      double delta = kInf;
      Index j1 = -1;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        if (!cost.is_infinite(i0 - 1, j - 1)) {
          const double cur = cost.values(i0 - 1, j - 1) - u(i0) - v(j);
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0 || !std::isfinite(delta)) {
        throw Error(ErrorCode::InfeasibleAssignment,
                    "every permutation uses an infinite cost entry");
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u(p[j]) += delta;
          v(j) -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  DualSolution out;
  out.row_to_col.assign(n, -1);
  for (Index j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  out.u = u.tail(n);
  out.v = v.tail(n);
  return out;
}

// Among perfect matchings in the bipartite graph of tight edges (all of which
// are optimal by complementary slackness), pick the lexicographically
// smallest. Rows are fixed in order; each row tries smaller columns and keeps
// one only if the remaining rows can still be matched (Kuhn augmentation).
class LexicographicMatcher {
 public:
  LexicographicMatcher(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& tight,
                       Permutation match)
      : tight_(tight), n_(tight.rows()), match_(std::move(match)),
        owner_(n_, -1), fixed_col_(n_, false), visited_(n_, false) {
    for (Index i = 0; i < n_; ++i) owner_[match_[i]] = static_cast<int>(i);
  }

  Permutation run() {
    for (Index i = 0; i < n_; ++i) {
      const int current = match_[i];
      for (int c = 0; c < current; ++c) {
        if (!tight_(i, c) || fixed_col_[c]) continue;
        const Permutation saved_match = match_;
        const std::vector<int> saved_owner = owner_;
        const int displaced = owner_[c];
        match_[i] = c;
        owner_[c] = static_cast<int>(i);
        owner_[current] = -1;
        match_[displaced] = -1;
        fixed_col_[c] = true;
        std::fill(visited_.begin(), visited_.end(), false);
        if (augment(displaced)) break;
        match_ = saved_match;
        owner_ = saved_owner;
        fixed_col_[c] = false;
      }
      fixed_col_[match_[i]] = true;
    }
    return match_;
  }

 private:
  bool augment(int row) {
    for (int col = 0; col < n_; ++col) {
      if (!tight_(row, col) || fixed_col_[col] || visited_[col]) continue;
      visited_[col] = true;
      if (owner_[col] < 0 || augment(owner_[col])) {
        match_[row] = col;
        owner_[col] = row;
        return true;
      }
    }
    return false;
  }

  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& tight_;
  Index n_;
  Permutation match_;
  std::vector<int> owner_;
  std::vector<char> fixed_col_;
  std::vector<char> visited_;
};

}  // namespace

double assignment_cost(const CostMatrix& cost, const Permutation& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (cost.is_infinite(static_cast<Index>(i), perm[i])) return kInf;
    total += cost.values(static_cast<Index>(i), perm[i]);
  }
  return total;
}

Assignment solve_assignment(const CostMatrix& cost) {
  const Index n = cost.size();
  if (cost.values.cols() != n) throw Error(ErrorCode::SizeMismatch, "cost matrix is not square");
  if (n == 0) return {{}, 0.0};

  const DualSolution dual = hungarian(cost);

  double scale = 1.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (!cost.is_infinite(i, j)) scale = std::max(scale, std::abs(cost.values(i, j)));
    }
  }
  const double tol = 1e-12 * scale;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> tight(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      tight(i, j) = !cost.is_infinite(i, j) &&
                    std::abs(cost.values(i, j) - dual.u(i) - dual.v(j)) <= tol;
    }
  }
  for (Index i = 0; i < n; ++i) tight(i, dual.row_to_col[i]) = true;

  Assignment out;
  out.permutation = LexicographicMatcher(tight, dual.row_to_col).run();
  out.total_cost = assignment_cost(cost, out.permutation);
  if (!std::isfinite(out.total_cost)) {
    throw Error(ErrorCode::InfeasibleAssignment, "assignment uses an infinite cost entry");
  }
  return out;
}

Assignment exhaustive_assignment(const CostMatrix& cost) {
  const Index n = cost.size();
  if (n > 10) throw Error(ErrorCode::TooLargeN, "exhaustive assignment is limited to n <= 10");
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best{perm, kInf};
  do {
    const double c = assignment_cost(cost, perm);
    if (c < best.total_cost) best = {perm, c};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!std::isfinite(best.total_cost)) {
    throw Error(ErrorCode::InfeasibleAssignment, "every permutation uses an infinite cost entry");
  }
  return best;
}

}  // namespace crowdctl
