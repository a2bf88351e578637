#include "crowdctl/region.hpp"

#include <cmath>
#include <sstream>

namespace crowdctl {

namespace {

// Dense tableau simplex for: maximize c.x subject to A x <= b, x >= 0.
// Bland's rule on ties; phase one introduces an auxiliary column when b has
// negative entries.
class SimplexSolver {
 public:
  SimplexSolver(const MatX& a, const VecX& b, const VecX& c)
      : m_(a.rows()), n_(a.cols()), basis_(m_), nonbasis_(n_ + 1), table_(m_ + 2, n_ + 2) {
    table_.setZero();
    table_.topLeftCorner(m_, n_) = a;
    for (Index i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      table_(i, n_) = -1.0;
      table_(i, n_ + 1) = b(i);
    }
    for (Index j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      table_(m_, j) = -c(j);
    }
    nonbasis_[n_] = -1;
    table_(m_ + 1, n_) = 1.0;
  }

  // Returns the optimum, -inf when infeasible, +inf when unbounded.
  double solve(VecX& x) {
    Index r = 0;
    for (Index i = 1; i < m_; ++i) {
      if (table_(i, n_ + 1) < table_(r, n_ + 1)) r = i;
    }
    if (table_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!run(1) || table_(m_ + 1, n_ + 1) < -kEps) {
        return -std::numeric_limits<double>::infinity();
      }
      for (Index i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        Index s = -1;
        for (Index j = 0; j <= n_; ++j) {
          if (s == -1 || table_(i, j) < table_(i, s) ||
              (table_(i, j) == table_(i, s) && nonbasis_[j] < nonbasis_[s])) {
            s = j;
          }
        }
        pivot(i, s);
      }
    }
    if (!run(2)) return std::numeric_limits<double>::infinity();
    x = VecX::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x(basis_[i]) = table_(i, n_ + 1);
    }
    return table_(m_, n_ + 1);
  }

 private:
  static constexpr double kEps = 1e-12;

  void pivot(Index r, Index s) {
    const double inv = 1.0 / table_(r, s);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      for (Index j = 0; j < n_ + 2; ++j) {
        if (j != s) table_(i, j) -= table_(r, j) * table_(i, s) * inv;
      }
    }
    for (Index j = 0; j < n_ + 2; ++j) {
      if (j != s) table_(r, j) *= inv;
    }
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i != r) table_(i, s) *= -inv;
    }
    table_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const Index row = phase == 1 ? m_ + 1 : m_;
    while (true) {
      Index s = -1;
      for (Index j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || table_(row, j) < table_(row, s) ||
            (table_(row, j) == table_(row, s) && nonbasis_[j] < nonbasis_[s])) {
          s = j;
        }
      }
      if (table_(row, s) > -kEps) return true;
      Index r = -1;
      for (Index i = 0; i < m_; ++i) {
        if (table_(i, s) < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = table_(i, n_ + 1) / table_(i, s);
        const double rhs = table_(r, n_ + 1) / table_(r, s);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  Index m_, n_;
  std::vector<Index> basis_, nonbasis_;
  MatX table_;
};

}  // namespace

std::optional<ChebyshevBall> chebyshev_ball(const ConvexRegion& region, double radius_cap) {
  // Variables (c+, c-, r) >= 0 with center c = c+ - c-.
  const Index d = region.dimension();
  const auto& hs = region.halfspaces();
  const Index m = static_cast<Index>(hs.size());
  MatX a = MatX::Zero(m + 1, 2 * d + 1);
  VecX b(m + 1);
  for (Index k = 0; k < m; ++k) {
    a.row(k).head(d) = hs[k].normal.transpose();
    a.row(k).segment(d, d) = -hs[k].normal.transpose();
    a(k, 2 * d) = 1.0;
    b(k) = hs[k].offset;
  }
  a(m, 2 * d) = 1.0;
  b(m) = radius_cap;
  VecX c = VecX::Zero(2 * d + 1);
  c(2 * d) = 1.0;

  SimplexSolver lp(a, b, c);
  VecX x;
  const double value = lp.solve(x);
  if (!std::isfinite(value)) return std::nullopt;
  return ChebyshevBall{x.head(d) - x.segment(d, d), x(2 * d)};
}

void check_nonempty_interior(const ConvexRegion& region) {
  const auto ball = chebyshev_ball(region);
  if (!ball) throw Error(ErrorCode::Validation, "region is empty");
  if (!(ball->radius > region.interior_margin())) {
    std::ostringstream os;
    os << "region has no open interior (inscribed radius " << ball->radius
       << " <= interior margin " << region.interior_margin() << ")";
    throw Error(ErrorCode::Validation, os.str());
  }
}

}  // namespace crowdctl
