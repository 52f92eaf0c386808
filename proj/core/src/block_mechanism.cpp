#include "robust_trade/block_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robust_trade/errors.hpp"

namespace robust_trade {
namespace {

void require_n(int n) {
  if (n < 1) throw ValidationError("block count must be at least 1, got " + std::to_string(n));
}

void require_monotone(const BlockTable& q) {
  const MonotonicityReport rep = check_expost_monotone(q);
  if (!rep.ok) throw PreconditionError("allocation is not ex-post monotone: " + rep.detail);
}

void require_obs2(const BlockTable& q) {
  if (!check_obs2(q, 1e-12)) throw PreconditionError("allocation is nonzero at a node with k < l");
}

}  // namespace

BlockTable::BlockTable(int n, double fill) : n_(n) {
  require_n(n);
  data_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill);
}

double BlockTable::node(int k, int l) const {
  const int kk = std::min(k + 1, n_);
  const int ll = std::max(l, 1);
  return (*this)(kk, ll);
}

double BlockTable::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

BlockTable block_averages(const AllocationRule& q, int n, int subgrid) {
  require_n(n);
  if (subgrid < 1) throw ValidationError("sub-grid size must be at least 1");
  BlockTable avg(n);
  const double h = 1.0 / (static_cast<double>(n) * subgrid);
  for (int k = 1; k <= n; ++k) {
    for (int l = 1; l <= n; ++l) {
      double sum = 0.0;
      for (int a = 0; a < subgrid; ++a) {
        const double v = block_cut(k - 1, n) + (a + 0.5) * h;
        for (int b = 0; b < subgrid; ++b) {
          const double c = block_cut(l - 1, n) + (b + 0.5) * h;
          sum += q(v, c);
        }
      }
      avg(k, l) = sum / (static_cast<double>(subgrid) * subgrid);
    }
  }
  return avg;
}

BlockTable blockify(const AllocationRule& q, int n, int subgrid) {
  const BlockTable avg = block_averages(q, n, subgrid);
  BlockTable out(n);
  for (int k = 2; k <= n; ++k) {
    for (int l = 1; l < n; ++l) {
      if (avg(k - 1, l) <= 0.0 || avg(k, l + 1) <= 0.0) continue;
      out(k, l) = avg(k, l);
    }
  }
  return out;
}

MonotonicityReport check_expost_monotone(const BlockTable& q, double tol) {
  const int n = q.n();
  for (int k = 1; k <= n; ++k) {
    for (int l = 1; l <= n; ++l) {
      if (k > 1 && q(k, l) < q(k - 1, l) - tol) {
        return {false, k, l,
                "block (" + std::to_string(k) + ", " + std::to_string(l) + ") decreases in v from block (" +
                    std::to_string(k - 1) + ", " + std::to_string(l) + ")"};
      }
      if (l > 1 && q(k, l) > q(k, l - 1) + tol) {
        return {false, k, l,
                "block (" + std::to_string(k) + ", " + std::to_string(l) + ") increases in c from block (" +
                    std::to_string(k) + ", " + std::to_string(l - 1) + ")"};
      }
    }
  }
  return {};
}

BlockTable buyer_payments(const BlockTable& q) {
  require_monotone(q);
  const int n = q.n();
  BlockTable t(n);
  for (int l = 1; l <= n; ++l) {
    for (int k = 2; k <= n; ++k) {
      t(k, l) = t(k - 1, l) + block_cut(k - 1, n) * (q(k, l) - q(k - 1, l));
    }
  }
  return t;
}

BlockTable seller_payments(const BlockTable& q) {
  require_monotone(q);
  const int n = q.n();
  BlockTable t(n);
  for (int k = 1; k <= n; ++k) {
    for (int l = n - 1; l >= 1; --l) {
      t(k, l) = t(k, l + 1) + block_cut(l, n) * (q(k, l) - q(k, l + 1));
    }
  }
  return t;
}

BlockMechanism build_block_mechanism(const AllocationRule& q, int n, int subgrid) {
  BlockMechanism m;
  m.q = blockify(q, n, subgrid);
  m.t_b = buyer_payments(m.q);
  m.t_s = seller_payments(m.q);
  return m;
}

double check_dsic(const BlockMechanism& m) {
  const int n = m.n();
  double worst = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (int l = 1; l <= n; ++l) {
      for (int r = 1; r <= n; ++r) {
        // buyer in block k reports r
        const double dq = m.q(r, l) - m.q(k, l);
        const double dt = m.t_b(r, l) - m.t_b(k, l);
        for (double v : {block_cut(k - 1, n), block_cut(k, n)}) worst = std::max(worst, v * dq - dt);
        // seller in block l reports r
        const double sq = m.q(k, r) - m.q(k, l);
        const double st = m.t_s(k, r) - m.t_s(k, l);
        for (double c : {block_cut(l - 1, n), block_cut(l, n)}) worst = std::max(worst, st - c * sq);
      }
    }
  }
  return worst;
}

double check_eir(const BlockMechanism& m) {
  const int n = m.n();
  double worst = 0.0;
  bool first = true;
  for (int k = 1; k <= n; ++k) {
    for (int l = 1; l <= n; ++l) {
      const double buyer = block_cut(k - 1, n) * m.q(k, l) - m.t_b(k, l);
      const double seller = m.t_s(k, l) - block_cut(l, n) * m.q(k, l);
      const double lo = std::min(buyer, seller);
      worst = first ? lo : std::min(worst, lo);
      first = false;
    }
  }
  return worst;
}

BudgetReport budget_report(const BlockMechanism& m) {
  const int n = m.n();
  BudgetReport rep;
  rep.imbalance = BlockTable(n);
  for (std::size_t i = 0; i < rep.imbalance.data().size(); ++i) {
    rep.imbalance.data()[i] = m.t_b.data()[i] - m.t_s.data()[i];
  }
  rep.max_abs = rep.imbalance.max_abs();

  const double inv = 1.0 / n;
  for (int k = 1; k < n; ++k) {
    for (int l = 1; l < n; ++l) {
      double tail = 0.0;
      for (int i = 0; i < k; ++i) tail += m.q.node(i, l);
      for (int i = l + 1; i <= n; ++i) tail += m.q.node(k, i);
      const double rhs = (block_cut(k, n) - block_cut(l, n)) * m.q.node(k, l) - inv * tail + m.t_b.node(0, l) -
                         m.t_s.node(k, n);
      rep.identity_residual = std::max(rep.identity_residual, std::abs(rep.imbalance.node(k, l) - rhs));
    }
  }
  return rep;
}

bool check_obs2(const BlockTable& q, double tol) {
  const int n = q.n();
  for (int k = 0; k <= n; ++k) {
    for (int l = k + 1; l <= n; ++l) {
      if (std::abs(q.node(k, l)) > tol) return false;
    }
  }
  return true;
}

RnTable rn_table(const BlockMechanism& m) {
  const int n = m.n();
  RnTable r(n);
  for (int gap = 1; gap < n; ++gap) {
    for (int l = 1; l + gap <= n; ++l) {
      const int k = l + gap;
      double acc = n * (m.t_b.node(k, l) - m.t_s.node(k, l));
      for (int i = l + 1; i < k; ++i) acc += r(k, i) + r(i, l);
      r(k, l) = acc / gap;
    }
  }
  return r;
}

double rn_identity_residual(const BlockMechanism& m, const RnTable& r) {
  const int n = m.n();
  double worst = 0.0;
  for (int l = 1; l <= n; ++l) {
    for (int k = l + 1; k <= n; ++k) {
      double diag = 0.0;
      for (int i = l; i <= k; ++i) diag += m.q.node(i, i);
      worst = std::max(worst, std::abs(m.q.node(k, l) - r(k, l) - diag));
    }
  }
  return worst;
}

double PostedPriceVector::sum() const { return std::accumulate(u.begin(), u.end(), 0.0); }

void validate_posted_price_vector(const PostedPriceVector& u, double tol) {
  for (std::size_t i = 0; i < u.u.size(); ++i) {
    if (!std::isfinite(u.u[i]) || u.u[i] < -tol) {
      throw ValidationError("u[" + std::to_string(i + 1) + "] = " + std::to_string(u.u[i]) + " is negative");
    }
  }
  if (u.sum() > 1.0 + tol) throw ValidationError("u sums to " + std::to_string(u.sum()) + " > 1");
}

ProjectionReport project_to_bb(const BlockMechanism& m) {
  const int n = m.n();
  if (n < 2) throw PreconditionError("projection needs n >= 2");
  require_obs2(m.q);
  ProjectionReport rep;
  rep.r = rn_table(m);
  rep.delta = rep.r(n, 1) / (n - 1);
  rep.u.u.resize(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    double ui = m.q.node(i, i) + rep.delta;
    if (ui < -1e-9) {
      throw ValidationError("projection gives u[" + std::to_string(i) + "] = " + std::to_string(ui) + " < 0");
    }
    rep.u.u[static_cast<std::size_t>(i - 1)] = std::max(ui, 0.0);
  }
  return rep;
}

BlockMechanism u_to_mechanism(const PostedPriceVector& u) {
  validate_posted_price_vector(u);
  const int n = u.n();
  BlockMechanism m{BlockTable(n), BlockTable(n), BlockTable(n)};
  for (int l = 1; l <= n; ++l) {
    double q = 0.0;
    double t = 0.0;
    for (int k = l + 1; k <= n; ++k) {
      const double ui = u.u[static_cast<std::size_t>(k - 2)];  // price (k-1)/n
      q += ui;
      t += ui * block_cut(k - 1, n);
      m.q(k, l) = q;
      m.t_b(k, l) = t;
      m.t_s(k, l) = t;
    }
  }
  return m;
}

}  // namespace robust_trade
