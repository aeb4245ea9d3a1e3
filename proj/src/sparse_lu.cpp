#include <algorithm>
#include <cmath>
#include <queue>

#include "cartfe/errors.hpp"
#include "cartfe/solvers.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// Adjacency of A + A^T without the diagonal, rows sorted.
std::vector<std::vector<int>> symmetric_graph(const CsrMatrix& a) {
  std::vector<std::vector<int>> adj(sz(a.nrows));
  for (int i = 0; i < a.nrows; ++i)
    for (int k = a.row_ptr[sz(i)]; k < a.row_ptr[sz(i) + 1]; ++k) {
      const int j = a.col[sz(k)];
      if (j == i) continue;
      adj[sz(i)].push_back(j);
      adj[sz(j)].push_back(i);
    }
  for (auto& r : adj) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return adj;
}

// BFS levels from root; returns the last level's vertices and the depth.
int bfs_depth(const std::vector<std::vector<int>>& adj, int root, std::vector<int>& level, std::vector<int>& last) {
  std::fill(level.begin(), level.end(), -1);
  std::vector<int> frontier{root};
  level[sz(root)] = 0;
  int depth = 0;
  while (true) {
    std::vector<int> next;
    for (int v : frontier)
      for (int w : adj[sz(v)])
        if (level[sz(w)] < 0) {
          level[sz(w)] = depth + 1;
          next.push_back(w);
        }
    if (next.empty()) break;
    frontier = std::move(next);
    ++depth;
  }
  last = frontier;
  return depth;
}

}  // namespace

std::vector<int> rcm_ordering(const CsrMatrix& a) {
  CARTFE_THROW_IF(a.nrows != a.ncols, InvalidArgument, "ordering needs a square matrix");
  const int n = a.nrows;
  const auto adj = symmetric_graph(a);
  std::vector<int> order;
  order.reserve(sz(n));
  std::vector<char> done(sz(n), 0);
  std::vector<int> level(sz(n)), last;
  auto degree = [&](int v) { return adj[sz(v)].size(); };
  for (int seed = 0; seed < n; ++seed) {
    if (done[sz(seed)]) continue;
    // Pseudo-peripheral start (George-Liu).
    int root = seed;
    int depth = bfs_depth(adj, root, level, last);
    for (int it = 0; it < 8; ++it) {
      const int cand = *std::min_element(last.begin(), last.end(), [&](int x, int y) { return degree(x) < degree(y); });
      const int d2 = bfs_depth(adj, cand, level, last);
      if (d2 <= depth) break;
      root = cand;
      depth = d2;
    }
    std::queue<int> q;
    q.push(root);
    done[sz(root)] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      order.push_back(v);
      std::vector<int> nb;
      for (int w : adj[sz(v)])
        if (!done[sz(w)]) {
          done[sz(w)] = 1;
          nb.push_back(w);
        }
      std::stable_sort(nb.begin(), nb.end(), [&](int x, int y) { return degree(x) < degree(y); });
      for (int w : nb) q.push(w);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

SparseLU::SparseLU(const CsrMatrix& a, Ordering ordering, double pivot_threshold) : n_(a.nrows) {
  CARTFE_THROW_IF(a.nrows != a.ncols, InvalidArgument, "LU needs a square matrix");
  const int n = n_;
  if (ordering == Ordering::ReverseCuthillMcKee) {
    perm_ = rcm_ordering(a);
  } else {
    perm_.resize(sz(n));
    for (int i = 0; i < n; ++i) perm_[sz(i)] = i;
  }
  std::vector<int> iperm(sz(n));
  for (int i = 0; i < n; ++i) iperm[sz(perm_[sz(i)])] = i;

  // Columns of B = P A P^T: column j of B is row perm[j] of A^T, i.e. column perm[j] of A.
  const CsrMatrix at = a.transpose();  // rows of at = columns of a
  double anorm = 0.0;
  for (double v : a.val) anorm = std::max(anorm, std::abs(v));

  pinv_.assign(sz(n), -1);
  lp_.assign(1, 0);
  up_.assign(1, 0);
  std::vector<double> x(sz(n), 0.0);
  std::vector<int> xi(sz(n)), mark(sz(n), -1), stack(sz(n)), pstack(sz(n));

  for (int k = 0; k < n; ++k) {
    const int acol = perm_[sz(k)];
    // Reach of the column's pattern through the graph of L.
    int top = n;
    for (int p = at.row_ptr[sz(acol)]; p < at.row_ptr[sz(acol) + 1]; ++p) {
      const int start = iperm[sz(at.col[sz(p)])];
      if (mark[sz(start)] == k) continue;
      int head = 0;
      stack[0] = start;
      while (head >= 0) {
        const int j = stack[sz(head)];
        const int jn = pinv_[sz(j)];
        if (mark[sz(j)] != k) {
          mark[sz(j)] = k;
          pstack[sz(head)] = jn < 0 ? 0 : lp_[sz(jn)];
        }
        bool finished = true;
        if (jn >= 0) {
          const int pend = lp_[sz(jn) + 1];
          for (int q = pstack[sz(head)]; q < pend; ++q) {
            const int i = li_[sz(q)];
            if (mark[sz(i)] == k) continue;
            pstack[sz(head)] = q;
            stack[sz(++head)] = i;
            finished = false;
            break;
          }
        }
        if (finished) {
          --head;
          xi[sz(--top)] = j;
        }
      }
    }
    for (int p = at.row_ptr[sz(acol)]; p < at.row_ptr[sz(acol) + 1]; ++p)
      x[sz(iperm[sz(at.col[sz(p)])])] = at.val[sz(p)];
    // Sparse triangular solve with unit L.
    for (int p = top; p < n; ++p) {
      const int j = xi[sz(p)];
      const int jn = pinv_[sz(j)];
      if (jn < 0) continue;
      const double xj = x[sz(j)];
      for (int q = lp_[sz(jn)] + 1; q < lp_[sz(jn) + 1]; ++q) x[sz(li_[sz(q)])] -= lx_[sz(q)] * xj;
    }
    // Split into U (pivoted rows) and pivot candidates.
    int ipiv = -1;
    double amax = -1.0;
    for (int p = top; p < n; ++p) {
      const int i = xi[sz(p)];
      if (pinv_[sz(i)] < 0) {
        const double t = std::abs(x[sz(i)]);
        if (t > amax) {
          amax = t;
          ipiv = i;
        }
      } else {
        ui_.push_back(pinv_[sz(i)]);
        ux_.push_back(x[sz(i)]);
      }
    }
    if (ipiv < 0 || amax <= 1e-14 * anorm || amax == 0.0) {
      throw SingularSystemError("matrix is singular to working precision", k);
    }
    if (pinv_[sz(k)] < 0 && mark[sz(k)] == k && std::abs(x[sz(k)]) >= pivot_threshold * amax) ipiv = k;
    const double piv = x[sz(ipiv)];
    ui_.push_back(k);
    ux_.push_back(piv);
    up_.push_back(static_cast<int>(ui_.size()));
    pinv_[sz(ipiv)] = k;
    li_.push_back(ipiv);
    lx_.push_back(1.0);
    for (int p = top; p < n; ++p) {
      const int i = xi[sz(p)];
      if (pinv_[sz(i)] < 0) {
        li_.push_back(i);
        lx_.push_back(x[sz(i)] / piv);
      }
      x[sz(i)] = 0.0;
    }
    lp_.push_back(static_cast<int>(li_.size()));
  }
  for (auto& i : li_) i = pinv_[sz(i)];
}

std::vector<double> SparseLU::solve(std::span<const double> b) const {
  CARTFE_THROW_IF(b.size() != sz(n_), InvalidArgument, "right-hand side size mismatch");
  const int n = n_;
  std::vector<double> y(sz(n));
  for (int i = 0; i < n; ++i) y[sz(pinv_[sz(i)])] = b[sz(perm_[sz(i)])];
  for (int j = 0; j < n; ++j) {
    const double yj = y[sz(j)];
    if (yj == 0.0) continue;
    for (int p = lp_[sz(j)] + 1; p < lp_[sz(j) + 1]; ++p) y[sz(li_[sz(p)])] -= lx_[sz(p)] * yj;
  }
  for (int j = n - 1; j >= 0; --j) {
    const int diag = up_[sz(j) + 1] - 1;
    y[sz(j)] /= ux_[sz(diag)];
    const double yj = y[sz(j)];
    if (yj == 0.0) continue;
    for (int p = up_[sz(j)]; p < diag; ++p) y[sz(ui_[sz(p)])] -= ux_[sz(p)] * yj;
  }
  std::vector<double> x(sz(n));
  for (int j = 0; j < n; ++j) x[sz(perm_[sz(j)])] = y[sz(j)];
  return x;
}

}  // namespace cartfe
