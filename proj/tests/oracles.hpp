#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's algorithms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using P = Eigen::Vector3d;

// Mean distance to the k nearest other points, by full sort.
inline std::vector<double> knn_mean(const std::vector<P>& pts, std::size_t k) {
  std::vector<double> out(pts.size());
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d.clear();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) d.emplace_back((pts[i] - pts[j]).squaredNorm(), j);
    std::sort(d.begin(), d.end());
    double s = 0;
    for (std::size_t n = 0; n < k; ++n) s += std::sqrt(d[n].first);
    out[i] = s / static_cast<double>(k);
  }
  return out;
}

inline std::vector<std::size_t> sor_kept(const std::vector<P>& pts, std::size_t k, double ratio) {
  const auto d = knn_mean(pts, k);
  const double n = static_cast<double>(d.size());
  const double mu = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double var = 0;
  for (double x : d) var += (x - mu) * (x - mu);
  const double thr = mu + ratio * std::sqrt(var / n);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] <= thr) kept.push_back(i);
  return kept;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// O(n^2) DBSCAN: core = >= min_pts within eps (self included); cores linked
// when within eps; border joins its lowest-index core neighbor. Clusters are
// sorted index lists, ordered by their lowest index.
inline std::vector<std::vector<std::size_t>> dbscan(const std::vector<P>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  const double e2 = eps * eps;
  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= e2) nb[i].push_back(j);
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nb[i].size() >= min_pts;
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    if (core[i])
      for (std::size_t j : nb[i])
        if (core[j]) uf.unite(i, j);
  std::vector<long> root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      root[i] = static_cast<long>(uf.find(i));
      continue;
    }
    for (std::size_t j : nb[i])  // ascending
      if (core[j]) {
        root[i] = static_cast<long>(uf.find(j));
        break;
      }
  }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (root[i] < 0) continue;
    auto& s = slot[static_cast<std::size_t>(root[i])];
    if (s < 0) {
      s = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(s)].push_back(i);
  }
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix. Returns
// eigenvectors (columns of v) sorted by descending eigenvalue.
struct Eigen3 {
  std::array<double, 3> values;
  std::array<P, 3> vectors;
};

inline Eigen3 jacobi(std::array<std::array<double, 3>, 3> a) {
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 100; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off < 1e-300) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
  Eigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[order[i]][order[i]];
    out.vectors[i] = P(v[0][order[i]], v[1][order[i]], v[2][order[i]]).normalized();
  }
  return out;
}

inline std::array<std::array<double, 3>, 3> covariance(const std::vector<P>& pts) {
  double m[3] = {0, 0, 0};
  for (const auto& p : pts)
    for (int i = 0; i < 3; ++i) m[i] += p[i];
  for (double& x : m) x /= static_cast<double>(pts.size());
  std::array<std::array<double, 3>, 3> c{};
  for (const auto& p : pts)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] += (p[i] - m[i]) * (p[j] - m[j]);
  for (auto& row : c)
    for (double& x : row) x /= static_cast<double>(pts.size());
  return c;
}

inline double mae(const std::vector<double>& pc, const std::vector<double>& mt) {
  double s = 0;
  for (std::size_t i = 0; i < pc.size(); ++i) s += std::fabs(pc[i] - mt[i]);
  return s / static_cast<double>(pc.size());
}

inline double mape(const std::vector<double>& pc, const std::vector<double>& mt) {
  double s = 0;
  for (std::size_t i = 0; i < pc.size(); ++i) s += std::fabs(pc[i] - mt[i]) / mt[i];
  return 100.0 * s / static_cast<double>(pc.size());
}

}  // namespace oracle
