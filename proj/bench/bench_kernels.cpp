// Times the parallel kernels against their serial twins and checks that the
// outputs agree bit for bit at every thread count. The parallel versions keep
// the reference's summation order and tie-breaks, so any difference at all is
// a bug, not noise.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mib/data_matrix.hpp"
#include "mib/imputer.hpp"
#include "mib/linalg.hpp"
#include "mib/parallel.hpp"
#include "mib/reference.hpp"
#include "mib/rng.hpp"
#include "mib/trees.hpp"

using namespace mib;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

double gauss(SplitMix64& rng) {
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += rng.next_double();
  return s - 6.0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<uint64_t>(a[i]) != std::bit_cast<uint64_t>(b[i])) return false;
  return true;
}

bool same_matrix(const DataMatrix& a, const DataMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (a.observed[i] != b.observed[i]) return false;
    if (a.observed[i] &&
        std::bit_cast<uint64_t>(a.values[i]) != std::bit_cast<uint64_t>(b.values[i]))
      return false;
  }
  return true;
}

bool same_tree(const RegressionTree& a, const RegressionTree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (size_t k = 0; k < a.nodes.size(); ++k) {
    const TreeNode& x = a.nodes[k];
    const TreeNode& y = b.nodes[k];
    if (x.feature != y.feature || x.left != y.left || x.right != y.right)
      return false;
    if (x.is_leaf()) {
      if (std::bit_cast<uint64_t>(x.value) != std::bit_cast<uint64_t>(y.value))
        return false;
    } else if (std::bit_cast<uint64_t>(x.threshold) !=
               std::bit_cast<uint64_t>(y.threshold)) {
      return false;
    }
  }
  return true;
}

void report(const char* name, double t_ref, double t_one, double t_many,
            bool identical, int& bad) {
  std::printf("%-18s ref %7.3fs   1 thread %7.3fs   %d threads %7.3fs   "
              "speedup %4.2fx   identical %s\n",
              name, t_ref, t_one, effective_threads(), t_many,
              t_many > 0 ? t_one / t_many : 0.0, identical ? "yes" : "NO");
  if (!identical) ++bad;
}

}  // namespace

int main() {
  SplitMix64 rng(4242);
  int bad = 0;
  set_max_threads(0);
  std::printf("kernel benchmark, default worker count %d\n\n", effective_threads());

  {
    // nearest-neighbor completion, one task per missing cell
    const size_t n = 1100, d = 16;
    DataMatrix train = make_matrix(n, d);
    DataMatrix query = make_matrix(n, d);
    for (auto* m : {&train, &query})
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j)
          if (i == 0 || rng.next_double() < 0.9)
            m->set(i, j, rng.next_double(-3.0, 3.0));
          else m->set_missing(i, j);
    ImputerSpec spec;
    spec.kind = ImputerKind::Knn;
    spec.knn_k = 7;
    KnnImputer knn(spec, train);

    auto t0 = clk::now();
    DataMatrix ref = ref_knn_complete(train, query, spec.knn_k);
    auto t1 = clk::now();
    set_max_threads(1);
    DataMatrix one = knn.transform(query);
    auto t2 = clk::now();
    set_max_threads(0);
    DataMatrix many = knn.transform(query);
    auto t3 = clk::now();
    report("knn complete", seconds(t0, t1), seconds(t1, t2), seconds(t2, t3),
           same_matrix(ref, one) && same_matrix(one, many), bad);
  }

  {
    // single tree, parallel over candidate features at each node
    const size_t n = 9000, p = 12;
    std::vector<double> x(n * p), y(n);
    for (auto& v : x) v = rng.next_double(-2.0, 2.0);
    for (size_t i = 0; i < n; ++i)
      y[i] = std::sin(x[i * p]) + 0.5 * x[i * p + 3] + 0.1 * gauss(rng);
    TreeParams tp;
    tp.max_depth = 6;

    auto t0 = clk::now();
    RegressionTree ref = ref_tree_fit(x, n, p, y, tp.max_depth, tp.min_samples_leaf);
    auto t1 = clk::now();
    set_max_threads(1);
    RegressionTree one = tree_fit(x, n, p, y, tp);
    auto t2 = clk::now();
    set_max_threads(0);
    RegressionTree many = tree_fit(x, n, p, y, tp);
    auto t3 = clk::now();
    report("tree fit", seconds(t0, t1), seconds(t1, t2), seconds(t2, t3),
           same_tree(ref, one) && same_tree(one, many), bad);
  }

  {
    // bagged forest, one task per tree; the 1-thread run is the serial twin
    const size_t n = 6000, p = 10;
    std::vector<double> x(n * p), y(n);
    for (auto& v : x) v = rng.next_double(-2.0, 2.0);
    for (size_t i = 0; i < n; ++i)
      y[i] = x[i * p + 1] * x[i * p + 2] + 0.2 * gauss(rng);
    ForestParams fp;
    fp.n_trees = 48;
    fp.seed = 99;

    set_max_threads(1);
    auto t1 = clk::now();
    ForestModel one = forest_fit(x, n, p, y, fp);
    auto t2 = clk::now();
    set_max_threads(0);
    ForestModel many = forest_fit(x, n, p, y, fp);
    auto t3 = clk::now();
    bool identical = one.trees.size() == many.trees.size();
    for (size_t t = 0; identical && t < one.trees.size(); ++t)
      identical = same_tree(one.trees[t], many.trees[t]);
    std::vector<double> po = predict(one, x, n);
    std::vector<double> pm = predict(many, x, n);
    identical = identical && same_bits(po, pm);
    report("forest fit", seconds(t1, t2), seconds(t1, t2), seconds(t2, t3),
           identical, bad);
  }

  {
    // ridge solve, parallel Gram-matrix assembly with fixed-order sums
    const size_t n = 20000, p = 48;
    std::vector<double> a(n * p), y(n);
    for (auto& v : a) v = rng.next_double(-1.0, 1.0);
    for (auto& v : y) v = rng.next_double(-1.0, 1.0);

    set_max_threads(1);
    auto t1 = clk::now();
    RidgeSolution one = ridge_normal_solve(a, n, p, y, 1e-6);
    auto t2 = clk::now();
    set_max_threads(0);
    RidgeSolution many = ridge_normal_solve(a, n, p, y, 1e-6);
    auto t3 = clk::now();
    report("ridge solve", seconds(t1, t2), seconds(t1, t2), seconds(t2, t3),
           same_bits(one.w, many.w), bad);
  }

  set_max_threads(0);
  if (bad > 0) {
    std::printf("\n%d kernel(s) disagreed between thread counts\n", bad);
    return 1;
  }
  std::printf("\nall kernels bit-identical across thread counts\n");
  return 0;
}
