// Reference implementations used only by tests. Each is written the slow,
// obvious way and shares no code with the library routine it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

struct Pair {
  long pred;
  long ref;
  double similarity;
};

// Repeated argmax: scan the whole matrix for the largest unmatched entry,
// first occurrence in row-major order, until a side runs out.
inline std::vector<Pair> naive_greedy(const Matrix& sim) {
  const long n = static_cast<long>(sim.size());
  const long m = n == 0 ? 0 : static_cast<long>(sim[0].size());
  std::vector<bool> row_used(n, false), col_used(m, false);
  std::vector<Pair> out;
  for (long step = 0; step < std::min(n, m); ++step) {
    long bi = -1, bj = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
      if (row_used[i]) continue;
      for (long j = 0; j < m; ++j) {
        if (col_used[j]) continue;
        if (bi < 0 || sim[i][j] > best) {
          best = sim[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = col_used[bj] = true;
    out.push_back({bi, bj, best});
  }
  return out;
}

// Maximum-weight assignment by enumerating permutations of the larger side.
inline double brute_force_optimum(const Matrix& sim) {
  const std::size_t n = sim.size();
  const std::size_t m = n == 0 ? 0 : sim[0].size();
  if (n == 0 || m == 0) return 0.0;
  const bool transpose = n > m;
  const std::size_t small = transpose ? m : n;
  const std::size_t large = transpose ? n : m;
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double w = 0.0;
    for (std::size_t k = 0; k < small; ++k) w += transpose ? sim[perm[k]][k] : sim[k][perm[k]];
    best = std::max(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Group-normalized advantages in long double, two-pass mean and variance.
inline std::vector<double> advantages(const std::vector<double>& r, double eps) {
  long double sum = 0;
  for (double x : r) sum += x;
  const long double mu = sum / r.size();
  long double ss = 0;
  for (double x : r) ss += (x - mu) * (x - mu);
  const long double sigma = std::sqrt(ss / r.size());
  std::vector<double> a;
  for (double x : r) a.push_back(static_cast<double>((x - mu) / (sigma + eps)));
  return a;
}

// FNV-1a over bytes, spelled out from the published constants.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Feature-hashed bag of lowercase ASCII alphanumeric tokens, L2-normalized.
inline std::vector<double> hashed_embedding(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a(token);
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (char ch : text) {
    const bool alnum = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9');
    if (alnum) token.push_back(static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch));
    else flush();
  }
  flush();
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (double& x : v) x /= norm;
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

struct Tally {
  long tp = 0, fp = 0, fn = 0;
  std::vector<double> similarities;  // every matched pair, in matching order
};

// Counts for one partition from its two node-text lists.
inline Tally recount(const std::vector<std::string>& pred, const std::vector<std::string>& ref,
                     double threshold, std::size_t dim = 384) {
  std::vector<std::vector<double>> pe, re;
  for (const auto& t : pred) pe.push_back(hashed_embedding(t, dim));
  for (const auto& t : ref) re.push_back(hashed_embedding(t, dim));
  Matrix sim(pe.size(), std::vector<double>(re.size()));
  for (std::size_t i = 0; i < pe.size(); ++i)
    for (std::size_t j = 0; j < re.size(); ++j) sim[i][j] = dot(pe[i], re[j]);
  Tally t;
  for (const auto& p : naive_greedy(sim)) {
    t.similarities.push_back(p.similarity);
    if (p.similarity >= threshold - 1e-9) ++t.tp;  // same tolerance as the contract
    else {
      ++t.fp;
      ++t.fn;
    }
  }
  const long matched = static_cast<long>(std::min(pred.size(), ref.size()));
  t.fp += static_cast<long>(pred.size()) - matched;
  t.fn += static_cast<long>(ref.size()) - matched;
  return t;
}

inline double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

}  // namespace oracle
