#include "hoqtt/cross.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <unordered_set>

namespace hoqtt {

EntryOracle::EntryOracle(int L, int q, std::function<double(std::uint64_t)> fn,
                         bool memoize)
    : L_(L), q_(q), size_(pow_u64(q, L)), fn_(std::move(fn)), memoize_(memoize) {
  if (L_ < 1) throw std::invalid_argument("EntryOracle: L must be >= 1");
}

double EntryOracle::at_flat(std::uint64_t i) {
  if (i >= size_) throw std::out_of_range("EntryOracle: index out of range");
  ++requests_;
  if (memoize_) {
    auto it = memo_.find(i);
    if (it != memo_.end()) return it->second;
  }
  ++calls_;
  double v = fn_(i);
  if (!std::isfinite(v)) throw OracleNanError(i);
  if (memoize_) memo_.emplace(i, v);
  return v;
}

double EntryOracle::operator()(const DigitIndex& d) {
  if (static_cast<int>(d.length()) != L_)
    throw std::invalid_argument("EntryOracle: digit count != L");
  return at_flat(unfold_index(d, q_));
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

TTCore core_from_matrix(const MatrixXd& U, int r_left, int q, int r_right) {
  TTCore c;
  c.r_left = r_left;
  c.q = q;
  c.r_right = r_right;
  c.data.resize(static_cast<std::size_t>(r_left) * q * r_right);
  for (int b = 0; b < r_right; ++b)
    for (int j = 0; j < q; ++j)
      for (int a = 0; a < r_left; ++a)
        c.at(a, j, b) = U(a + static_cast<Eigen::Index>(r_left) * j, b);
  return c;
}

// Orthonormal basis of the column space with rank detection.
MatrixXd orthobasis(const MatrixXd& A) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  int k = static_cast<int>(qr.rank());
  if (k == 0) {
    MatrixXd Q = MatrixXd::Zero(A.rows(), 1);
    Q(0, 0) = 1.0;
    return Q;
  }
  return qr.householderQ() * MatrixXd::Identity(A.rows(), k);
}

// A prefix or suffix of digits together with its weighted flat contribution.
struct IndexKey {
  std::vector<std::uint8_t> digits;
  std::uint64_t flat = 0;
};
using IndexSet = std::vector<IndexKey>;

struct CrossWorkspace {
  int L, q;
  std::vector<std::uint64_t> pw;           // q^0 .. q^L
  std::vector<IndexSet> left;              // left[nu]: prefixes of length nu
  std::vector<IndexSet> right;             // right[nu]: suffixes for bond nu
  std::vector<std::unordered_set<std::uint64_t>> right_flats;
};

int bond_cap(int nu, int L, int q, int max_rank) {
  int span = std::min(nu, L - nu);
  std::uint64_t cap = 1;
  for (int i = 0; i < span; ++i) {
    cap *= static_cast<std::uint64_t>(q);
    if (cap >= static_cast<std::uint64_t>(max_rank)) return max_rank;
  }
  return static_cast<int>(cap);
}

void add_random_suffixes(CrossWorkspace& ws, int nu, int want,
                         std::mt19937_64& rng) {
  // suffix for bond nu covers cores nu+1..L, digit weights q^nu..q^{L-1}
  int len = ws.L - nu;
  auto& set = ws.right[nu];
  auto& seen = ws.right_flats[nu];
  int attempts = 0;
  while (static_cast<int>(set.size()) < want && attempts < 64 * want) {
    ++attempts;
    IndexKey key;
    key.digits.resize(len);
    key.flat = 0;
    for (int i = 0; i < len; ++i) {
      int j = static_cast<int>(rand_below(rng, ws.q));
      key.digits[i] = static_cast<std::uint8_t>(j + 1);
      key.flat += static_cast<std::uint64_t>(j) * ws.pw[nu + i];
    }
    if (seen.insert(key.flat).second) set.push_back(std::move(key));
  }
}

double validate(const TTVector& t, EntryOracle& oracle, std::mt19937_64& vrng,
                int samples) {
  double max_dev = 0.0, max_abs = 0.0;
  int L = oracle.length();
  int q = oracle.mode_size();
  for (int s = 0; s < samples; ++s) {
    std::uint64_t idx = rand_below(vrng, oracle.vector_size());
    double vo = oracle.at_flat(idx);
    double vt = t.evaluate(fold_index(idx, L, q));
    max_dev = std::max(max_dev, std::fabs(vo - vt));
    max_abs = std::max(max_abs, std::fabs(vo));
  }
  if (max_abs == 0.0)
    return max_dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return max_dev / max_abs;
}

CrossReport make_report(const TTVector& t, const CrossConfig& cfg,
                        std::uint64_t calls, double err, int sweeps,
                        bool converged) {
  CrossReport rep;
  rep.final_ranks = t.ranks();
  rep.effective_rank = t.length() >= 3 ? effective_rank(t)
                                       : static_cast<double>(t.max_rank());
  rep.oracle_calls = calls;
  rep.validation_error = err;
  rep.sweeps = sweeps;
  rep.converged = converged;
  double denom = static_cast<double>(std::max(sweeps, 1)) * t.length() *
                 t.mode_size() * static_cast<double>(cfg.max_rank) *
                 static_cast<double>(cfg.max_rank);
  rep.budget_constant = static_cast<double>(calls) / denom;
  return rep;
}

}  // namespace

std::vector<int> maxvol(const MatrixXd& A, double swap_threshold, int max_swaps) {
  int n = static_cast<int>(A.rows());
  int r = static_cast<int>(A.cols());
  if (n < r) throw std::invalid_argument("maxvol: need rows >= cols");
  if (r == 0) throw std::invalid_argument("maxvol: empty matrix");

  MatrixXd Q = orthobasis(A);
  int k = static_cast<int>(Q.cols());

  // Greedy row-pivoted elimination for the initial square submatrix.
  MatrixXd W = Q;
  std::vector<int> piv;
  std::vector<char> used(n, 0);
  for (int c = 0; c < k; ++c) {
    int imax = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      double v = std::fabs(W(i, c));
      if (v > best) {
        best = v;
        imax = i;
      }
    }
    piv.push_back(imax);
    used[imax] = 1;
    if (best > 0.0) {
      for (int i = 0; i < n; ++i) {
        if (used[i] || W(i, c) == 0.0) continue;
        W.row(i) -= (W(i, c) / W(imax, c)) * W.row(imax);
      }
    }
  }

  auto compute_C = [&](MatrixXd& C) {
    MatrixXd Qs(k, k);
    for (int t = 0; t < k; ++t) Qs.row(t) = Q.row(piv[t]);
    Eigen::PartialPivLU<MatrixXd> lu(Qs.transpose());
    C = lu.solve(Q.transpose()).transpose();  // n x k, C * Qs = Q
  };

  MatrixXd C;
  compute_C(C);
  for (int swaps = 0; swaps < max_swaps; ++swaps) {
    int bi = 0, bj = 0;
    double best = 0.0;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) {
        double v = std::fabs(C(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best <= swap_threshold) break;
    piv[bj] = bi;
    if ((swaps + 1) % 32 == 0) {
      compute_C(C);
      continue;
    }
    Eigen::RowVectorXd row = C.row(bi);
    row(bj) -= 1.0;
    C -= C.col(bj) * (row / C(bi, bj));
  }
  std::sort(piv.begin(), piv.end());
  return piv;
}

CrossResult tt_cross(EntryOracle& oracle, const CrossConfig& cfg) {
  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("tt_cross: tolerance must be > 0");
  if (cfg.max_rank < 1 || cfg.validation_samples < 1 || cfg.max_sweeps < 1)
    throw std::invalid_argument("tt_cross: invalid config");

  const int L = oracle.length();
  const int q = oracle.mode_size();
  std::uint64_t calls0 = oracle.call_count();

  if (L == 1) {
    TTCore c;
    c.r_left = c.r_right = 1;
    c.q = q;
    c.data.resize(q);
    for (int j = 0; j < q; ++j) c.data[j] = oracle.at_flat(j);
    TTVector t(q, {c});
    CrossReport rep = make_report(t, cfg, oracle.call_count() - calls0, 0.0, 1, true);
    return {std::move(t), rep};
  }

  CrossWorkspace ws;
  ws.L = L;
  ws.q = q;
  ws.pw.resize(L + 1);
  ws.pw[0] = 1;
  for (int i = 1; i <= L; ++i) ws.pw[i] = ws.pw[i - 1] * static_cast<std::uint64_t>(q);
  ws.left.resize(L);
  ws.right.resize(L);
  ws.right_flats.resize(L);

  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 vrng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);

  int target = std::clamp(cfg.start_rank, 1, cfg.max_rank);
  for (int nu = 1; nu <= L - 1; ++nu)
    add_random_suffixes(ws, nu, std::min(target, bond_cap(nu, L, q, cfg.max_rank)), rng);

  std::optional<TTVector> best;
  CrossReport best_rep;
  double best_err = std::numeric_limits<double>::infinity();
  bool converged = false;
  int sweeps = 0;
  int saturated_stalls = 0;

  while (sweeps < cfg.max_sweeps) {
    ++sweeps;

    // Left-to-right: nested row sets and interpolation cores in one pass.
    std::vector<TTCore> cores(L);
    ws.left[0] = IndexSet{IndexKey{}};
    for (int nu = 1; nu <= L - 1; ++nu) {
      const IndexSet& I = ws.left[nu - 1];
      const IndexSet& J = ws.right[nu];
      int r_l = static_cast<int>(I.size());
      int r_r = static_cast<int>(J.size());
      MatrixXd A(static_cast<Eigen::Index>(r_l) * q, r_r);
      for (int b = 0; b < r_r; ++b)
        for (int j = 0; j < q; ++j)
          for (int a = 0; a < r_l; ++a)
            A(a + static_cast<Eigen::Index>(r_l) * j, b) = oracle.at_flat(
                I[a].flat + static_cast<std::uint64_t>(j) * ws.pw[nu - 1] + J[b].flat);

      MatrixXd Q = orthobasis(A);
      int k = static_cast<int>(Q.cols());
      std::vector<int> piv = maxvol(Q);
      MatrixXd Qs(k, k);
      for (int t = 0; t < k; ++t) Qs.row(t) = Q.row(piv[t]);
      Eigen::PartialPivLU<MatrixXd> lu(Qs.transpose());
      MatrixXd core = lu.solve(Q.transpose()).transpose();  // (r_l q) x k
      if (!core.allFinite())
        throw std::runtime_error("tt_cross: numerical breakdown in core assembly");
      cores[nu - 1] = core_from_matrix(core, r_l, q, k);

      IndexSet In;
      In.reserve(k);
      for (int t = 0; t < k; ++t) {
        int a = piv[t] % r_l;
        int j = piv[t] / r_l;
        IndexKey key;
        key.digits = I[a].digits;
        key.digits.push_back(static_cast<std::uint8_t>(j + 1));
        key.flat = I[a].flat + static_cast<std::uint64_t>(j) * ws.pw[nu - 1];
        In.push_back(std::move(key));
      }
      ws.left[nu] = std::move(In);
    }
    {
      const IndexSet& I = ws.left[L - 1];
      int r_l = static_cast<int>(I.size());
      TTCore c;
      c.r_left = r_l;
      c.q = q;
      c.r_right = 1;
      c.data.resize(static_cast<std::size_t>(r_l) * q);
      for (int j = 0; j < q; ++j)
        for (int a = 0; a < r_l; ++a)
          c.at(a, j, 0) = oracle.at_flat(
              I[a].flat + static_cast<std::uint64_t>(j) * ws.pw[L - 1]);
      cores[L - 1] = std::move(c);
    }

    TTVector tensor(q, std::move(cores));
    double err = validate(tensor, oracle, vrng, cfg.validation_samples);
    bool improved = err < 0.5 * best_err;
    if (err < best_err) {
      best_err = err;
      best = std::move(tensor);
    }
    if (best_err <= cfg.tolerance) {
      converged = true;
      break;
    }
    if (sweeps == cfg.max_sweeps) break;

    // Right-to-left: rebuild the column sets from the current row sets.
    for (int nu = L; nu >= 2; --nu) {
      const IndexSet& I = ws.left[nu - 1];
      int r_l = static_cast<int>(I.size());
      int r_r = (nu == L) ? 1 : static_cast<int>(ws.right[nu].size());
      MatrixXd B(r_l, static_cast<Eigen::Index>(q) * r_r);
      for (int b = 0; b < r_r; ++b) {
        std::uint64_t suffix = (nu == L) ? 0 : ws.right[nu][b].flat;
        for (int j = 0; j < q; ++j)
          for (int a = 0; a < r_l; ++a)
            B(a, j + static_cast<Eigen::Index>(q) * b) = oracle.at_flat(
                I[a].flat + static_cast<std::uint64_t>(j) * ws.pw[nu - 1] + suffix);
      }
      MatrixXd Q2 = orthobasis(B.transpose());
      std::vector<int> piv2 = maxvol(Q2);
      IndexSet Jn;
      std::unordered_set<std::uint64_t> flats;
      Jn.reserve(piv2.size());
      for (int col : piv2) {
        int j = col % q;
        int b = col / q;
        IndexKey key;
        key.digits.clear();
        key.digits.push_back(static_cast<std::uint8_t>(j + 1));
        if (nu < L) {
          const IndexKey& tail = ws.right[nu][b];
          key.digits.insert(key.digits.end(), tail.digits.begin(), tail.digits.end());
          key.flat = static_cast<std::uint64_t>(j) * ws.pw[nu - 1] + tail.flat;
        } else {
          key.flat = static_cast<std::uint64_t>(j) * ws.pw[nu - 1];
        }
        flats.insert(key.flat);
        Jn.push_back(std::move(key));
      }
      ws.right[nu - 1] = std::move(Jn);
      ws.right_flats[nu - 1] = std::move(flats);
    }

    if (!improved) {
      if (target < cfg.max_rank) {
        target = std::min(target + cfg.rank_increment, cfg.max_rank);
        for (int nu = 1; nu <= L - 1; ++nu)
          add_random_suffixes(ws, nu,
                              std::min(target, bond_cap(nu, L, q, cfg.max_rank)), rng);
        saturated_stalls = 0;
      } else if (++saturated_stalls >= 2) {
        break;
      }
    }
  }

  if (!best) throw std::runtime_error("tt_cross: no sweep completed");
  CrossReport rep = make_report(*best, cfg, oracle.call_count() - calls0,
                                best_err, sweeps, converged);
  return {std::move(*best), rep};
}

}  // namespace hoqtt
