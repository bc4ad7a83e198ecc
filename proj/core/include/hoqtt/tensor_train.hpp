#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hoqtt {

// Digits j_nu in {1,..,q}, least-significant first: the flat index is
// i = sum_nu (j_nu - 1) q^{nu-1}.
struct DigitIndex {
  std::vector<std::uint8_t> digits;

  std::size_t length() const { return digits.size(); }
  bool operator==(const DigitIndex&) const = default;
};

DigitIndex fold_index(std::uint64_t i, int L, int q);
std::uint64_t unfold_index(const DigitIndex& d, int q);

// q^L with overflow check (q^L must fit into uint64).
std::uint64_t pow_u64(int q, int L);

// One 3-way core of shape r_left x q x r_right, stored column-major:
// data[a + r_left*(j + q*b)] with 0-based digit j.
struct TTCore {
  int r_left = 1;
  int q = 2;
  int r_right = 1;
  std::vector<double> data;

  double& at(int a, int j, int b) {
    return data[static_cast<std::size_t>(a) +
                static_cast<std::size_t>(r_left) * (j + static_cast<std::size_t>(q) * b)];
  }
  double at(int a, int j, int b) const {
    return data[static_cast<std::size_t>(a) +
                static_cast<std::size_t>(r_left) * (j + static_cast<std::size_t>(q) * b)];
  }
};

// Tensor train representing a vector of length q^L. Immutable after
// construction; safe to share read-only across threads.
class TTVector {
 public:
  TTVector(int q, std::vector<TTCore> cores);  // validates shapes and entries

  int mode_size() const { return q_; }
  int length() const { return static_cast<int>(cores_.size()); }  // L
  std::uint64_t vector_size() const { return pow_u64(q_, length()); }
  const std::vector<TTCore>& cores() const { return cores_; }

  // (r_0, ..., r_L); r_0 = r_L = 1.
  std::vector<int> ranks() const;
  int max_rank() const;

  // Number of stored parameters sum_nu r_{nu-1} * q * r_nu.
  std::uint64_t parameter_count() const;

  // Product of the digit-selected matrix slices; O(L r^2).
  double evaluate(const DigitIndex& d) const;

 private:
  int q_;
  std::vector<TTCore> cores_;
};

// TT-SVD of a fully materialized vector (testing oracle; |v| = q^L).
// Per-step truncation threshold tol/sqrt(L-1) * |v|_2.
TTVector tt_from_full(std::span<const double> v, int q = 2, double tol = 1e-14);

// Exact contraction to the full vector; refuses sizes above cap.
std::vector<double> tt_to_full(const TTVector& t,
                               std::uint64_t cap = std::uint64_t(1) << 24);

// SVD rounding: |full(t) - full(round(t,eps))|_2 <= eps * |full(t)|_2,
// distributed as eps/sqrt(L-1) per truncated SVD.
TTVector tt_round(const TTVector& t, double eps);

// Analytic QTT pair for {cos(w h n)} and {sin(w h n)}, n = 0..2^L-1, built
// from per-core 2x2 rotation blocks; all ranks <= 2.
std::pair<TTVector, TTVector> exp_qtt(double omega, double h, int L);

// Positive root r of q(L-2) r^2 + 2 q r = parameter_count; equals r exactly
// for uniform internal rank r. Requires L >= 3.
double effective_rank(const TTVector& t);

}  // namespace hoqtt
