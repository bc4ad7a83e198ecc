#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hoqtt/tensor_train.hpp"

namespace hoqtt {

// Black-box access to one entry of a length-q^L functional vector. Entries
// must be deterministic; repeated lookups are served from a memo so
// call_count() reports actual evaluations.
class EntryOracle {
 public:
  EntryOracle(int L, int q, std::function<double(std::uint64_t)> fn,
              bool memoize = true);

  int length() const { return L_; }
  int mode_size() const { return q_; }
  std::uint64_t vector_size() const { return size_; }

  double operator()(const DigitIndex& d);
  double at_flat(std::uint64_t i);

  std::uint64_t call_count() const { return calls_; }      // evaluations
  std::uint64_t request_count() const { return requests_; }

 private:
  int L_;
  int q_;
  std::uint64_t size_;
  std::function<double(std::uint64_t)> fn_;
  bool memoize_;
  std::uint64_t calls_ = 0;
  std::uint64_t requests_ = 0;
  std::unordered_map<std::uint64_t, double> memo_;
};

class OracleNanError : public std::runtime_error {
 public:
  OracleNanError(std::uint64_t index)
      : std::runtime_error("oracle returned a non-finite value at flat index " +
                           std::to_string(index)),
        index_(index) {}
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t index_;
};

struct CrossConfig {
  double tolerance = 1e-11;    // relative max-norm target on validation samples
  int max_rank = 64;
  int max_sweeps = 40;
  int validation_samples = 200;
  int rank_increment = 2;
  std::uint64_t seed = 20240901;
  int start_rank = 2;
};

struct CrossReport {
  std::vector<int> final_ranks;
  double effective_rank = 0.0;
  std::uint64_t oracle_calls = 0;
  double validation_error = 0.0;
  int sweeps = 0;
  bool converged = false;
  // oracle_calls / (sweeps * L * q * max_rank^2); stays below 4.
  double budget_constant = 0.0;
};

struct CrossResult {
  TTVector tensor;
  CrossReport report;
};

// Rows of A whose square submatrix has locally maximal determinant modulus:
// all entries of A * inv(A[rows,:]) end up <= swap_threshold in modulus.
// Rank deficiency (detected by pivoted QR) reduces the returned count.
std::vector<int> maxvol(const Eigen::MatrixXd& A, double swap_threshold = 1.01,
                        int max_swaps = 100);

// Maxvol-based TT-cross with rank adaptation by random enrichment. Returns
// the best tensor seen; report.converged tells whether the tolerance was met.
CrossResult tt_cross(EntryOracle& oracle, const CrossConfig& cfg);

}  // namespace hoqtt
