#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoqtt/cross.hpp"
#include "hoqtt/frequency_grid.hpp"
#include "hoqtt/oscillator.hpp"
#include "hoqtt/quadrature.hpp"
#include "hoqtt/tensor_train.hpp"

namespace hoqtt {

enum class BasisKind : std::uint8_t { Chebyshev, Lagrange, LagrangeMulti };

struct BasisSpec {
  BasisKind kind = BasisKind::Chebyshev;
  int degree = 0;  // N
  int dim = 1;     // d, only > 1 for LagrangeMulti

  // Basis indices run over 0..(N+1)^d - 1; multi-indices are flattened as
  // j1 + (N+1)*j2 + (N+1)^2*j3.
  std::uint32_t index_count() const;
  std::vector<int> unflatten(std::uint32_t index) const;
};

struct TableEntry {
  enum class Status : std::uint8_t { Tensor, Zero, Flagged };
  Status status = Status::Zero;
  std::optional<TTVector> tensor;  // absent for Zero
  CrossReport report;
  double build_seconds = 0.0;

  bool is_zero() const { return status == Status::Zero; }
};

// Precomputed prototype integrals I_R/I_I(., B_k) as QTT tensors over a
// frequency grid. Immutable once assembled; share freely across threads.
class PrototypeTable {
 public:
  PrototypeTable(FrequencyGrid grid, OscillatorSpec oscillator, BasisSpec basis,
                 double eps_cross, std::string tool_version);

  const FrequencyGrid& grid() const { return grid_; }
  const OscillatorSpec& oscillator() const { return oscillator_; }
  const BasisSpec& basis() const { return basis_; }
  double eps_cross() const { return eps_cross_; }
  const std::string& tool_version() const { return tool_version_; }

  // Parts present in this table: {Real, Imag} for phase oscillators,
  // {Real} for kernels.
  std::vector<Part> parts() const;

  bool complete() const;  // every (index, part) pair present
  bool has_entry(std::uint32_t index, Part part) const;
  const TableEntry& entry(std::uint32_t index, Part part) const;
  void set_entry(std::uint32_t index, Part part, TableEntry e);

  std::size_t entry_count() const { return entries_.size(); }
  std::size_t zero_count() const;
  std::size_t flagged_count() const;

  const std::map<std::pair<std::uint32_t, std::uint8_t>, TableEntry>& raw_entries() const {
    return entries_;
  }

 private:
  FrequencyGrid grid_;
  OscillatorSpec oscillator_;
  BasisSpec basis_;
  double eps_cross_;
  std::string tool_version_;
  std::map<std::pair<std::uint32_t, std::uint8_t>, TableEntry> entries_;
};

// Whether the integrand B_k(x) * cos/sin(omega g(x)) vanishes identically by
// parity (Chebyshev basis, 1-D phase oscillators only).
bool parity_zero(const OscillatorSpec& osc, const BasisSpec& basis,
                 std::uint32_t index, Part part);

// Scalar basis function B_k (1-D bases).
std::function<double(double)> basis_function(const BasisSpec& basis, std::uint32_t index);

// Cross-approximate one prototype entry, or return a Zero entry without
// touching the oracle when parity decides. Throws if the quadrature
// self-validation trips (flagged oracle values).
TableEntry precompute_prototype(const OscillatorSpec& osc, const BasisSpec& basis,
                                std::uint32_t index, Part part,
                                const FrequencyGrid& grid, const CrossConfig& cross_cfg,
                                const QuadratureConfig& quad_cfg,
                                std::shared_ptr<PhaseGridCache> shared_cache = nullptr);

// All (index, part) entries; independent tasks, run on `jobs` threads. The
// result does not depend on the scheduling (per-entry seeds are derived from
// cross_cfg.seed and the entry id). Entries whose cross run fails to converge
// are stored Flagged; aborted entries are reported in `failures`.
PrototypeTable precompute_table(const OscillatorSpec& osc, const BasisSpec& basis,
                                const FrequencyGrid& grid, const CrossConfig& cross_cfg,
                                const QuadratureConfig& quad_cfg, int jobs = 1,
                                std::vector<std::string>* failures = nullptr);

// "QTTP" container, little-endian, CRC-32 per record (see docs/format.md).
void save_table(const PrototypeTable& table, const std::filesystem::path& path);
PrototypeTable load_table(const std::filesystem::path& path);

// CRC-32 (IEEE) used by the container format.
std::uint32_t crc32_ieee(const void* data, std::size_t size, std::uint32_t seed = 0);

}  // namespace hoqtt
