#include "hoqtt/prototype_table.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "hoqtt/interpolation.hpp"
#include "hoqtt/version.hpp"

namespace hoqtt {

std::uint32_t BasisSpec::index_count() const {
  std::uint64_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::uint64_t>(degree) + 1;
  if (n > UINT32_MAX) throw std::invalid_argument("BasisSpec: too many indices");
  return static_cast<std::uint32_t>(n);
}

std::vector<int> BasisSpec::unflatten(std::uint32_t index) const {
  std::vector<int> j(dim);
  std::uint32_t base = static_cast<std::uint32_t>(degree) + 1;
  for (int i = 0; i < dim; ++i) {
    j[i] = static_cast<int>(index % base);
    index /= base;
  }
  return j;
}

PrototypeTable::PrototypeTable(FrequencyGrid grid, OscillatorSpec oscillator,
                               BasisSpec basis, double eps_cross,
                               std::string tool_version)
    : grid_(std::move(grid)),
      oscillator_(std::move(oscillator)),
      basis_(basis),
      eps_cross_(eps_cross),
      tool_version_(std::move(tool_version)) {
  if (basis_.kind == BasisKind::LagrangeMulti) {
    if (basis_.dim < 2 || basis_.dim > 3)
      throw std::invalid_argument("PrototypeTable: multi basis needs d in {2,3}");
    if (oscillator_.dimension() != basis_.dim)
      throw std::invalid_argument("PrototypeTable: oscillator/basis dimension mismatch");
  } else {
    if (basis_.dim != 1 || oscillator_.dimension() != 1)
      throw std::invalid_argument("PrototypeTable: 1-D basis needs 1-D oscillator");
  }
  if (!(eps_cross_ > 0.0))
    throw std::invalid_argument("PrototypeTable: eps_cross must be > 0");
}

std::vector<Part> PrototypeTable::parts() const {
  if (oscillator_.kind() == OscKind::Kernel) return {Part::Real};
  return {Part::Real, Part::Imag};
}

bool PrototypeTable::complete() const {
  for (std::uint32_t k = 0; k < basis_.index_count(); ++k)
    for (Part p : parts())
      if (!has_entry(k, p)) return false;
  return true;
}

bool PrototypeTable::has_entry(std::uint32_t index, Part part) const {
  return entries_.count({index, static_cast<std::uint8_t>(part)}) != 0;
}

const TableEntry& PrototypeTable::entry(std::uint32_t index, Part part) const {
  auto it = entries_.find({index, static_cast<std::uint8_t>(part)});
  if (it == entries_.end())
    throw std::out_of_range("PrototypeTable: missing entry");
  return it->second;
}

void PrototypeTable::set_entry(std::uint32_t index, Part part, TableEntry e) {
  if (index >= basis_.index_count())
    throw std::out_of_range("PrototypeTable: basis index out of range");
  if (e.tensor && e.tensor->length() != grid_.level())
    throw std::invalid_argument("PrototypeTable: tensor level != grid level");
  entries_[{index, static_cast<std::uint8_t>(part)}] = std::move(e);
}

std::size_t PrototypeTable::zero_count() const {
  std::size_t n = 0;
  for (const auto& [k, e] : entries_)
    if (e.status == TableEntry::Status::Zero) ++n;
  return n;
}

std::size_t PrototypeTable::flagged_count() const {
  std::size_t n = 0;
  for (const auto& [k, e] : entries_)
    if (e.status == TableEntry::Status::Flagged) ++n;
  return n;
}

bool parity_zero(const OscillatorSpec& osc, const BasisSpec& basis,
                 std::uint32_t index, Part part) {
  if (osc.kind() != OscKind::Phase) return false;
  if (basis.kind != BasisKind::Chebyshev) return false;
  Parity gp = osc.parity();
  if (gp == Parity::None) return false;
  bool k_odd = (index % 2) == 1;
  if (gp == Parity::Even) return k_odd;  // cos(wg), sin(wg) both even in x
  // g odd: cos(wg) even, sin(wg) odd
  return part == Part::Real ? k_odd : !k_odd;
}

std::function<double(double)> basis_function(const BasisSpec& basis,
                                             std::uint32_t index) {
  if (index >= basis.index_count())
    throw std::out_of_range("basis_function: index out of range");
  switch (basis.kind) {
    case BasisKind::Chebyshev: {
      int k = static_cast<int>(index);
      return [k](double x) { return chebyshev_t(k, x); };
    }
    case BasisKind::Lagrange: {
      auto lb = std::make_shared<LagrangeBasis>(basis.degree);
      int k = static_cast<int>(index);
      return [lb, k](double x) { return lb->eval(k, x); };
    }
    case BasisKind::LagrangeMulti:
      throw std::invalid_argument("basis_function: multi-D basis is not scalar");
  }
  throw std::logic_error("basis_function: bad kind");
}

namespace {

// splitmix64-style mixing for per-entry seeds
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

QuadratureConfig with_degree_floor(QuadratureConfig cfg, int degree) {
  // keeps the basis polynomial resolved at small omega; measured to hold the
  // coarse/fine disagreement near 1e-11 for degrees up to 24
  int extra = (degree + 1) / 2 + 1;
  cfg.extra_subintervals = std::max(cfg.extra_subintervals, extra);
  return cfg;
}

}  // namespace

TableEntry precompute_prototype(const OscillatorSpec& osc, const BasisSpec& basis,
                                std::uint32_t index, Part part,
                                const FrequencyGrid& grid,
                                const CrossConfig& cross_cfg,
                                const QuadratureConfig& quad_cfg,
                                std::shared_ptr<PhaseGridCache> shared_cache) {
  if (parity_zero(osc, basis, index, part)) {
    TableEntry e;
    e.status = TableEntry::Status::Zero;
    return e;
  }

  auto t0 = std::chrono::steady_clock::now();
  QuadratureConfig qcfg = with_degree_floor(quad_cfg, basis.degree);

  std::function<double(std::uint64_t)> fn;
  std::shared_ptr<OscillatoryEntryEvaluator> ev1;
  std::shared_ptr<TensorizedEntryEvaluator> evd;
  if (basis.kind == BasisKind::LagrangeMulti) {
    auto lb = std::make_shared<LagrangeBasis>(basis.degree);
    std::vector<int> j = basis.unflatten(index);
    int d = basis.dim;
    auto product = [lb, j, d](std::span<const double> y) {
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= lb->eval(j[i], y[i]);
      return v;
    };
    evd = std::make_shared<TensorizedEntryEvaluator>(product, osc, part, qcfg,
                                                     std::move(shared_cache));
    fn = [evd, &grid](std::uint64_t n) {
      OscEntryResult r = (*evd)(grid.omega_at(n));
      if (r.flagged)
        throw std::runtime_error("quadrature self-validation failed (delta " +
                                 std::to_string(r.validation_delta) + ")");
      return r.value;
    };
  } else {
    ev1 = std::make_shared<OscillatoryEntryEvaluator>(basis_function(basis, index),
                                                      osc, part, qcfg,
                                                      std::move(shared_cache));
    fn = [ev1, &grid](std::uint64_t n) {
      OscEntryResult r = (*ev1)(grid.omega_at(n));
      if (r.flagged)
        throw std::runtime_error("quadrature self-validation failed (delta " +
                                 std::to_string(r.validation_delta) + ")");
      return r.value;
    };
  }

  EntryOracle oracle(grid.level(), 2, std::move(fn));
  CrossConfig ccfg = cross_cfg;
  ccfg.seed = mix_seed(cross_cfg.seed,
                       static_cast<std::uint64_t>(index) * 2 +
                           static_cast<std::uint64_t>(part));
  CrossResult res = tt_cross(oracle, ccfg);

  TableEntry e;
  e.status = res.report.converged ? TableEntry::Status::Tensor
                                  : TableEntry::Status::Flagged;
  e.tensor = std::move(res.tensor);
  e.report = res.report;
  e.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return e;
}

PrototypeTable precompute_table(const OscillatorSpec& osc, const BasisSpec& basis,
                                const FrequencyGrid& grid,
                                const CrossConfig& cross_cfg,
                                const QuadratureConfig& quad_cfg, int jobs,
                                std::vector<std::string>* failures) {
  PrototypeTable table(grid, osc, basis, cross_cfg.tolerance, kVersion);
  std::vector<std::pair<std::uint32_t, Part>> work;
  for (std::uint32_t k = 0; k < basis.index_count(); ++k)
    for (Part p : table.parts()) work.emplace_back(k, p);

  // The g-grids depend only on the oscillator, so all entries share them.
  std::shared_ptr<PhaseGridCache> shared;
  if (osc.kind() == OscKind::Phase)
    shared = std::make_shared<PhaseGridCache>(osc, quad_cfg.points_per_subinterval);

  std::vector<TableEntry> results(work.size());
  std::vector<std::string> errors(work.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      auto [k, p] = work[i];
      try {
        results[i] = precompute_prototype(osc, basis, k, p, grid, cross_cfg,
                                          quad_cfg, shared);
      } catch (const std::exception& ex) {
        TableEntry e;
        e.status = TableEntry::Status::Flagged;
        e.tensor.reset();
        results[i] = std::move(e);
        errors[i] = ex.what();
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < work.size(); ++i) {
    auto [k, p] = work[i];
    if (!errors[i].empty() && failures)
      failures->push_back("entry k=" + std::to_string(k) + " part=" +
                          (p == Part::Real ? std::string("R") : std::string("I")) +
                          ": " + errors[i]);
    table.set_entry(k, p, std::move(results[i]));
  }
  return table;
}

}  // namespace hoqtt
