#include "hoqtt/quadrature.hpp"

#include "simd_kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hoqtt {

namespace {

GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Asymptotic initial guess for the i-th root of P_n, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) {
        // one more corrected derivative for the weight
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;  // roots found from the positive end; store increasing
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1 || n > 64)
    throw std::invalid_argument("gauss_legendre: n must be in [1,64]");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double composite_integrate(const std::function<double(double)>& f, double a,
                           double b, int m, int n) {
  if (!(a < b)) throw std::invalid_argument("composite_integrate: need a < b");
  if (m < 1) throw std::invalid_argument("composite_integrate: need m >= 1");
  const GaussLegendreRule& rule = gauss_legendre(n);
  double h = (b - a) / m;
  double sum = 0.0;
  for (int s = 0; s < m; ++s) {
    double mid = a + (s + 0.5) * h;
    double acc = 0.0;
    for (int p = 0; p < n; ++p) {
      double x = mid + 0.5 * h * rule.nodes[p];
      double fx = f(x);
      if (!std::isfinite(fx)) {
        std::ostringstream os;
        os << "composite_integrate: non-finite integrand value at x=" << x;
        throw std::runtime_error(os.str());
      }
      acc += rule.weights[p] * fx;
    }
    sum += 0.5 * h * acc;
  }
  return sum;
}

int QuadratureConfig::subintervals_for(double omega) const {
  int m = subinterval_rule ? subinterval_rule(omega)
                           : std::max(1, static_cast<int>(std::ceil(std::fabs(omega))));
  m = std::max(m, 1) + std::max(extra_subintervals, 0);
  return std::max(m, std::max(min_subintervals, 1));
}

QuadratureConfig QuadratureConfig::defaults_1d() {
  QuadratureConfig cfg;
  cfg.subinterval_rule = [](double w) {
    return std::max(1, static_cast<int>(std::ceil(std::fabs(w))));
  };
  return cfg;
}

QuadratureConfig QuadratureConfig::defaults_multi() {
  QuadratureConfig cfg;
  cfg.subinterval_rule = [](double w) {
    return std::max(1, static_cast<int>(std::ceil(std::fabs(w) / 3.0)));
  };
  return cfg;
}

QuadratureConfig QuadratureConfig::paper_preset(double omega_max) {
  QuadratureConfig cfg;
  int m = std::max(1, static_cast<int>(std::ceil(std::fabs(omega_max))));
  cfg.subinterval_rule = [m](double) { return m; };
  return cfg;
}

// ---------------------------------------------------------------------------

PhaseGridCache::PhaseGridCache(const OscillatorSpec& osc, int n)
    : osc_(osc), n_(n) {
  if (osc_.kind() != OscKind::Phase)
    throw std::invalid_argument("PhaseGridCache: phase oscillators only");
}

std::shared_ptr<const std::vector<double>> PhaseGridCache::grid_1d(int m) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_1d_.find(m);
    if (it != cache_1d_.end()) return it->second;
  }
  const GaussLegendreRule& rule = gauss_legendre(n_);
  auto g = std::make_shared<std::vector<double>>();
  g->reserve(static_cast<std::size_t>(m) * n_);
  double h = 2.0 / m;
  for (int s = 0; s < m; ++s) {
    double mid = -1.0 + (s + 0.5) * h;
    for (int p = 0; p < n_; ++p)
      g->push_back(osc_.phase(mid + 0.5 * h * rule.nodes[p]));
  }
  std::lock_guard<std::mutex> lock(mu_);
  size_1d_ += g->size();
  if (size_1d_ > (std::size_t(1) << 23)) {
    cache_1d_.clear();
    size_1d_ = g->size();
  }
  return cache_1d_.emplace(m, std::move(g)).first->second;
}

std::shared_ptr<const std::vector<double>> PhaseGridCache::grid_multi(int m, int d) {
  auto key = std::make_pair(m, d);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_multi_.find(key);
    if (it != cache_multi_.end()) return it->second;
  }
  const GaussLegendreRule& rule = gauss_legendre(n_);
  double h = 2.0 / m;
  std::size_t per_dim = static_cast<std::size_t>(m) * n_;
  std::vector<double> axis(per_dim);
  for (int s = 0; s < m; ++s) {
    double mid = -1.0 + (s + 0.5) * h;
    for (int p = 0; p < n_; ++p) axis[s * n_ + p] = mid + 0.5 * h * rule.nodes[p];
  }
  auto g = std::make_shared<std::vector<double>>();
  if (d == 2) {
    g->reserve(per_dim * per_dim);
    for (std::size_t i = 0; i < per_dim; ++i)
      for (std::size_t j = 0; j < per_dim; ++j)
        g->push_back(osc_.phase(axis[i], axis[j]));
  } else if (d == 3) {
    g->reserve(per_dim * per_dim * per_dim);
    for (std::size_t i = 0; i < per_dim; ++i)
      for (std::size_t j = 0; j < per_dim; ++j)
        for (std::size_t k = 0; k < per_dim; ++k)
          g->push_back(osc_.phase(axis[i], axis[j], axis[k]));
  } else {
    throw std::invalid_argument("PhaseGridCache: d must be 2 or 3");
  }
  std::lock_guard<std::mutex> lock(mu_);
  size_multi_ += g->size();
  if (size_multi_ > (std::size_t(1) << 24)) {
    cache_multi_.clear();
    size_multi_ = g->size();
  }
  return cache_multi_.emplace(key, std::move(g)).first->second;
}

// ---------------------------------------------------------------------------

OscillatoryEntryEvaluator::OscillatoryEntryEvaluator(
    std::function<double(double)> basis_fn, const OscillatorSpec& osc,
    Part part, QuadratureConfig cfg, std::shared_ptr<PhaseGridCache> shared)
    : basis_(std::move(basis_fn)), osc_(osc), part_(part), cfg_(std::move(cfg)),
      cache_(std::move(shared)) {
  if (osc_.kind() == OscKind::Kernel && part_ == Part::Imag)
    throw std::invalid_argument("kernel oscillators are real-valued; use Part::Real");
  if (osc_.dimension() != 1)
    throw std::invalid_argument("OscillatoryEntryEvaluator: 1-D oscillators only");
  if (!cache_ && osc_.kind() == OscKind::Phase)
    cache_ = std::make_shared<PhaseGridCache>(osc_, cfg_.points_per_subinterval);
}

double OscillatoryEntryEvaluator::integrate_once(double omega, int m) {
  int n = cfg_.points_per_subinterval;
  auto wbit = wb_.find(m);
  if (wbit == wb_.end()) {
    wb_doubles_ += static_cast<std::size_t>(m) * n;
    if (wb_doubles_ > (std::size_t(1) << 23)) {
      wb_.clear();
      nodes_.clear();
      wb_doubles_ = static_cast<std::size_t>(m) * n;
    }
    const GaussLegendreRule& rule = gauss_legendre(n);
    double h = 2.0 / m;
    std::vector<double> wb(static_cast<std::size_t>(m) * n);
    std::vector<double> xs(static_cast<std::size_t>(m) * n);
    for (int s = 0; s < m; ++s) {
      double mid = -1.0 + (s + 0.5) * h;
      for (int p = 0; p < n; ++p) {
        double x = mid + 0.5 * h * rule.nodes[p];
        xs[s * n + p] = x;
        wb[s * n + p] = 0.5 * h * rule.weights[p] * basis_(x);
      }
    }
    wbit = wb_.emplace(m, std::move(wb)).first;
    if (osc_.kind() == OscKind::Kernel) nodes_.emplace(m, std::move(xs));
  }
  const std::vector<double>& wb = wbit->second;

  double sum = 0.0;
  if (osc_.kind() == OscKind::Phase) {
    auto g = cache_->grid_1d(m);
    sum = part_ == Part::Real
              ? detail::weighted_cos_sum(wb.data(), g->data(), wb.size(), omega)
              : detail::weighted_sin_sum(wb.data(), g->data(), wb.size(), omega);
  } else {
    const std::vector<double>& xs = nodes_.at(m);
    for (std::size_t i = 0; i < wb.size(); ++i) {
      double hv = osc_.kernel(omega, xs[i]);
      if (!std::isfinite(hv)) {
        std::ostringstream os;
        os << "oscillatory_entry: non-finite kernel value at x=" << xs[i]
           << ", omega=" << omega;
        throw std::runtime_error(os.str());
      }
      sum += wb[i] * hv;
    }
  }
  return sum;
}

OscEntryResult OscillatoryEntryEvaluator::operator()(double omega) {
  if (!std::isfinite(omega))
    throw std::invalid_argument("oscillatory_entry: omega must be finite");
  int m = cfg_.subintervals_for(omega);
  int mf = m * std::max(cfg_.refinement_factor, 1);
  OscEntryResult r;
  double coarse = integrate_once(omega, m);
  double fine = (mf == m) ? coarse : integrate_once(omega, mf);
  r.value = fine;
  r.validation_delta = std::fabs(fine - coarse);
  r.flagged = r.validation_delta > cfg_.flag_threshold;
  return r;
}

OscEntryResult oscillatory_entry(const std::function<double(double)>& basis_fn,
                                 const OscillatorSpec& osc, double omega,
                                 Part part, const QuadratureConfig& cfg) {
  OscillatoryEntryEvaluator ev(basis_fn, osc, part, cfg);
  return ev(omega);
}

// ---------------------------------------------------------------------------

TensorizedEntryEvaluator::TensorizedEntryEvaluator(
    std::function<double(std::span<const double>)> basis_fn,
    const OscillatorSpec& osc, Part part, QuadratureConfig cfg,
    std::shared_ptr<PhaseGridCache> shared)
    : basis_(std::move(basis_fn)), osc_(osc), part_(part),
      dim_(osc.dimension()), cfg_(std::move(cfg)), cache_(std::move(shared)) {
  if (osc_.kind() != OscKind::Phase)
    throw std::invalid_argument("TensorizedEntryEvaluator: phase oscillators only");
  if (dim_ != 2 && dim_ != 3)
    throw std::invalid_argument("TensorizedEntryEvaluator: d must be 2 or 3");
  if (!cache_)
    cache_ = std::make_shared<PhaseGridCache>(osc_, cfg_.points_per_subinterval);
}

double TensorizedEntryEvaluator::integrate_once(double omega, int m) {
  int n = cfg_.points_per_subinterval;
  std::size_t per_dim = static_cast<std::size_t>(m) * n;
  auto wbit = wb_.find(m);
  if (wbit == wb_.end()) {
    std::size_t points = 1;
    for (int i = 0; i < dim_; ++i) points *= per_dim;
    wb_doubles_ += points;
    if (wb_doubles_ > (std::size_t(1) << 24)) {
      wb_.clear();
      wb_doubles_ = points;
    }
    const GaussLegendreRule& rule = gauss_legendre(n);
    double h = 2.0 / m;
    std::vector<double> axis(per_dim), w1(per_dim);
    for (int s = 0; s < m; ++s) {
      double mid = -1.0 + (s + 0.5) * h;
      for (int p = 0; p < n; ++p) {
        axis[s * n + p] = mid + 0.5 * h * rule.nodes[p];
        w1[s * n + p] = 0.5 * h * rule.weights[p];
      }
    }
    std::vector<double> wb;
    if (dim_ == 2) {
      wb.resize(per_dim * per_dim);
      double y[2];
      for (std::size_t i = 0; i < per_dim; ++i)
        for (std::size_t j = 0; j < per_dim; ++j) {
          y[0] = axis[i];
          y[1] = axis[j];
          wb[i * per_dim + j] = w1[i] * w1[j] * basis_(std::span<const double>(y, 2));
        }
    } else {
      wb.resize(per_dim * per_dim * per_dim);
      double y[3];
      std::size_t idx = 0;
      for (std::size_t i = 0; i < per_dim; ++i)
        for (std::size_t j = 0; j < per_dim; ++j)
          for (std::size_t k = 0; k < per_dim; ++k) {
            y[0] = axis[i];
            y[1] = axis[j];
            y[2] = axis[k];
            wb[idx++] = w1[i] * w1[j] * w1[k] * basis_(std::span<const double>(y, 3));
          }
    }
    wbit = wb_.emplace(m, std::move(wb)).first;
  }
  const std::vector<double>& wb = wbit->second;
  auto g = cache_->grid_multi(m, dim_);
  return part_ == Part::Real
             ? detail::weighted_cos_sum(wb.data(), g->data(), wb.size(), omega)
             : detail::weighted_sin_sum(wb.data(), g->data(), wb.size(), omega);
}

OscEntryResult TensorizedEntryEvaluator::operator()(double omega) {
  if (!std::isfinite(omega))
    throw std::invalid_argument("tensorized entry: omega must be finite");
  int m = cfg_.subintervals_for(omega);
  int mf = m * std::max(cfg_.refinement_factor, 1);
  OscEntryResult r;
  double coarse = integrate_once(omega, m);
  double fine = (mf == m) ? coarse : integrate_once(omega, mf);
  r.value = fine;
  r.validation_delta = std::fabs(fine - coarse);
  r.flagged = r.validation_delta > cfg_.flag_threshold;
  return r;
}

double tensorized_integrate(
    const std::function<double(std::span<const double>)>& f, int d,
    double omega, const QuadratureConfig& cfg, std::uint64_t budget_points) {
  if (d != 2 && d != 3)
    throw std::invalid_argument("tensorized_integrate: d must be 2 or 3");
  int m = cfg.subintervals_for(omega);
  int n = cfg.points_per_subinterval;
  std::uint64_t per_dim = static_cast<std::uint64_t>(m) * n;
  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i) {
    total *= per_dim;
    if (total > budget_points)
      throw std::runtime_error(
          "tensorized_integrate: point budget exceeded; use a smaller omega "
          "or fewer subintervals");
  }
  const GaussLegendreRule& rule = gauss_legendre(n);
  double h = 2.0 / m;
  std::vector<double> axis(per_dim), w1(per_dim);
  for (int s = 0; s < m; ++s) {
    double mid = -1.0 + (s + 0.5) * h;
    for (int p = 0; p < n; ++p) {
      axis[s * n + p] = mid + 0.5 * h * rule.nodes[p];
      w1[s * n + p] = 0.5 * h * rule.weights[p];
    }
  }
  double sum = 0.0;
  if (d == 2) {
    double y[2];
    for (std::size_t i = 0; i < per_dim; ++i)
      for (std::size_t j = 0; j < per_dim; ++j) {
        y[0] = axis[i];
        y[1] = axis[j];
        double fv = f(std::span<const double>(y, 2));
        if (!std::isfinite(fv))
          throw std::runtime_error("tensorized_integrate: non-finite integrand");
        sum += w1[i] * w1[j] * fv;
      }
  } else {
    double y[3];
    for (std::size_t i = 0; i < per_dim; ++i)
      for (std::size_t j = 0; j < per_dim; ++j)
        for (std::size_t k = 0; k < per_dim; ++k) {
          y[0] = axis[i];
          y[1] = axis[j];
          y[2] = axis[k];
          double fv = f(std::span<const double>(y, 3));
          if (!std::isfinite(fv))
            throw std::runtime_error("tensorized_integrate: non-finite integrand");
          sum += w1[i] * w1[j] * w1[k] * fv;
        }
  }
  return sum;
}

}  // namespace hoqtt
