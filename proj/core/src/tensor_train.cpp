#include "hoqtt/tensor_train.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace hoqtt {

std::uint64_t pow_u64(int q, int L) {
  if (q < 2) throw std::invalid_argument("mode size q must be >= 2");
  if (L < 0) throw std::invalid_argument("L must be >= 0");
  std::uint64_t r = 1;
  for (int i = 0; i < L; ++i) {
    if (r > UINT64_MAX / static_cast<std::uint64_t>(q))
      throw std::overflow_error("q^L does not fit into 64 bits");
    r *= static_cast<std::uint64_t>(q);
  }
  return r;
}

DigitIndex fold_index(std::uint64_t i, int L, int q) {
  std::uint64_t size = pow_u64(q, L);
  if (i >= size) throw std::out_of_range("fold_index: index out of range");
  DigitIndex d;
  d.digits.resize(L);
  for (int nu = 0; nu < L; ++nu) {
    d.digits[nu] = static_cast<std::uint8_t>(i % q + 1);
    i /= q;
  }
  return d;
}

std::uint64_t unfold_index(const DigitIndex& d, int q) {
  std::uint64_t i = 0;
  std::uint64_t stride = 1;
  for (std::size_t nu = 0; nu < d.digits.size(); ++nu) {
    int digit = d.digits[nu];
    if (digit < 1 || digit > q)
      throw std::out_of_range("unfold_index: digit outside {1,..,q}");
    i += stride * static_cast<std::uint64_t>(digit - 1);
    if (nu + 1 < d.digits.size()) stride *= static_cast<std::uint64_t>(q);
  }
  return i;
}

TTVector::TTVector(int q, std::vector<TTCore> cores) : q_(q), cores_(std::move(cores)) {
  if (q_ < 2) throw std::invalid_argument("TTVector: q must be >= 2");
  if (cores_.empty()) throw std::invalid_argument("TTVector: no cores");
  if (cores_.front().r_left != 1 || cores_.back().r_right != 1)
    throw std::invalid_argument("TTVector: boundary ranks must be 1");
  for (std::size_t nu = 0; nu < cores_.size(); ++nu) {
    const TTCore& c = cores_[nu];
    if (c.q != q_) throw std::invalid_argument("TTVector: core mode size mismatch");
    if (c.r_left < 1 || c.r_right < 1)
      throw std::invalid_argument("TTVector: ranks must be positive");
    if (nu > 0 && cores_[nu - 1].r_right != c.r_left)
      throw std::invalid_argument("TTVector: adjacent core ranks mismatch");
    std::size_t expect = static_cast<std::size_t>(c.r_left) * c.q * c.r_right;
    if (c.data.size() != expect)
      throw std::invalid_argument("TTVector: core data size mismatch");
    for (double v : c.data)
      if (!std::isfinite(v))
        throw std::invalid_argument("TTVector: non-finite core entry");
  }
  pow_u64(q_, length());  // representable length
}

std::vector<int> TTVector::ranks() const {
  std::vector<int> r;
  r.reserve(cores_.size() + 1);
  r.push_back(cores_.front().r_left);
  for (const TTCore& c : cores_) r.push_back(c.r_right);
  return r;
}

int TTVector::max_rank() const {
  int m = 1;
  for (const TTCore& c : cores_) m = std::max(m, std::max(c.r_left, c.r_right));
  return m;
}

std::uint64_t TTVector::parameter_count() const {
  std::uint64_t s = 0;
  for (const TTCore& c : cores_)
    s += static_cast<std::uint64_t>(c.r_left) * c.q * c.r_right;
  return s;
}

double TTVector::evaluate(const DigitIndex& d) const {
  if (d.length() != cores_.size())
    throw std::invalid_argument("evaluate: digit count != L");
  std::vector<double> cur(1, 1.0), next;
  for (std::size_t nu = 0; nu < cores_.size(); ++nu) {
    const TTCore& c = cores_[nu];
    int digit = d.digits[nu];
    if (digit < 1 || digit > q_)
      throw std::out_of_range("evaluate: digit outside {1,..,q}");
    int j = digit - 1;
    next.assign(c.r_right, 0.0);
    const double* slice = c.data.data() +
                          static_cast<std::size_t>(c.r_left) * j;
    std::size_t col_stride = static_cast<std::size_t>(c.r_left) * q_;
    for (int b = 0; b < c.r_right; ++b) {
      const double* col = slice + col_stride * b;
      double acc = 0.0;
      for (int a = 0; a < c.r_left; ++a) acc += cur[a] * col[a];
      next[b] = acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

namespace {

using Eigen::MatrixXd;

TTCore core_from_matrix(const MatrixXd& U, int r_left, int q, int r_right) {
  // U is (r_left*q) x r_right with row index a + r_left*j.
  TTCore c;
  c.r_left = r_left;
  c.q = q;
  c.r_right = r_right;
  c.data.resize(static_cast<std::size_t>(r_left) * q * r_right);
  for (int b = 0; b < r_right; ++b)
    for (int j = 0; j < q; ++j)
      for (int a = 0; a < r_left; ++a)
        c.at(a, j, b) = U(a + static_cast<std::size_t>(r_left) * j, b);
  return c;
}

// Rank after discarding a trailing tail of singular values whose l2 mass is
// below delta; always keeps at least one.
int truncation_rank(const Eigen::VectorXd& sv, double delta) {
  int k = static_cast<int>(sv.size());
  double tail = 0.0;
  while (k > 1) {
    double s = sv[k - 1];
    if (std::sqrt(tail + s * s) > delta) break;
    tail += s * s;
    --k;
  }
  return k;
}

}  // namespace

TTVector tt_from_full(std::span<const double> v, int q, double tol) {
  if (v.empty()) throw std::invalid_argument("tt_from_full: empty vector");
  // length must be an exact power of q
  int L = 0;
  {
    std::uint64_t n = v.size();
    while (n > 1) {
      if (n % q != 0)
        throw std::invalid_argument("tt_from_full: length is not a power of q");
      n /= q;
      ++L;
    }
  }
  if (L == 0) throw std::invalid_argument("tt_from_full: need at least q entries");
  if (v.size() > (std::uint64_t(1) << 24))
    throw std::invalid_argument("tt_from_full: vector too large to materialize");

  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  double delta = tol * norm / std::sqrt(static_cast<double>(std::max(L - 1, 1)));

  std::vector<TTCore> cores;
  cores.reserve(L);
  // Column-major reshapes keep the fast digit in the rows, so every step is
  // a free reinterpret of the carry matrix.
  MatrixXd carry = Eigen::Map<const MatrixXd>(v.data(), 1, v.size());
  int r = 1;
  std::uint64_t rest = v.size();
  for (int nu = 0; nu < L - 1; ++nu) {
    rest /= q;
    Eigen::Map<const MatrixXd> m(carry.data(), static_cast<Eigen::Index>(r) * q,
                                 static_cast<Eigen::Index>(rest));
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    int k = truncation_rank(svd.singularValues(), delta);
    MatrixXd U = svd.matrixU().leftCols(k);
    cores.push_back(core_from_matrix(U, r, q, k));
    carry = svd.singularValues().head(k).asDiagonal() *
            svd.matrixV().leftCols(k).transpose();
    r = k;
  }
  Eigen::Map<const MatrixXd> last(carry.data(), static_cast<Eigen::Index>(r) * q, 1);
  cores.push_back(core_from_matrix(last, r, q, 1));
  return TTVector(q, std::move(cores));
}

std::vector<double> tt_to_full(const TTVector& t, std::uint64_t cap) {
  std::uint64_t size = t.vector_size();
  if (size > cap) throw std::invalid_argument("tt_to_full: vector too large");
  int q = t.mode_size();
  MatrixXd block = MatrixXd::Ones(1, 1);
  for (const TTCore& c : t.cores()) {
    MatrixXd next(block.rows() * q, c.r_right);
    Eigen::Map<const MatrixXd> core_mat(c.data.data(),
                                        static_cast<Eigen::Index>(c.r_left) * q,
                                        c.r_right);
    for (int j = 0; j < q; ++j) {
      // slice rows a + r_left*j of the left matricization
      next.middleRows(block.rows() * j, block.rows()) =
          block * core_mat.middleRows(static_cast<Eigen::Index>(c.r_left) * j, c.r_left);
    }
    block.swap(next);
  }
  return std::vector<double>(block.data(), block.data() + size);
}

TTVector tt_round(const TTVector& t, double eps) {
  if (eps < 0.0) throw std::invalid_argument("tt_round: eps must be >= 0");
  int L = t.length();
  int q = t.mode_size();
  if (L == 1) return t;

  // Right-to-left orthogonalization. G_nu viewed as r_left x (q*r_right);
  // LQ via QR of the transpose.
  std::vector<MatrixXd> mats(L);
  {
    const auto& cores = t.cores();
    for (int nu = 0; nu < L; ++nu)
      mats[nu] = Eigen::Map<const MatrixXd>(cores[nu].data.data(), cores[nu].r_left,
                                            static_cast<Eigen::Index>(q) * cores[nu].r_right);
  }
  std::vector<int> rl(L + 1, 1);  // running ranks
  {
    auto r = t.ranks();
    for (int i = 0; i <= L; ++i) rl[i] = r[i];
  }
  for (int nu = L - 1; nu >= 1; --nu) {
    // mats[nu]: r_{nu} x (q * r_{nu+1})
    Eigen::HouseholderQR<MatrixXd> qr(mats[nu].transpose());
    int k = static_cast<int>(std::min(mats[nu].rows(), mats[nu].cols()));
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(mats[nu].cols(), k);
    MatrixXd Lfac = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Lfac.transposeInPlace();  // r_nu x k
    mats[nu] = Q.transpose();  // k x (q*r_{nu+1}), orthonormal rows
    // absorb L into the previous core: (r_{nu-1} q) x r_nu times r_nu x k
    MatrixXd prev_left = Eigen::Map<const MatrixXd>(
        mats[nu - 1].data(), static_cast<Eigen::Index>(rl[nu - 1]) * q, rl[nu]);
    MatrixXd absorbed = prev_left * Lfac;  // (r_{nu-1} q) x k
    mats[nu - 1] = Eigen::Map<const MatrixXd>(absorbed.data(), rl[nu - 1],
                                              static_cast<Eigen::Index>(q) * k);
    rl[nu] = k;
  }

  double norm = mats[0].norm();  // cores 1..L-1 are right-orthogonal
  double delta = eps * norm / std::sqrt(static_cast<double>(std::max(L - 1, 1)));

  // Left-to-right truncation sweep.
  std::vector<TTCore> out(L);
  MatrixXd carry = MatrixXd::Identity(1, 1);
  for (int nu = 0; nu < L - 1; ++nu) {
    MatrixXd cur = carry * mats[nu];  // r'_{nu} x (q r_{nu+1}) rows scaled
    int r_left = static_cast<int>(carry.rows());
    // reshape to (r_left q) x r_{nu+1}
    MatrixXd m = Eigen::Map<const MatrixXd>(cur.data(), static_cast<Eigen::Index>(r_left) * q,
                                            rl[nu + 1]);
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    int k = truncation_rank(svd.singularValues(), delta);
    if (eps == 0.0) k = static_cast<int>(svd.singularValues().size());
    MatrixXd U = svd.matrixU().leftCols(k);
    out[nu] = core_from_matrix(U, r_left, q, k);
    carry = svd.singularValues().head(k).asDiagonal() *
            svd.matrixV().leftCols(k).transpose();
  }
  MatrixXd lastflat = carry * mats[L - 1];  // r x (q*1)
  MatrixXd last = Eigen::Map<const MatrixXd>(
      lastflat.data(), static_cast<Eigen::Index>(lastflat.rows()) * q, 1);
  out[L - 1] = core_from_matrix(last, static_cast<int>(lastflat.rows()), q, 1);
  return TTVector(q, std::move(out));
}

std::pair<TTVector, TTVector> exp_qtt(double omega, double h, int L) {
  if (L < 1 || L > 63) throw std::invalid_argument("exp_qtt: L must be in [1,63]");
  const int q = 2;
  double step = omega * h;

  if (step == 0.0) {
    std::vector<TTCore> ones(L), zeros(L);
    for (int nu = 0; nu < L; ++nu) {
      TTCore c;
      c.r_left = c.r_right = 1;
      c.q = q;
      c.data = {1.0, 1.0};
      ones[nu] = c;
      TTCore z = c;
      if (nu == 0) z.data = {0.0, 0.0};
      zeros[nu] = z;
    }
    return {TTVector(q, std::move(ones)), TTVector(q, std::move(zeros))};
  }

  if (L == 1) {
    TTCore cc, cs;
    cc.r_left = cc.r_right = 1;
    cc.q = q;
    cc.data = {1.0, std::cos(step)};
    cs = cc;
    cs.data = {0.0, std::sin(step)};
    return {TTVector(q, {cc}), TTVector(q, {cs})};
  }

  auto theta = [&](int nu) { return step * std::ldexp(1.0, nu); };  // w h 2^nu

  std::vector<TTCore> cos_cores(L), sin_cores(L);
  {
    // first core: [cos(t (j-1)), sin(t (j-1))] row per digit
    TTCore c;
    c.r_left = 1;
    c.q = q;
    c.r_right = 2;
    c.data.resize(4);
    double t = theta(0);
    c.at(0, 0, 0) = 1.0;
    c.at(0, 0, 1) = 0.0;
    c.at(0, 1, 0) = std::cos(t);
    c.at(0, 1, 1) = std::sin(t);
    cos_cores[0] = c;
    sin_cores[0] = c;
  }
  for (int nu = 1; nu < L - 1; ++nu) {
    TTCore c;
    c.r_left = c.r_right = 2;
    c.q = q;
    c.data.resize(8);
    double t = theta(nu);
    // digit 1: identity, digit 2: rotation by t
    c.at(0, 0, 0) = 1.0; c.at(0, 0, 1) = 0.0;
    c.at(1, 0, 0) = 0.0; c.at(1, 0, 1) = 1.0;
    c.at(0, 1, 0) = std::cos(t); c.at(0, 1, 1) = std::sin(t);
    c.at(1, 1, 0) = -std::sin(t); c.at(1, 1, 1) = std::cos(t);
    cos_cores[nu] = c;
    sin_cores[nu] = c;
  }
  {
    double t = theta(L - 1);
    TTCore cc;
    cc.r_left = 2;
    cc.q = q;
    cc.r_right = 1;
    cc.data.resize(4);
    // rotation applied to e_1 gives the cos column, to e_2 the sin column
    cc.at(0, 0, 0) = 1.0;
    cc.at(1, 0, 0) = 0.0;
    cc.at(0, 1, 0) = std::cos(t);
    cc.at(1, 1, 0) = -std::sin(t);
    TTCore cs = cc;
    cs.at(0, 0, 0) = 0.0;
    cs.at(1, 0, 0) = 1.0;
    cs.at(0, 1, 0) = std::sin(t);
    cs.at(1, 1, 0) = std::cos(t);
    cos_cores[L - 1] = cc;
    sin_cores[L - 1] = cs;
  }
  return {TTVector(q, std::move(cos_cores)), TTVector(q, std::move(sin_cores))};
}

double effective_rank(const TTVector& t) {
  int L = t.length();
  if (L < 3) throw std::invalid_argument("effective_rank: L must be >= 3");
  double q = t.mode_size();
  double S = static_cast<double>(t.parameter_count());
  double Lm2 = L - 2;
  // q (L-2) r^2 + 2 q r - S = 0
  return (-1.0 + std::sqrt(1.0 + Lm2 * S / q)) / Lm2;
}

}  // namespace hoqtt
