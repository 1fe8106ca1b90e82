#include "kexp/krylov.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace kexp {

std::string to_string(KrylovMode mode) {
  switch (mode) {
    case KrylovMode::arnoldi: return "arnoldi";
    case KrylovMode::lanczos: return "lanczos";
    case KrylovMode::automatic: return "auto";
  }
  return "auto";
}

std::string to_string(Reorthogonalization r) {
  switch (r) {
    case Reorthogonalization::none: return "none";
    case Reorthogonalization::full: return "full";
    case Reorthogonalization::twice: return "twice";
  }
  return "twice";
}

KrylovMode parse_krylov_mode(const std::string& text) {
  if (text == "arnoldi") return KrylovMode::arnoldi;
  if (text == "lanczos") return KrylovMode::lanczos;
  if (text == "auto") return KrylovMode::automatic;
  throw std::invalid_argument("unknown Krylov mode '" + text + "'");
}

Reorthogonalization parse_reorthogonalization(const std::string& text) {
  if (text == "none") return Reorthogonalization::none;
  if (text == "full") return Reorthogonalization::full;
  if (text == "twice") return Reorthogonalization::twice;
  throw std::invalid_argument("unknown reorthogonalization '" + text + "'");
}

KrylovConfig KrylovConfig::with_defaults(std::size_t m_max, KrylovMode mode) {
  KrylovConfig cfg;
  cfg.m_max = m_max;
  cfg.mode = mode;
  cfg.reorthogonalize = m_max > 20 ? Reorthogonalization::twice : Reorthogonalization::full;
  return cfg;
}

void KrylovConfig::validate() const {
  if (m_max < 1) throw std::invalid_argument("KrylovConfig: m_max must be >= 1");
  if (breakdown_tol && !(*breakdown_tol > 0.0)) {
    throw std::invalid_argument("KrylovConfig: breakdown_tol must be positive");
  }
}

std::span<const Complex> KrylovDecomposition::v(std::size_t j) const {
  const std::size_t cols = basis.size() / n;
  if (j >= cols) throw std::out_of_range("KrylovDecomposition::v");
  return {basis.data() + j * n, n};
}

std::span<const Complex> KrylovDecomposition::v_next() const {
  if (breakdown) throw std::logic_error("KrylovDecomposition: no v_{m+1} after breakdown");
  return v(m);
}

CVector KrylovDecomposition::combine(std::span<const Complex> coeffs) const {
  if (coeffs.size() * n > basis.size()) throw std::invalid_argument("combine: too many coefficients");
  CVector y(n);
  for (std::size_t j = 0; j < coeffs.size(); ++j) axpy(coeffs[j], v(j), y);
  return y;
}

double KrylovDecomposition::log_tau_gamma() const {
  if (breakdown || tau_next == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(tau_next) + log_gamma;
}

KrylovBuilder::KrylovBuilder(const SparseOperator& a, std::span<const Complex> v,
                             const KrylovConfig& cfg)
    : a_(&a) {
  cfg.validate();
  const std::size_t n = a.dimension();
  if (v.size() != n) throw std::invalid_argument("build_krylov: starting vector has wrong length");
  if (std::abs(norm2(v) - 1.0) > 1e-12) {
    throw std::invalid_argument("build_krylov: starting vector must have unit norm");
  }
  KrylovMode mode = cfg.mode;
  if (mode == KrylovMode::automatic) {
    mode = a.structure() == Structure::hermitian ? KrylovMode::lanczos : KrylovMode::arnoldi;
  }
  if (mode == KrylovMode::lanczos && a.structure() != Structure::hermitian) {
    throw std::invalid_argument("build_krylov: Lanczos mode requires a Hermitian operator");
  }
  dec_.n = n;
  dec_.m = 0;
  dec_.basis.assign(v.begin(), v.end());
  dec_.mode = mode;
  dec_.reorthogonalize = cfg.reorthogonalize;
  dec_.m_max = cfg.m_max;
  dec_.breakdown_tol = cfg.breakdown_tol.value_or(static_cast<double>(n) *
                                                  std::numeric_limits<double>::epsilon() * a.norm1());
  if (dec_.breakdown_tol == 0.0) dec_.breakdown_tol = std::numeric_limits<double>::min();
  check_operator();
}

KrylovBuilder::KrylovBuilder(const SparseOperator& a, KrylovDecomposition dec)
    : a_(&a), dec_(std::move(dec)) {
  if (dec_.n != a.dimension()) throw std::invalid_argument("extend_krylov: operator dimension mismatch");
  check_operator();
}

void KrylovBuilder::check_operator() const {
  if (dec_.mode == KrylovMode::lanczos && a_->structure() != Structure::hermitian) {
    throw std::invalid_argument("build_krylov: Lanczos mode requires a Hermitian operator");
  }
}

bool KrylovBuilder::can_step() const { return !dec_.breakdown && dec_.m < dec_.m_max; }

bool KrylovBuilder::step() {
  if (!can_step()) return false;
  const std::size_t n = dec_.n;
  const std::size_t j = dec_.m;  // column of T being computed
  w_.resize(n);
  a_->matvec(dec_.v(j), w_);
  ++dec_.matvecs;

  std::vector<Complex> h(j + 1, Complex{});
  auto project_out = [&](std::size_t i, bool accumulate) {
    const Complex c = dot(dec_.v(i), w_);
    axpy(-c, dec_.v(i), w_);
    if (accumulate) h[i] += c;
  };

  if (dec_.mode == KrylovMode::lanczos) {
    const double alpha = dot(dec_.v(j), w_).real();
    axpy(-alpha, dec_.v(j), w_);
    // beta_{j-1} is still pending in tau_next until T grows below.
    if (j > 0) axpy(-dec_.tau_next, dec_.v(j - 1), w_);
    h[j] = alpha;
    if (j > 0) h[j - 1] = dec_.tau_next;
    const int passes = dec_.reorthogonalize == Reorthogonalization::none   ? 0
                       : dec_.reorthogonalize == Reorthogonalization::full ? 1
                                                                           : 2;
    for (int pass = 0; pass < passes; ++pass)
      for (std::size_t i = 0; i <= j; ++i) project_out(i, false);
  } else {
    for (std::size_t i = 0; i <= j; ++i) project_out(i, true);
    if (dec_.reorthogonalize == Reorthogonalization::twice)
      for (std::size_t i = 0; i <= j; ++i) project_out(i, true);
  }
  const double beta = norm2(w_);

  // Grow T to (j+1) x (j+1).
  DenseMatrix t(j + 1, j + 1);
  for (std::size_t r = 0; r < j; ++r)
    for (std::size_t c = 0; c < j; ++c) t(r, c) = dec_.t(r, c);
  if (j > 0) t(j, j - 1) = dec_.tau_next;
  for (std::size_t i = 0; i <= j; ++i) t(i, j) = h[i];
  if (j > 0) {
    dec_.gamma *= dec_.tau_next;
    dec_.log_gamma += std::log(dec_.tau_next);
  }
  dec_.t = std::move(t);
  dec_.m = j + 1;

  if (beta <= dec_.breakdown_tol || dec_.m == n) {
    dec_.breakdown = true;
    dec_.tau_next = 0.0;
    dec_.basis.resize(dec_.m * n);
    return false;
  }
  dec_.tau_next = beta;
  scale(1.0 / beta, w_);
  dec_.basis.insert(dec_.basis.end(), w_.begin(), w_.end());
  return can_step();
}

KrylovDecomposition build_krylov(const SparseOperator& a, std::span<const Complex> v,
                                 const KrylovConfig& cfg) {
  KrylovBuilder builder(a, v, cfg);
  while (builder.step()) {
  }
  return builder.release();
}

KrylovDecomposition extend_krylov(const KrylovDecomposition& dec, const SparseOperator& a,
                                  std::size_t steps) {
  if (steps == 0) return dec;
  if (dec.breakdown) throw std::logic_error("extend_krylov: decomposition already broke down");
  if (dec.m + steps > dec.m_max) throw std::logic_error("extend_krylov: would exceed m_max");
  KrylovBuilder builder(a, dec);
  for (std::size_t k = 0; k < steps; ++k) {
    if (!builder.can_step()) break;
    builder.step();
  }
  return builder.release();
}

void write_decomposition_csv(std::ostream& out, const KrylovDecomposition& dec) {
  out << "key,i,j,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < dec.m; ++i)
    for (std::size_t j = 0; j < dec.m; ++j)
      if (dec.t(i, j) != Complex{})
        out << "T," << i + 1 << ',' << j + 1 << ',' << dec.t(i, j).real() << ',' << dec.t(i, j).imag() << '\n';
  out << "tau,,," << dec.tau_next << ",0\n";
  out << "gamma,,," << dec.gamma << ",0\n";
  out << "log_gamma,,," << dec.log_gamma << ",0\n";
  out << "m,,," << dec.m << ",0\n";
  out << "breakdown,,," << (dec.breakdown ? 1 : 0) << ",0\n";
  out << "matvecs,,," << dec.matvecs << ",0\n";
}

}  // namespace kexp
