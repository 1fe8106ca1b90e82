#include "kexp/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace kexp {

namespace {

constexpr int kSites = 8;
constexpr int kPerSpin = 4;

SparseOperator laplacian_chain(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, -0.25});
    t.push_back({i, i, 0.5});
    if (i + 1 < n) t.push_back({i, i + 1, -0.25});
  }
  return SparseOperator::from_triplets(n, std::move(t), Structure::hermitian);
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::schrodinger_free: return "schrodinger";
    case ProblemKind::heat: return "heat";
    case ProblemKind::hubbard: return "hubbard";
    case ProblemKind::convection_diffusion: return "convdiff";
  }
  return "schrodinger";
}

ProblemKind parse_problem_kind(const std::string& text) {
  if (text == "schrodinger" || text == "schrodinger_free") return ProblemKind::schrodinger_free;
  if (text == "heat") return ProblemKind::heat;
  if (text == "hubbard") return ProblemKind::hubbard;
  if (text == "convdiff" || text == "convection_diffusion") return ProblemKind::convection_diffusion;
  throw std::invalid_argument("unknown problem '" + text + "'");
}

void ProblemSpec::validate() const {
  switch (kind) {
    case ProblemKind::schrodinger_free:
    case ProblemKind::heat:
      if (n < 2) throw std::invalid_argument("problem: n must be >= 2");
      break;
    case ProblemKind::convection_diffusion:
      if (n < 2) throw std::invalid_argument("problem: n must be >= 2");
      if (n > 1625) throw std::invalid_argument("problem: n^3 must fit 32-bit indices");
      if (!std::isfinite(mu1) || !std::isfinite(mu2)) throw std::invalid_argument("problem: mu must be finite");
      break;
    case ProblemKind::hubbard:
      if (!std::isfinite(omega) || !std::isfinite(hubbard_u)) {
        throw std::invalid_argument("problem: omega and U must be finite");
      }
      break;
  }
}

LinearOperator build_schrodinger(std::size_t n) {
  if (n < 2) throw std::invalid_argument("build_schrodinger: n must be >= 2");
  return {laplacian_chain(n), Prefactor::minus_i(), true};
}

LinearOperator build_heat(std::size_t n) {
  if (n < 2) throw std::invalid_argument("build_heat: n must be >= 2");
  return {laplacian_chain(n), Prefactor::minus_one(), true};
}

std::vector<std::uint16_t> hubbard_basis() {
  std::vector<std::uint16_t> basis;
  for (std::uint32_t s = 0; s < (1u << (2 * kSites)); ++s) {
    if (std::popcount(s & 0xffu) == kPerSpin && std::popcount(s >> kSites) == kPerSpin) {
      basis.push_back(static_cast<std::uint16_t>(s));
    }
  }
  return basis;
}

LinearOperator build_hubbard(double omega, double u) {
  const std::vector<std::uint16_t> basis = hubbard_basis();
  std::vector<std::int32_t> index(1u << (2 * kSites), -1);
  for (std::size_t k = 0; k < basis.size(); ++k) index[basis[k]] = static_cast<std::int32_t>(k);

  double onsite[kSites];
  for (int j = 0; j < kSites; ++j) onsite[j] = (j == 0 || j == kSites - 1) ? -1.75 : -2.0;
  // v_{j,j+1}: hop from site j to j+1; the reverse hop carries the conjugate.
  const Complex forward(-std::cos(omega), std::sin(omega));

  std::vector<Triplet> t;
  t.reserve(basis.size() * 10);
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const std::uint32_t s = basis[col];
    double diag = 0.0;
    for (int j = 0; j < kSites; ++j) {
      const bool up = (s >> j) & 1u;
      const bool down = (s >> (kSites + j)) & 1u;
      diag += onsite[j] * (static_cast<int>(up) + static_cast<int>(down));
      if (up && down) diag += u;
    }
    t.push_back({col, col, diag});
    for (int spin = 0; spin < 2; ++spin) {
      const int off = spin * kSites;
      for (int j = 0; j + 1 < kSites; ++j) {
        const std::uint32_t a = 1u << (off + j), b = 1u << (off + j + 1);
        // Adjacent bits of one spin species: no fermionic sign.
        if ((s & a) && !(s & b)) {
          const auto row = static_cast<std::size_t>(index[(s & ~a) | b]);
          t.push_back({row, col, forward});
        } else if (!(s & a) && (s & b)) {
          const auto row = static_cast<std::size_t>(index[(s & ~b) | a]);
          t.push_back({row, col, std::conj(forward)});
        }
      }
    }
  }
  // Exact zeros on the diagonal are not stored.
  std::erase_if(t, [](const Triplet& e) { return e.value == Complex{}; });
  return {SparseOperator::from_triplets(basis.size(), std::move(t), Structure::hermitian), Prefactor::minus_i(),
          true};
}

LinearOperator build_convection_diffusion(std::size_t n, double mu1, double mu2) {
  if (n < 2) throw std::invalid_argument("build_convection_diffusion: n must be >= 2");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double s = 1.0 / (h * h);
  const std::size_t big_n = n * n * n;
  std::vector<Triplet> t;
  t.reserve(7 * big_n);
  auto at = [n](std::size_t i1, std::size_t i2, std::size_t i3) { return (i1 * n + i2) * n + i3; };
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      for (std::size_t i3 = 0; i3 < n; ++i3) {
        const std::size_t r = at(i1, i2, i3);
        t.push_back({r, r, -6.0 * s});
        // C1 on the fastest index.
        if (i3 > 0) t.push_back({r, at(i1, i2, i3 - 1), (1.0 + mu1) * s});
        if (i3 + 1 < n) t.push_back({r, at(i1, i2, i3 + 1), (1.0 - mu1) * s});
        // C2 on the middle index.
        if (i2 > 0) t.push_back({r, at(i1, i2 - 1, i3), (1.0 + mu2) * s});
        if (i2 + 1 < n) t.push_back({r, at(i1, i2 + 1, i3), (1.0 - mu2) * s});
        // B on the slowest index.
        if (i1 > 0) t.push_back({r, at(i1 - 1, i2, i3), s});
        if (i1 + 1 < n) t.push_back({r, at(i1 + 1, i2, i3), s});
      }
    }
  }
  std::erase_if(t, [](const Triplet& e) { return e.value == Complex{}; });
  const Structure structure = (mu1 == 0.0 && mu2 == 0.0) ? Structure::hermitian : Structure::general;
  // The symmetric part is a negative definite Laplacian, so sigma A = A is
  // nonexpansive for every mu.
  return {SparseOperator::from_triplets(big_n, std::move(t), structure), Prefactor::one(), true};
}

LinearOperator build_problem(const ProblemSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ProblemKind::schrodinger_free: return build_schrodinger(spec.n);
    case ProblemKind::heat: return build_heat(spec.n);
    case ProblemKind::hubbard: return build_hubbard(spec.omega, spec.hubbard_u);
    case ProblemKind::convection_diffusion: return build_convection_diffusion(spec.n, spec.mu1, spec.mu2);
  }
  throw std::invalid_argument("build_problem: unknown kind");
}

CVector random_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CVector v(n);
  for (auto& z : v) z = Complex(unif(rng), unif(rng));
  scale(1.0 / norm2(v), v);
  return v;
}

CVector starting_vector(const ProblemSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::size_t dim = spec.n;
  if (spec.kind == ProblemKind::hubbard) dim = 4900;
  if (spec.kind == ProblemKind::convection_diffusion) {
    dim = spec.n * spec.n * spec.n;
    return CVector(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  }
  return random_unit_vector(dim, seed);
}

CVector starting_vector(const ProblemSpec& spec) { return starting_vector(spec, spec.seed); }

}  // namespace kexp
