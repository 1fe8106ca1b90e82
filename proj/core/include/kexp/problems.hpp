#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kexp/sparse.hpp"
#include "kexp/types.hpp"

namespace kexp {

enum class ProblemKind { schrodinger_free, heat, hubbard, convection_diffusion };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& text);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::schrodinger_free;
  /// Chain length (Schrodinger, heat) or grid points per axis (convection-diffusion).
  std::size_t n = 200;
  double omega = 0.123;
  double hubbard_u = 5.0;
  double mu1 = 0.9;
  double mu2 = 1.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// H = 1/4 tridiag(-1, 2, -1), sigma = -i.
LinearOperator build_schrodinger(std::size_t n);
/// Same H with sigma = -1.
LinearOperator build_heat(std::size_t n);

/// Eight-site Hubbard chain at half filling (four electrons per spin).
/// Occupation states are 16-bit integers, bit j for site j spin up and bit
/// 8 + j for spin down, ordered by value. Diagonal: sum v_jj n_{j s} +
/// U sum_j n_{j up} n_{j down}; hopping i -> j carries amplitude v_ij.
/// sigma = -i.
LinearOperator build_hubbard(double omega, double u = 5.0);
/// The 4900 occupation states in matrix order.
std::vector<std::uint16_t> hubbard_basis();

/// A = I (x) I (x) C1 + B (x) I (x) I + I (x) C2 (x) I on an n^3 grid,
/// B = h^-2 tridiag(1, -2, 1), C_i = h^-2 tridiag(1 + mu_i, -2, 1 - mu_i),
/// h = 1/(n+1), sigma = 1.
LinearOperator build_convection_diffusion(std::size_t n, double mu1, double mu2);

LinearOperator build_problem(const ProblemSpec& spec);

/// All-ones/sqrt(N) for convection-diffusion, seeded random complex
/// otherwise. Always unit norm.
CVector starting_vector(const ProblemSpec& spec, std::uint64_t seed);
CVector starting_vector(const ProblemSpec& spec);
CVector random_unit_vector(std::size_t n, std::uint64_t seed);

}  // namespace kexp
