#include "ktrg/lattice.hpp"

#include <cmath>

namespace ktrg {

Lattice::Lattice(int L, int R, int gamma, int M, double mass)
    : L_(L), R_(R), gamma_(gamma), M_(M), mass_(mass),
      side_(static_cast<int>(ipow(L, R))) {}

Lattice Lattice::make(int L, int R, int gamma, double mass) {
  if (L <= 1 || L % 2 == 0) throw DomainError("L must be odd and > 1");
  if (R < 1) throw DomainError("R must be positive");
  if (gamma < 3 || gamma % 2 == 0) throw DomainError("gamma must be odd and >= 3");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw DomainError("mass must be finite and >= 0");
  if (R * std::log(double(L)) > std::log(2.0e6)) throw DomainError("side L^R too large");
  int M = 0;
  std::int64_t g = 1;
  while (g < L) {
    g *= gamma;
    ++M;
  }
  if (g != L) throw DomainError("L must be a power of gamma");
  return Lattice(L, R, gamma, M, mass);
}

Lattice Lattice::with_mass(double m) const { return make(L_, R_, gamma_, m); }

}  // namespace ktrg
