#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ktrg/lattice.hpp"

namespace ktrg::poly {

// Paving of the torus by L^{2(R-j)} blocks of side L^j; the central block is
// {x : |x|_inf <= L^j / 2}. Blocks are addressed by centered block
// coordinates c in [-(n-1)/2, (n-1)/2]^2, n = L^{R-j}.
class Paving {
 public:
  static Paving make(const Lattice& lattice, int j);

  const Lattice& lattice() const { return lattice_; }
  int j() const { return j_; }
  int per_side() const { return n_; }
  int block_side() const { return side_; }
  int count() const { return n_ * n_; }

  int id(int c0, int c1) const;
  Site coords(int id) const;
  int block_of(Site x) const;
  Site center(int id) const;
  std::vector<Site> sites(int id) const;
  // Face neighbours in the order +e0, +e1, -e0, -e1.
  std::array<int, 4> neighbors(int id) const;
  // Block of the next paving that contains this one.
  int parent(int id) const;

 private:
  Paving(Lattice lattice, int j);
  Lattice lattice_;
  int j_;
  int n_;
  int side_;
};

struct Polymer {
  int j = 0;
  std::vector<int> blocks;  // sorted, unique

  std::size_t size() const { return blocks.size(); }
  bool contains(int block) const;
  bool empty() const { return blocks.empty(); }
  friend auto operator<=>(const Polymer&, const Polymer&) = default;
};

Polymer make_polymer(const Paving& p, std::vector<int> blocks);
Polymer polymer_union(const Polymer& a, const Polymer& b);

bool is_connected(const Paving& p, const Polymer& X);
// A connected polymer whose lift to Z^2 is inconsistent goes around the torus.
bool wraps(const Paving& p, const Polymer& X);
bool is_small(const Paving& p, const Polymer& X);
std::vector<Polymer> components(const Paving& p, const Polymer& X);
// Smallest polymer of the next paving containing X.
Polymer closure(const Paving& pj, const Paving& pj1, const Polymer& X);
// Union of the small polymers that meet X.
Polymer neighborhood(const Paving& p, const Polymer& X);

// Connected polymers with at most max_size blocks containing `block`.
std::vector<Polymer> connected_containing(const Paving& p, int block, int max_size);
// All distinct connected polymers with at most max_size blocks.
std::vector<Polymer> connected_polymers(const Paving& p, int max_size);
std::vector<Polymer> small_containing(const Paving& p, int block);
std::vector<Polymer> small_polymers(const Paving& p);

struct SmallCount {
  long count = 0;
  bool wrap_affected = false;  // block grid narrower than 9
};
SmallCount count_small_containing(const Paving& p, int block);
// Number of small polymers containing a fixed block on a grid of >= 9 blocks.
long count_S(int L);

// A^{|V|} sum over Y with closure V of (lambda A)^{-|Y|}, split by size.
struct ActivitySum {
  std::vector<long long> counts;  // index |Y|
  double value = 0.0;
};
ActivitySum k_small(const Paving& pj, const Paving& pj1, const Polymer& V, double A, double lambda);
ActivitySum k_large(const Paving& pj, const Paving& pj1, const Polymer& V, double A, double lambda,
                    long long budget = 20'000'000);
// Supremum of k_small over connected V (all V with small preimages have at
// most 4 blocks).
double k_small_sup(int L, double A, double lambda);

bool reblock_inequality(const Paving& pj, const Paving& pj1, const Polymer& X, double eta);
// Largest eta for which the inequality holds on every member; +inf when no
// member constrains it.
double max_reblock_eta(const Paving& pj, const Paving& pj1, std::span<const Polymer> family);

void write_enumeration_csv(std::ostream& out, const Paving& pj, const Paving& pj1, std::span<const Polymer> family);

}  // namespace ktrg::poly
