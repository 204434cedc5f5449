#include "ktrg/polymer.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "ktrg/csv.hpp"

namespace ktrg::poly {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

int wrap(int c, int n) {
  const int m = (n - 1) / 2;
  return ((c + m) % n + n) % n - m;
}

}  // namespace

Paving::Paving(Lattice lattice, int j)
    : lattice_(std::move(lattice)), j_(j), n_(ipow(lattice_.L(), lattice_.R() - j)), side_(ipow(lattice_.L(), j)) {}

Paving Paving::make(const Lattice& lattice, int j) {
  if (j < 0 || j > lattice.R())
    throw DomainError("paving scale " + std::to_string(j) + " outside [0, " + std::to_string(lattice.R()) + "]");
  return Paving(lattice, j);
}

int Paving::id(int c0, int c1) const {
  const int m = (n_ - 1) / 2;
  return (wrap(c0, n_) + m) * n_ + (wrap(c1, n_) + m);
}

Site Paving::coords(int id) const {
  const int m = (n_ - 1) / 2;
  return {id / n_ - m, id % n_ - m};
}

int Paving::block_of(Site x) const {
  Site r = lattice_.reduce(x);
  const int h = (side_ - 1) / 2;
  return id(floor_div(r.x0 + h, side_), floor_div(r.x1 + h, side_));
}

Site Paving::center(int id) const {
  Site c = coords(id);
  return {c.x0 * side_, c.x1 * side_};
}

std::vector<Site> Paving::sites(int id) const {
  Site c = center(id);
  const int h = (side_ - 1) / 2;
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_));
  for (int a = -h; a <= h; ++a)
    for (int b = -h; b <= h; ++b) out.push_back(lattice_.reduce(Site{c.x0 + a, c.x1 + b}));
  return out;
}

std::array<int, 4> Paving::neighbors(int id) const {
  Site c = coords(id);
  return {this->id(c.x0 + 1, c.x1), this->id(c.x0, c.x1 + 1), this->id(c.x0 - 1, c.x1), this->id(c.x0, c.x1 - 1)};
}

int Paving::parent(int id) const {
  if (j_ >= lattice_.R()) throw DomainError("the top paving has no parent");
  Site c = coords(id);
  const int L = lattice_.L();
  const int h = (L - 1) / 2;
  const int n = n_ / L;
  const int m = (n - 1) / 2;
  return (wrap(floor_div(c.x0 + h, L), n) + m) * n + (wrap(floor_div(c.x1 + h, L), n) + m);
}

bool Polymer::contains(int block) const { return std::binary_search(blocks.begin(), blocks.end(), block); }

Polymer make_polymer(const Paving& p, std::vector<int> blocks) {
  for (int b : blocks)
    if (b < 0 || b >= p.count()) throw DomainError("block id " + std::to_string(b) + " outside the paving");
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  return {p.j(), std::move(blocks)};
}

Polymer polymer_union(const Polymer& a, const Polymer& b) {
  if (a.j != b.j) throw DomainError("union of polymers at different scales");
  Polymer out{a.j, {}};
  std::set_union(a.blocks.begin(), a.blocks.end(), b.blocks.begin(), b.blocks.end(), std::back_inserter(out.blocks));
  return out;
}

namespace {

void check_scale(const Paving& p, const Polymer& X) {
  if (X.j != p.j()) throw DomainError("polymer scale differs from the paving scale");
}

constexpr Site kStep[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

bool is_connected(const Paving& p, const Polymer& X) {
  check_scale(p, X);
  return !X.empty() && components(p, X).size() == 1;
}

std::vector<Polymer> components(const Paving& p, const Polymer& X) {
  check_scale(p, X);
  std::vector<Polymer> out;
  std::vector<char> seen(X.size(), 0);
  auto index = [&](int b) { return std::lower_bound(X.blocks.begin(), X.blocks.end(), b) - X.blocks.begin(); };
  for (std::size_t s = 0; s < X.size(); ++s) {
    if (seen[s]) continue;
    Polymer comp{X.j, {}};
    std::vector<int> stack{X.blocks[s]};
    seen[s] = 1;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      comp.blocks.push_back(b);
      for (int nb : p.neighbors(b)) {
        if (!X.contains(nb)) continue;
        auto k = static_cast<std::size_t>(index(nb));
        if (!seen[k]) {
          seen[k] = 1;
          stack.push_back(nb);
        }
      }
    }
    std::sort(comp.blocks.begin(), comp.blocks.end());
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool wraps(const Paving& p, const Polymer& X) {
  check_scale(p, X);
  std::map<int, Site> lift;
  for (int start : X.blocks) {
    if (lift.count(start)) continue;
    lift[start] = p.coords(start);
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      Site at = lift[b];
      auto nbs = p.neighbors(b);
      for (int k = 0; k < 4; ++k) {
        int nb = nbs[static_cast<std::size_t>(k)];
        if (!X.contains(nb)) continue;
        Site want{at.x0 + kStep[k].x0, at.x1 + kStep[k].x1};
        auto it = lift.find(nb);
        if (it == lift.end()) {
          lift[nb] = want;
          stack.push_back(nb);
        } else if (!(it->second == want)) {
          return true;
        }
      }
    }
  }
  return false;
}

bool is_small(const Paving& p, const Polymer& X) {
  return X.size() >= 1 && X.size() <= 4 && is_connected(p, X) && !wraps(p, X);
}

Polymer closure(const Paving& pj, const Paving& pj1, const Polymer& X) {
  check_scale(pj, X);
  if (pj1.j() != pj.j() + 1 || pj1.lattice().L() != pj.lattice().L() || pj1.lattice().R() != pj.lattice().R())
    throw DomainError("closure needs the paving of the next scale on the same torus");
  std::vector<int> parents;
  parents.reserve(X.size());
  for (int b : X.blocks) parents.push_back(pj.parent(b));
  return make_polymer(pj1, std::move(parents));
}

namespace {

constexpr std::size_t kMaxRegion = 128;
using Mask = std::bitset<kMaxRegion>;

struct Region {
  std::vector<int> ids;  // sorted
  std::vector<Mask> adj;

  int index(int id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    return it != ids.end() && *it == id ? static_cast<int>(it - ids.begin()) : -1;
  }
};

Region make_region(const Paving& p, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > kMaxRegion)
    throw DomainError("enumeration region of " + std::to_string(ids.size()) + " blocks exceeds " +
                      std::to_string(kMaxRegion));
  Region r{std::move(ids), {}};
  r.adj.resize(r.ids.size());
  for (std::size_t i = 0; i < r.ids.size(); ++i)
    for (int nb : p.neighbors(r.ids[i]))
      if (int k = r.index(nb); k >= 0 && static_cast<std::size_t>(k) != i) r.adj[i].set(static_cast<std::size_t>(k));
  return r;
}

Region window(const Paving& p, int block, int radius) {
  Site c = p.coords(block);
  std::vector<int> ids;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b) ids.push_back(p.id(c.x0 + a, c.x1 + b));
  return make_region(p, std::move(ids));
}

int lowest(const Mask& m) {
  for (std::size_t i = 0; i < kMaxRegion; ++i)
    if (m.test(i)) return static_cast<int>(i);
  return -1;
}

// Every connected subset S with seed in S, S disjoint from `excluded`, |S| <= cap,
// visited exactly once by include/exclude branching on the candidate frontier.
class Enumerator {
 public:
  Enumerator(const Region& r, int cap, long long budget, std::function<void(const Mask&, int)> fn)
      : r_(r), cap_(cap), budget_(budget), fn_(std::move(fn)) {}

  void run(int seed, Mask excluded) {
    Mask S;
    S.set(static_cast<std::size_t>(seed));
    excluded.set(static_cast<std::size_t>(seed));
    rec(S, r_.adj[static_cast<std::size_t>(seed)] & ~excluded, excluded, 1);
  }

  long long visited() const { return visited_; }

 private:
  void rec(const Mask& S, Mask C, Mask X, int size) {
    if (size == cap_ || C.none()) {
      if (++visited_ > budget_)
        throw CheckFailure("enumeration budget of " + std::to_string(budget_) + " polymers exceeded");
      fn_(S, size);
      return;
    }
    const int w = lowest(C);
    Mask wb;
    wb.set(static_cast<std::size_t>(w));
    rec(S, C & ~wb, X | wb, size);
    Mask S2 = S | wb;
    rec(S2, (C | r_.adj[static_cast<std::size_t>(w)]) & ~S2 & ~X, X | wb, size + 1);
  }

  const Region& r_;
  int cap_;
  long long budget_;
  std::function<void(const Mask&, int)> fn_;
  long long visited_ = 0;
};

Polymer to_polymer(const Paving& p, const Region& r, const Mask& m) {
  Polymer out{p.j(), {}};
  for (std::size_t i = 0; i < r.ids.size(); ++i)
    if (m.test(i)) out.blocks.push_back(r.ids[i]);
  return out;
}

}  // namespace

std::vector<Polymer> connected_containing(const Paving& p, int block, int max_size) {
  if (max_size < 1) throw DomainError("max_size must be positive");
  if (block < 0 || block >= p.count()) throw DomainError("block id outside the paving");
  Region r = window(p, block, max_size - 1);
  std::vector<Polymer> out;
  Enumerator e(r, max_size, std::numeric_limits<long long>::max(),
               [&](const Mask& m, int) { out.push_back(to_polymer(p, r, m)); });
  e.run(r.index(block), Mask{});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Polymer> connected_polymers(const Paving& p, int max_size) {
  std::vector<Polymer> out;
  for (int b = 0; b < p.count(); ++b)
    for (Polymer& X : connected_containing(p, b, max_size))
      if (X.blocks.front() == b) out.push_back(std::move(X));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Fixed polyominoes of at most 4 cells containing the origin, as offsets.
const std::vector<std::vector<Site>>& small_shapes() {
  static const std::vector<std::vector<Site>> shapes = [] {
    Paving p = Paving::make(Lattice::make(9, 1, 9), 0);
    std::vector<std::vector<Site>> out;
    for (const Polymer& X : connected_containing(p, p.id(0, 0), 4)) {
      std::vector<Site> offs;
      for (int b : X.blocks) offs.push_back(p.coords(b));
      out.push_back(std::move(offs));
    }
    return out;
  }();
  return shapes;
}

}  // namespace

std::vector<Polymer> small_containing(const Paving& p, int block) {
  std::vector<Polymer> out;
  if (p.per_side() >= 9) {
    if (block < 0 || block >= p.count()) throw DomainError("block id outside the paving");
    Site c = p.coords(block);
    for (const auto& shape : small_shapes()) {
      std::vector<int> ids;
      for (Site o : shape) ids.push_back(p.id(c.x0 + o.x0, c.x1 + o.x1));
      std::sort(ids.begin(), ids.end());
      out.push_back({p.j(), std::move(ids)});
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  for (Polymer& X : connected_containing(p, block, 4))
    if (!wraps(p, X)) out.push_back(std::move(X));
  return out;
}

std::vector<Polymer> small_polymers(const Paving& p) {
  std::vector<Polymer> out;
  for (Polymer& X : connected_polymers(p, 4))
    if (!wraps(p, X)) out.push_back(std::move(X));
  return out;
}

Polymer neighborhood(const Paving& p, const Polymer& X) {
  check_scale(p, X);
  std::vector<int> ids;
  for (int b : X.blocks)
    for (const Polymer& Y : small_containing(p, b)) ids.insert(ids.end(), Y.blocks.begin(), Y.blocks.end());
  return make_polymer(p, std::move(ids));
}

SmallCount count_small_containing(const Paving& p, int block) {
  return {static_cast<long>(small_containing(p, block).size()), p.per_side() < 9};
}

long count_S(int L) {
  int R = 1;
  while (ipow(L, R) < 9) ++R;
  Paving p = Paving::make(Lattice::make(L, R, L), 0);
  auto c = count_small_containing(p, p.id(0, 0));
  if (c.wrap_affected) throw CheckFailure("block grid too narrow for an unwrapped count");
  return c.count;
}

namespace {

void check_pair(const Paving& pj, const Paving& pj1, const Polymer& V) {
  if (V.j != pj1.j() || pj1.j() != pj.j() + 1) throw DomainError("V must be a polymer of the next paving");
  if (!is_connected(pj1, V)) throw DomainError("V must be connected");
}

double weigh(const std::vector<long long>& counts, std::size_t volume, double A, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0 + 1e-15)) throw DomainError("lambda must lie in (0, 1]");
  if (!(A > 0.0)) throw DomainError("A must be positive");
  double s = 0.0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] != 0) s += double(counts[k]) * std::pow(lambda * A, -double(k));
  return std::pow(A, double(volume)) * s;
}

}  // namespace

ActivitySum k_small(const Paving& pj, const Paving& pj1, const Polymer& V, double A, double lambda) {
  check_pair(pj, pj1, V);
  ActivitySum out;
  out.counts.assign(5, 0);
  for (int b = 0; b < pj.count(); ++b) {
    if (!V.contains(pj.parent(b))) continue;
    for (const Polymer& Y : small_containing(pj, b)) {
      if (Y.blocks.front() != b) continue;
      if (closure(pj, pj1, Y) == V) ++out.counts[Y.size()];
    }
  }
  out.value = weigh(out.counts, V.size(), A, lambda);
  return out;
}

ActivitySum k_large(const Paving& pj, const Paving& pj1, const Polymer& V, double A, double lambda,
                    long long budget) {
  check_pair(pj, pj1, V);
  std::vector<int> ids;
  for (int b = 0; b < pj.count(); ++b)
    if (V.contains(pj.parent(b))) ids.push_back(b);
  Region r = make_region(pj, std::move(ids));
  std::vector<Mask> under(V.size());
  for (std::size_t i = 0; i < r.ids.size(); ++i) {
    auto k = std::lower_bound(V.blocks.begin(), V.blocks.end(), pj.parent(r.ids[i])) - V.blocks.begin();
    under[static_cast<std::size_t>(k)].set(i);
  }
  ActivitySum out;
  out.counts.assign(r.ids.size() + 1, 0);
  long long used = 0;
  for (std::size_t v = 0; v < r.ids.size(); ++v) {
    Mask below;
    for (std::size_t i = 0; i < v; ++i) below.set(i);
    Enumerator e(r, static_cast<int>(r.ids.size()), budget - used, [&](const Mask& m, int size) {
      for (const Mask& u : under)
        if ((m & u).none()) return;
      if (size <= 4 && !wraps(pj, to_polymer(pj, r, m))) return;
      ++out.counts[static_cast<std::size_t>(size)];
    });
    e.run(static_cast<int>(v), below);
    used += e.visited();
  }
  out.value = weigh(out.counts, V.size(), A, lambda);
  return out;
}

double k_small_sup(int L, double A, double lambda) {
  int R = 2;
  while (ipow(L, R - 1) < 9) ++R;
  Lattice lat = Lattice::make(L, R, L);
  Paving pj = Paving::make(lat, 0);
  Paving pj1 = Paving::make(lat, 1);
  double sup = 0.0;
  for (const Polymer& V : connected_containing(pj1, pj1.id(0, 0), 4))
    sup = std::max(sup, k_small(pj, pj1, V, A, lambda).value);
  return sup;
}

bool reblock_inequality(const Paving& pj, const Paving& pj1, const Polymer& X, double eta) {
  const double c = 1.0 + 2.0 * eta;
  const double lhs = c * double(closure(pj, pj1, X).size());
  const double rhs = double(X.size()) + 8.0 * c * double(components(pj, X).size());
  return lhs <= rhs;
}

double max_reblock_eta(const Paving& pj, const Paving& pj1, std::span<const Polymer> family) {
  double eta = std::numeric_limits<double>::infinity();
  for (const Polymer& X : family) {
    const double a = double(closure(pj, pj1, X).size()) - 8.0 * double(components(pj, X).size());
    if (a > 0.0) eta = std::min(eta, 0.5 * (double(X.size()) / a - 1.0));
  }
  return eta;
}

void write_enumeration_csv(std::ostream& out, const Paving& pj, const Paving& pj1, std::span<const Polymer> family) {
  csv::row(out, "shape_id", "blocks", "small", "closure_size");
  long id = 0;
  for (const Polymer& X : family)
    csv::row(out, csv::num(id++), csv::num(static_cast<long>(X.size())), csv::num(is_small(pj, X)),
             csv::num(static_cast<long>(closure(pj, pj1, X).size())));
}

}  // namespace ktrg::poly
