#include "ktrg/extraction.hpp"

#include <random>
#include <sstream>

namespace ktrg::poly {

Activities random_activities(const std::vector<Polymer>& sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-1000, 1000);
  std::uniform_int_distribution<int> den(1, 32);
  Activities out;
  for (const Polymer& X : sets) out.emplace(X, Rational(num(rng), den(rng)));
  return out;
}

namespace {

std::string describe(const Polymer& X) {
  std::ostringstream s;
  s << "{";
  for (std::size_t i = 0; i < X.size(); ++i) s << (i ? " " : "") << X.blocks[i];
  s << "}@" << X.j;
  return s.str();
}

const Rational& lookup(const Activities& a, const Polymer& X) {
  static const Rational zero{0};
  auto it = a.find(X);
  return it == a.end() ? zero : it->second;
}

}  // namespace

Extraction::Extraction(const Paving& pj, const Paving& pj1, Activities qbar, Activities q)
    : pj_(pj), pj1_(pj1), qbar_(std::move(qbar)), q_(std::move(q)), coarse_small_(small_polymers(pj1)) {
  if (pj1.j() != pj.j() + 1) throw DomainError("extraction needs consecutive pavings");
  for (const auto& [X, value] : qbar_) {
    if (!is_small(pj, X)) throw DomainError("qbar given on a non-small set " + describe(X));
    Polymer Y = closure(pj, pj1, X);
    Rational share = value / Rational(static_cast<long>(X.size()));
    for (int B : X.blocks) by_block_[{B, Y}] += share;
  }
  for (const auto& [Y, value] : q_)
    if (!is_small(pj1, Y)) throw DomainError("q given on a non-small set " + describe(Y));
}

Rational Extraction::q_over_size(const Polymer& Y) const {
  return lookup(q_, Y) / Rational(static_cast<long>(Y.size()));
}

Rational Extraction::qbar_part(int D, const Polymer& Y) const {
  Rational s{0};
  for (int B = 0; B < pj_.count(); ++B) {
    if (pj_.parent(B) != D) continue;
    auto it = by_block_.find({B, Y});
    if (it != by_block_.end()) s += it->second;
  }
  return s;
}

Rational Extraction::J(int D, const Polymer& Y) const {
  if (!Y.contains(D) || !is_small(pj1_, Y)) return Rational{0};
  Rational out = q_over_size(Y) + qbar_part(D, Y);
  if (Y.size() == 1) {
    for (const Polymer& Yp : coarse_small_)
      if (Yp.contains(D)) out -= q_over_size(Yp) + qbar_part(D, Yp);
  }
  return out;
}

ExtractionReport check_extraction(const Extraction& ex) {
  const Paving& pj = ex.fine();
  const Paving& pj1 = ex.coarse();
  const Activities& qbar = ex.qbar();
  const Activities& q = ex.q();
  ExtractionReport rep;
  const auto& S1 = ex.coarse_small();
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag) rep.counterexample = what;
    flag = false;
  };

  std::map<std::pair<int, Polymer>, Rational> J;
  for (const Polymer& Y : S1)
    for (int D : Y.blocks) J[{D, Y}] = ex.J(D, Y);

  std::vector<Rational> row(static_cast<std::size_t>(pj1.count()));
  for (const auto& [key, v] : J) row[static_cast<std::size_t>(key.first)] += v;
  for (int D = 0; D < pj1.count(); ++D) {
    ++rep.checks;
    if (row[static_cast<std::size_t>(D)] != 0)
      fail(rep.sum_rule, "sum over Y of J(D, Y) nonzero at D = " + std::to_string(D));
  }

  std::vector<std::pair<Polymer, const Rational*>> closed;
  closed.reserve(qbar.size());
  for (const auto& [X, value] : qbar) closed.emplace_back(closure(pj, pj1, X), &value);

  for (const Polymer& Yp : S1) {
    ++rep.checks;
    Rational lhs{0};
    for (int D : Yp.blocks) lhs += J.at({D, Yp});
    Rational rhs = lookup(q, Yp);
    for (const auto& [Y, value] : closed)
      if (Y == Yp) rhs += *value;
    if (Yp.size() == 1) {
      const int D = Yp.blocks.front();
      for (const Polymer& Y : S1)
        if (Y.contains(D)) rhs -= lookup(q, Y) / Rational(static_cast<long>(Y.size()));
      for (const auto& [X, value] : qbar)
        for (int B : X.blocks)
          if (pj.parent(B) == D) rhs -= value / Rational(static_cast<long>(X.size()));
    }
    if (lhs != rhs) fail(rep.telescoping, "sum over D of J(D, Y') differs at Y' = " + describe(Yp));
  }

  std::map<Polymer, Rational> by_star;
  for (int D = 0; D < pj1.count(); ++D) {
    Polymer star = neighborhood(pj1, make_polymer(pj1, {D}));
    Rational& acc = by_star[star];
    for (const Polymer& Y : S1)
      if (Y.contains(D)) acc += J.at({D, Y});
  }
  for (const auto& [star, v] : by_star) {
    ++rep.checks;
    if (v != 0) fail(rep.neighborhood, "neighbourhood sum nonzero at Y' = " + describe(star));
  }
  return rep;
}

}  // namespace ktrg::poly
