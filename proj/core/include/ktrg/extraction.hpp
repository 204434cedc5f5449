#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ktrg/polymer.hpp"

namespace ktrg::poly {

using Rational = boost::multiprecision::cpp_rational;
using Activities = std::map<Polymer, Rational>;

// Random rationals p/q, |p| <= 1000, 1 <= q <= 32, one per polymer.
Activities random_activities(const std::vector<Polymer>& sets, std::uint64_t seed);

// Extracted terms between two consecutive pavings, with scalar stand-ins
// qbar on small sets of the fine paving and q on small sets of the coarse one.
class Extraction {
 public:
  Extraction(const Paving& pj, const Paving& pj1, Activities qbar, Activities q);

  // J(D, Y) for a coarse block D and coarse polymer Y.
  Rational J(int D, const Polymer& Y) const;

  const Paving& fine() const { return pj_; }
  const Paving& coarse() const { return pj1_; }
  const Activities& qbar() const { return qbar_; }
  const Activities& q() const { return q_; }
  const std::vector<Polymer>& coarse_small() const { return coarse_small_; }

 private:
  Rational qbar_part(int D, const Polymer& Y) const;
  Rational q_over_size(const Polymer& Y) const;

  Paving pj_;
  Paving pj1_;
  Activities qbar_;
  Activities q_;
  std::vector<Polymer> coarse_small_;
  // sum of qbar(X)/|X| over small X containing fine block B, keyed by (B, closure)
  std::map<std::pair<int, Polymer>, Rational> by_block_;
};

struct ExtractionReport {
  bool sum_rule = true;     // sum_Y J(D, Y) = 0 for every D
  bool telescoping = true;  // sum_D J(D, Y') against its closed form
  bool neighborhood = true; // sums over D with D* = Y' vanish
  std::size_t checks = 0;
  std::string counterexample;

  bool ok() const { return sum_rule && telescoping && neighborhood; }
};

ExtractionReport check_extraction(const Extraction& ex);

}  // namespace ktrg::poly
