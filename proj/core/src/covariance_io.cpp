#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ktrg/covariance.hpp"

namespace ktrg::cov {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DomainError("malformed number '" + s + "' in stack file");
  return v;
}

void write_rows(std::ostream& out, int j, const OctantTable& t) {
  for (int a = 0; a <= t.radius(); ++a)
    for (int b = 0; b <= a; ++b) out << j << ' ' << a << ' ' << b << ' ' << fmt(t.at(a, b)) << '\n';
}

std::string expect(std::istream& in, const std::string& key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key) throw DomainError("stack file: expected '" + key + "'");
  return v;
}

}  // namespace

void write_stack(std::ostream& out, const CovarianceStack& stack) {
  const Lattice& lat = stack.lattice();
  const Tolerances& tol = stack.tolerances();
  out << "# ktrg covariance stack\n";
  out << "L " << lat.L() << '\n'
      << "R " << lat.R() << '\n'
      << "gamma " << lat.gamma() << '\n'
      << "M " << lat.M() << '\n'
      << "m " << fmt(lat.mass()) << '\n'
      << "leakage_tol " << fmt(tol.leakage) << '\n'
      << "telescoping_tol " << fmt(tol.telescoping) << '\n'
      << "psd_tol " << fmt(tol.psd) << '\n';
  for (int j = 0; j < stack.scales(); ++j) out << "radius " << stack.radius(j) << '\n';
  out << "tail_radius " << (stack.has_tail() ? stack.tail_table().radius() : -1) << '\n';
  out << "j x0 x1 value\n";
  for (int j = 0; j < stack.scales(); ++j) write_rows(out, j, stack.table(j));
  if (stack.has_tail()) write_rows(out, lat.R(), stack.tail_table());
}

CovarianceStack read_stack(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line != "# ktrg covariance stack") throw DomainError("not a covariance stack file");
  int L = std::stoi(expect(in, "L"));
  int R = std::stoi(expect(in, "R"));
  int gamma = std::stoi(expect(in, "gamma"));
  int M = std::stoi(expect(in, "M"));
  double m = parse_double(expect(in, "m"));
  Tolerances tol;
  tol.leakage = parse_double(expect(in, "leakage_tol"));
  tol.telescoping = parse_double(expect(in, "telescoping_tol"));
  tol.psd = parse_double(expect(in, "psd_tol"));
  Lattice lat = Lattice::make(L, R, gamma, m);
  if (lat.M() != M) throw DomainError("stack file: inconsistent M");

  std::vector<OctantTable> scales;
  for (int j = 0; j < R; ++j) scales.emplace_back(std::stoi(expect(in, "radius")));
  int tail_radius = std::stoi(expect(in, "tail_radius"));
  std::optional<OctantTable> tail;
  if (tail_radius >= 0) tail.emplace(tail_radius);

  std::string h0, h1, h2, h3;
  in >> h0 >> h1 >> h2 >> h3;
  if (h0 != "j" || h1 != "x0" || h2 != "x1" || h3 != "value") throw DomainError("stack file: bad column header");

  int j, a, b;
  std::string v;
  while (in >> j >> a >> b >> v) {
    OctantTable* t = j == R ? (tail ? &*tail : nullptr) : (j >= 0 && j < R ? &scales[j] : nullptr);
    if (!t || a < 0 || b < 0 || b > a || a > t->radius()) throw DomainError("stack file: row out of range");
    t->at(a, b) = parse_double(v);
  }
  if (!in.eof()) throw DomainError("stack file: trailing garbage");
  return CovarianceStack(lat, tol, std::move(scales), std::move(tail), {});
}

}  // namespace ktrg::cov
