#include "digitdyn/lines.hpp"

#include <algorithm>
#include <array>

namespace digitdyn {

Int line_base_at(const IntegerLine& line, const Int& t) { return line.base0 + line.base_slope * t; }

std::pair<Int, Int> line_pair_at(const IntegerLine& line, std::size_t i, const Int& t) {
  if (i >= line.length()) throw precondition_error("pair index out of range");
  return {line.point[i].first + line.slope[i].first * t,
          line.point[i].second + line.slope[i].second * t};
}

void check_line_identity(const IntegerLine& line) {
  std::size_t n = line.length();
  if (n == 0 || line.slope.size() != n) throw precondition_error("malformed line");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    const auto& [x, y] = line.point[i];
    const auto& [sx, sy] = line.slope[i];
    const auto& [xn, yn] = line.point[j];
    const auto& [sxn, syn] = line.slope[j];
    Int c0 = x * x + y * y - (xn + line.base0 * yn);
    Int c1 = 2 * x * sx + 2 * y * sy - (sxn + line.base0 * syn + line.base_slope * yn);
    Int c2 = sx * sx + sy * sy - line.base_slope * syn;
    if (sgn(c0) != 0 || sgn(c1) != 0 || sgn(c2) != 0)
      throw verification_error("line fails the cyclic square-map identity at pair " +
                               std::to_string(i));
  }
}

namespace {

IntegerLine line_through_pairs(const Int& b0, std::vector<std::pair<Int, Int>> pairs) {
  IntegerLine line;
  line.base0 = b0;
  line.base_slope = b0 * b0 + 1;
  line.point = std::move(pairs);
  for (const auto& [x, y] : line.point) line.slope.push_back({x * b0 - y, x + y * b0});
  check_line_identity(line);
  return line;
}

}  // namespace

IntegerLine cycle_line(const Cycle& cycle) {
  if (!is_propagating(cycle.base, cycle.members))
    throw precondition_error("cycle line requires a propagating cycle");
  std::vector<std::pair<Int, Int>> pairs;
  for (const Int& n : cycle.members) pairs.push_back({n % cycle.base, n / cycle.base});
  return line_through_pairs(cycle.base, std::move(pairs));
}

Int line_slope_gcd(const IntegerLine& line) {
  Int g = line.base_slope;
  for (const auto& [sx, sy] : line.slope) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), sx.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), sy.get_mpz_t());
  }
  return g;
}

bool line_is_reduced(const IntegerLine& line) { return line_slope_gcd(line) == 1; }

IntegerLine reduce_line(const IntegerLine& line) {
  Int g = line_slope_gcd(line);
  if (sgn(g) == 0) throw precondition_error("line has zero direction");
  IntegerLine out = line;
  out.base_slope /= g;
  for (auto& [sx, sy] : out.slope) {
    sx /= g;
    sy /= g;
  }
  check_line_identity(out);
  return out;
}

Cycle lift_cycle(const IntegerLine& line, const Int& t) {
  if (sgn(t) < 0) throw precondition_error("lift parameter must be nonnegative");
  check_line_identity(line);
  Int b = line_base_at(line, t);
  if (b < 2) throw verification_error("lifted base below 2");
  std::vector<Int> members;
  for (std::size_t i = 0; i < line.length(); ++i) {
    auto [x, y] = line_pair_at(line, i, t);
    if (sgn(x) < 0 || x >= b || sgn(y) < 0 || y >= b)
      throw verification_error("lifted pair leaves the digit range at t = " + t.get_str());
    members.push_back(x + b * y);
  }
  return make_cycle(b, std::move(members), DigitMap::power(2));
}

FixedPointLines fixed_point_lines(const Int& b0, const Int& x0, const Int& y0) {
  if (b0 < 2 || sgn(x0) < 0 || sgn(y0) < 0 || x0 >= b0 || y0 >= b0)
    throw precondition_error("fixed point digits out of range");
  if (x0 * x0 + y0 * y0 != x0 + b0 * y0) throw precondition_error("not a fixed point");
  if (y0 == 0) throw precondition_error("lines through the trivial fixed points are excluded");

  IntegerLine a;
  a.base0 = b0;
  a.base_slope = (x0 - 1) * (x0 - 1) + y0 * y0;
  a.point = {{x0, y0}};
  a.slope = {{(x0 - 1) * y0, y0 * y0}};
  check_line_identity(a);

  IntegerLine b;
  b.base0 = b0;
  b.base_slope = x0 * x0 + y0 * y0;
  b.point = {{x0, y0}};
  b.slope = {{x0 * y0, y0 * y0}};
  check_line_identity(b);

  FixedPointLines out{reduce_line(a), reduce_line(b)};

  // Cross-check: the reduced base slopes are the complementary divisors of
  // b0^2 + 1 cut out by n = x0 + b0*y0.
  Int m = b0 * b0 + 1, n = x0 + b0 * y0, d;
  mpz_gcd(d.get_mpz_t(), m.get_mpz_t(), n.get_mpz_t());
  if (out.through_partner.base_slope != m / d || out.through_self.base_slope != d)
    throw verification_error("fixed-point line slopes disagree with the divisor pair");
  return out;
}

bool on_two_cycle_variety(const TwoCyclePoint& p) {
  return p.x * p.x + p.y * p.y == p.u + p.b * p.v && p.u * p.u + p.v * p.v == p.x + p.b * p.y;
}

IntegerLine two_cycle_line(const TwoCyclePoint& p) {
  if (!on_two_cycle_variety(p)) throw precondition_error("point is not on the swap variety");
  return line_through_pairs(p.b, {{p.x, p.y}, {p.u, p.v}});
}

namespace {

bool excluded_two_cycle_point(const TwoCyclePoint& p) {
  bool origin = sgn(p.x) == 0 && sgn(p.y) == 0 && sgn(p.u) == 0 && sgn(p.v) == 0;
  bool unit = p.x == 1 && sgn(p.y) == 0 && p.u == 1 && sgn(p.v) == 0;
  return origin || unit;
}

}  // namespace

IntegerLine two_cycle_second_line(const TwoCyclePoint& p) {
  if (!on_two_cycle_variety(p)) throw precondition_error("point is not on the swap variety");
  if (excluded_two_cycle_point(p))
    throw precondition_error("lines through this point are not isolated");

  // Direction (1, xi, eta, mu, nu) with base slope normalized to 1.  The two
  // linear identity coefficients solve (xi, mu) in terms of (eta, nu); the two
  // quadratic coefficients then cut out finitely many (eta, nu).
  Rat b0(p.b), x0(p.x), y0(p.y), u0(p.u), v0(p.v);
  Rat det = 4 * x0 * u0 - 1;  // nonzero for every integer point

  Rat e0 = 2 * u0 * v0 + y0, e1 = b0 - 4 * u0 * y0, e2 = 2 * u0 * b0 - 2 * v0;
  Rat f0 = 2 * x0 * y0 + v0, f1 = 2 * x0 * b0 - 2 * y0, f2 = b0 - 4 * x0 * v0;
  Rat det2 = det * det;

  // Coefficients of the two quadratics in nu, as polynomials in eta.
  QPoly A{e0, e1}, F{f0, f1};
  QPoly c2{e2 * e2}, c1 = qp_sub(qp_scalar(A, 2 * e2), QPoly{det2});
  QPoly c0 = qp_add(qp_mul(A, A), QPoly{Rat(0), Rat(0), det2});
  QPoly d2{f2 * f2 + det2}, d1 = qp_scalar(F, 2 * f2);
  QPoly d0 = qp_sub(qp_mul(F, F), QPoly{Rat(0), det2});
  qp_trim(c2);
  qp_trim(c1);
  qp_trim(d1);

  // Resultant of the two quadratics in nu.
  QPoly t1 = qp_sub(qp_mul(c2, d0), qp_mul(c0, d2));
  QPoly t2 = qp_sub(qp_mul(c2, d1), qp_mul(c1, d2));
  QPoly t3 = qp_sub(qp_mul(c1, d0), qp_mul(c0, d1));
  QPoly res = qp_sub(qp_mul(t1, t1), qp_mul(t2, t3));
  if (res.empty())
    throw not_certified_error("directions through this point do not form a finite set");

  Rat m(Int(p.b * p.b + 1));
  Rat eta_star = (x0 + b0 * y0) / m, nu_star = (u0 + b0 * v0) / m;

  std::vector<std::array<Rat, 4>> directions;  // (xi, eta, mu, nu)
  for (const Rat& eta : qp_rational_roots(res)) {
    QPoly qc{qp_eval(c0, eta), qp_eval(c1, eta), qp_eval(c2, eta)};
    QPoly qd{qp_eval(d0, eta), qp_eval(d1, eta), qp_eval(d2, eta)};
    qp_trim(qc);
    qp_trim(qd);
    QPoly g = qp_gcd(qc, qd);
    std::vector<Rat> nus;
    if (qp_degree(g) == 1)
      nus = {-g[0] / g[1]};
    else if (qp_degree(g) == 2)
      nus = qp_roots_deg2(g);
    for (const Rat& nu : nus) {
      if (eta == eta_star && nu == nu_star) continue;
      Rat xi = (e0 + e1 * eta + e2 * nu) / det;
      Rat mu = (f0 + f1 * eta + f2 * nu) / det;
      bool ok = xi * xi + eta * eta == nu && mu * mu + nu * nu == eta &&
                2 * x0 * xi + 2 * y0 * eta == mu + b0 * nu + v0 &&
                2 * u0 * mu + 2 * v0 * nu == xi + b0 * eta + y0;
      if (ok) directions.push_back({xi, eta, mu, nu});
    }
  }
  if (directions.empty())
    throw verification_error("no second rational direction at this point");
  if (directions.size() > 1)
    throw verification_error("more than two rational directions at this point");

  const auto& [xi, eta, mu, nu] = directions.front();
  Int scale = 1;
  for (const Rat* w : {&xi, &eta, &mu, &nu})
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), w->get_den().get_mpz_t());
  Int sb = scale;
  Int sxx = Rat(xi * scale).get_num(), sxy = Rat(eta * scale).get_num();
  Int sux = Rat(mu * scale).get_num(), suy = Rat(nu * scale).get_num();
  Int content = sb;
  for (const Int* w : {&sxx, &sxy, &sux, &suy})
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), w->get_mpz_t());
  sb /= content;
  sxx /= content;
  sxy /= content;
  sux /= content;
  suy /= content;

  IntegerLine line;
  line.base0 = p.b;
  line.base_slope = sb;
  line.point = {{p.x, p.y}, {p.u, p.v}};
  line.slope = {{sxx, sxy}, {sux, suy}};
  check_line_identity(line);
  return line;
}

Int second_line_discriminant(const TwoCyclePoint& p) {
  if (!on_two_cycle_variety(p)) throw precondition_error("point is not on the swap variety");
  if (sgn(p.x) < 0 || sgn(p.y) < 0 || sgn(p.u) < 0 || sgn(p.v) < 0)
    throw precondition_error("certificate requires nonnegative coordinates");
  if (sgn(p.u) == 0 && sgn(p.v) == 0)
    throw precondition_error("certificate requires (u, v) != (0, 0)");
  const Int &y = p.y, &u = p.u, &v = p.v;
  Int y2 = y * y, u2 = u * u, v2 = v * v;
  Int u3 = u2 * u, u4 = u2 * u2, v3 = v2 * v, v4 = v2 * v2;
  Int d = u2 + v2 + 4 * y2 * u4 + 8 * y2 * u3 + 8 * y2 * u2 * v2 + 4 * y2 * u2 +
          8 * y2 * u * v2 + 4 * y2 * v4 + 4 * y2 * v2 + 4 * y * u4 * v + 8 * y * u2 * v3 +
          4 * y * v4 * v + u4 * u2 + 2 * u4 * u + 3 * u4 * v2 + 3 * u4 + 4 * u3 * v2 + 2 * u3 +
          3 * u2 * v4 + 6 * u2 * v2 + 2 * u * v4 + 2 * u * v2 + v4 * v2 + 3 * v4;
  if (sgn(d) <= 0) throw verification_error("discriminant failed to be positive");
  return d;
}

bool coprime_along_progression(const Int& modulus, const Int& residue) {
  if (modulus < 1) throw precondition_error("modulus must be >= 1");
  Int g, v = residue * residue + 1;
  mpz_gcd(g.get_mpz_t(), modulus.get_mpz_t(), v.get_mpz_t());
  return g == 1;
}

std::pair<Int, Int> intersect_progressions(const Int& c0, const Int& d0, const Int& c1,
                                           const Int& d1) {
  if (c0 < 1 || c1 < 1) throw precondition_error("moduli must be >= 1");
  Int g;
  mpz_gcd(g.get_mpz_t(), c0.get_mpz_t(), c1.get_mpz_t());
  Int diff = d1 - d0;
  if (!mpz_divisible_p(diff.get_mpz_t(), g.get_mpz_t()))
    throw precondition_error("progressions do not intersect");
  Int l = c0 / g * c1;
  Int c0g = c0 / g, c1g = c1 / g, inv;
  if (c1g == 1) {
    Int r = d0 % l;
    if (sgn(r) < 0) r += l;
    return {l, r};
  }
  Int c0g_mod = c0g % c1g;
  if (mpz_invert(inv.get_mpz_t(), c0g_mod.get_mpz_t(), c1g.get_mpz_t()) == 0)
    throw verification_error("modular inverse failed");
  Int k = (diff / g % c1g) * inv % c1g;
  Int r = (d0 + c0 * k) % l;
  if (sgn(r) < 0) r += l;
  if ((r - d0) % c0 != 0 || (r - d1) % c1 != 0)
    throw verification_error("intersection residue check failed");
  return {l, r};
}

}  // namespace digitdyn
