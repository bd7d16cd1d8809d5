#include "digitdyn/polyq.hpp"

#include <algorithm>

namespace digitdyn {

int qp_degree(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

void qp_trim(QPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

QPoly qp_add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  qp_trim(r);
  return r;
}

QPoly qp_sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  qp_trim(r);
  return r;
}

QPoly qp_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  qp_trim(r);
  return r;
}

QPoly qp_scalar(const QPoly& a, const Rat& s) {
  if (sgn(s) == 0) return {};
  QPoly r = a;
  for (Rat& c : r) c *= s;
  return r;
}

Rat qp_eval(const QPoly& p, const Rat& x) {
  Rat acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly qp_derivative(const QPoly& p) {
  if (p.size() <= 1) return {};
  QPoly r(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * static_cast<long>(i);
  return r;
}

std::pair<QPoly, QPoly> qp_divmod(const QPoly& a, const QPoly& b) {
  if (b.empty()) throw precondition_error("polynomial division by zero");
  QPoly rem = a, quot;
  int db = qp_degree(b);
  if (qp_degree(rem) >= db) quot.assign(rem.size() - b.size() + 1, Rat(0));
  while (qp_degree(rem) >= db) {
    int dr = qp_degree(rem);
    Rat f = rem.back() / b.back();
    quot[dr - db] = f;
    for (int i = 0; i <= db; ++i) rem[dr - db + i] -= f * b[i];
    qp_trim(rem);
  }
  return {quot, rem};
}

QPoly qp_monic(QPoly p) {
  if (p.empty()) return p;
  Rat lead = p.back();
  for (Rat& c : p) c /= lead;
  return p;
}

QPoly qp_gcd(QPoly a, QPoly b) {
  while (!b.empty()) {
    QPoly r = qp_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return qp_monic(std::move(a));
}

QPoly qp_squarefree_part(const QPoly& p) {
  if (qp_degree(p) <= 1) return qp_monic(p);
  QPoly g = qp_gcd(p, qp_derivative(p));
  if (qp_degree(g) == 0) return qp_monic(p);
  return qp_monic(qp_divmod(p, g).first);
}

QPoly qp_deflate(const QPoly& p, const Rat& root) {
  if (p.empty()) throw precondition_error("deflating the zero polynomial");
  QPoly q(p.size() - 1);
  Rat carry = 0;
  for (std::size_t i = p.size(); i-- > 1;) {
    carry = carry * root + p[i];
    q[i - 1] = carry;
  }
  if (carry * root + p[0] != 0) throw precondition_error("deflation point is not a root");
  qp_trim(q);
  return q;
}

namespace {

Int rat_floor(const Rat& q) {
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return f;
}

}  // namespace

Rat simplest_rational_between(const Rat& lo, const Rat& hi) {
  if (lo > hi) throw precondition_error("empty interval");
  if (sgn(lo) <= 0 && sgn(hi) >= 0) return Rat(0);
  if (sgn(hi) < 0) {
    Rat r = simplest_rational_between(-hi, -lo);
    return -r;
  }
  Rat fl(rat_floor(lo));
  if (fl == lo) return lo;
  if (fl + 1 <= hi) return fl + 1;
  Rat inner = simplest_rational_between(Rat(1) / (hi - fl), Rat(1) / (lo - fl));
  return fl + Rat(1) / inner;
}

std::vector<Rat> qp_roots_deg2(const QPoly& p) {
  int d = qp_degree(p);
  if (d > 2) throw precondition_error("degree above 2");
  if (d <= 0) {
    if (p.empty()) throw precondition_error("zero polynomial has every root");
    return {};
  }
  if (d == 1) return {-p[0] / p[1]};
  Rat disc = p[1] * p[1] - 4 * p[2] * p[0];
  if (sgn(disc) < 0) return {};
  Int rn, rd;
  if (!is_square(disc.get_num(), &rn) || !is_square(disc.get_den(), &rd)) return {};
  Rat s = Rat(rn) / Rat(rd);
  Rat r1 = (-p[1] - s) / (2 * p[2]);
  Rat r2 = (-p[1] + s) / (2 * p[2]);
  if (r1 == r2) return {r1};
  if (r2 < r1) std::swap(r1, r2);
  return {r1, r2};
}

namespace {

// Sturm chain with positive-scalar normalization to keep coefficients small.
std::vector<QPoly> sturm_chain(const QPoly& sf) {
  std::vector<QPoly> chain{sf, qp_derivative(sf)};
  while (qp_degree(chain.back()) > 0) {
    QPoly rem = qp_divmod(chain[chain.size() - 2], chain.back()).second;
    if (rem.empty()) break;
    for (Rat& c : rem) c = -c;
    Rat scale = abs(rem.back());
    for (Rat& c : rem) c /= scale;
    chain.push_back(std::move(rem));
  }
  return chain;
}

int sign_variations(const std::vector<QPoly>& chain, const Rat& x) {
  int vars = 0, prev = 0;
  for (const QPoly& s : chain) {
    int sg = sgn(qp_eval(s, x));
    if (sg == 0) continue;
    if (prev != 0 && sg != prev) ++vars;
    prev = sg;
  }
  return vars;
}

}  // namespace

std::vector<Rat> qp_rational_roots(const QPoly& p) {
  if (p.empty()) throw precondition_error("zero polynomial has every root");
  std::vector<Rat> roots;
  QPoly sf = qp_squarefree_part(p);
  if (qp_degree(sf) == 0) return roots;

  // Strip roots at zero so the integer model has a nonzero constant term.
  while (sgn(sf[0]) == 0) {
    roots.push_back(Rat(0));
    sf.erase(sf.begin());
    if (qp_degree(sf) == 0) {
      std::sort(roots.begin(), roots.end());
      return roots;
    }
  }
  if (qp_degree(sf) <= 2) {
    for (const Rat& r : qp_roots_deg2(sf))
      if (sgn(r) != 0) roots.push_back(r);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
  }

  // Integer model: common denominator out, content out.  A rational root in
  // lowest terms then has denominator dividing the leading coefficient.
  Int den_lcm = 1;
  for (const Rat& c : sf) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
  Int lc = abs(Rat(sf.back() * Rat(den_lcm)).get_num());

  // Root magnitude bound (Cauchy), then the bisection depth that pins any
  // candidate denominator: final width below 1 / lc^2.
  Rat maxratio = 0;
  for (std::size_t i = 0; i + 1 < sf.size(); ++i) {
    Rat r = abs(sf[i] / sf.back());
    if (r > maxratio) maxratio = r;
  }
  Rat bound = maxratio + 1;
  Int width_ceil = rat_floor(2 * bound) + 1;
  Int depth_need_z = width_ceil * lc * lc;
  std::size_t depth_need = mpz_sizeinbase(depth_need_z.get_mpz_t(), 2) + 2;
  if (depth_need > 800)
    throw not_certified_error("rational root certification needs more bisection depth than budgeted");

  for (bool restart = true; restart;) {
    restart = false;
    if (qp_degree(sf) <= 2) {
      for (const Rat& r : qp_roots_deg2(sf)) roots.push_back(r);
      break;
    }
    auto chain = sturm_chain(sf);
    struct Span {
      Rat lo, hi;
      int vlo, vhi;
    };
    Rat lo0 = -bound, hi0 = bound;
    std::vector<Span> work{{lo0, hi0, sign_variations(chain, lo0), sign_variations(chain, hi0)}};
    while (!work.empty() && !restart) {
      Span s = work.back();
      work.pop_back();
      int count = s.vlo - s.vhi;
      if (count <= 0) continue;
      if (count == 1) {
        Rat lo = s.lo, hi = s.hi;
        for (std::size_t depth = 0; depth < depth_need; ++depth) {
          Rat cand = simplest_rational_between(lo, hi);
          if (sgn(qp_eval(sf, cand)) == 0) {
            roots.push_back(cand);
            sf = qp_deflate(sf, cand);
            restart = true;
            break;
          }
          Rat mid = (lo + hi) / 2;
          int sm = sgn(qp_eval(sf, mid));
          if (sm == 0) {
            roots.push_back(mid);
            sf = qp_deflate(sf, mid);
            restart = true;
            break;
          }
          if (sm == sgn(qp_eval(sf, lo)))
            lo = mid;
          else
            hi = mid;
        }
        continue;  // interval exhausted: the lone root there is irrational
      }
      Rat mid = (s.lo + s.hi) / 2;
      if (sgn(qp_eval(sf, mid)) == 0) {
        roots.push_back(mid);
        sf = qp_deflate(sf, mid);
        restart = true;
        break;
      }
      int vm = sign_variations(chain, mid);
      work.push_back({s.lo, mid, s.vlo, vm});
      work.push_back({mid, s.hi, vm, s.vhi});
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace digitdyn
