#pragma once

#include <utility>
#include <vector>

#include "digitdyn/integer.hpp"

namespace digitdyn {

// Dense univariate polynomial over the rationals, coefficients in ascending
// degree order with no trailing zeros; {} is the zero polynomial.
using QPoly = std::vector<Rat>;

int qp_degree(const QPoly& p);
void qp_trim(QPoly& p);
QPoly qp_add(const QPoly& a, const QPoly& b);
QPoly qp_sub(const QPoly& a, const QPoly& b);
QPoly qp_mul(const QPoly& a, const QPoly& b);
QPoly qp_scalar(const QPoly& a, const Rat& s);
Rat qp_eval(const QPoly& p, const Rat& x);
QPoly qp_derivative(const QPoly& p);
std::pair<QPoly, QPoly> qp_divmod(const QPoly& a, const QPoly& b);
QPoly qp_monic(QPoly p);
QPoly qp_gcd(QPoly a, QPoly b);  // monic, or {} when both zero
QPoly qp_squarefree_part(const QPoly& p);
QPoly qp_deflate(const QPoly& p, const Rat& root);  // exact division by (x - root)

// The fraction with the smallest denominator in [lo, hi] (ties by smallest
// numerator magnitude via the mediant construction).
Rat simplest_rational_between(const Rat& lo, const Rat& hi);

// All rational roots, ascending and distinct.  Exact: every candidate is
// verified by evaluation, and absence is certified through Sturm counts plus
// the denominator bound from the leading coefficient.  Throws
// not_certified_error if the bound exceeds the configured bisection budget.
std::vector<Rat> qp_rational_roots(const QPoly& p);

// Rational roots for degree <= 2, via the discriminant.
std::vector<Rat> qp_roots_deg2(const QPoly& p);

}  // namespace digitdyn
