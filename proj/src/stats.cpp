#include "relmeas/stats.hpp"

#include <cmath>
#include <limits>

#include "relmeas/error.hpp"

namespace relmeas {
namespace {

// Series for the lower regularized gamma P(s, x), good for x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Lentz continued fraction for Q(s, x), good for x >= s + 1.
double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double regularized_gamma_q(double s, double x) {
  if (s <= 0 || x < 0) throw Error("OutOfDomain", "regularized_gamma_q");
  if (x == 0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi_square_critical(int df, double alpha) {
  if (df < 1 || alpha <= 0 || alpha >= 1) throw Error("OutOfDomain", "chi_square_critical");
  double lo = 0.0, hi = 1.0;
  while (regularized_gamma_q(df / 2.0, hi / 2.0) > alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2.0;
    if (regularized_gamma_q(df / 2.0, mid / 2.0) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2.0;
}

double chi_square_statistic(const std::map<std::string, int>& observed,
                            const std::map<std::string, Rat>& probs, int total) {
  double stat = 0.0;
  for (const auto& [key, n] : observed)
    if (!probs.count(key) && n > 0) return std::numeric_limits<double>::infinity();
  for (const auto& [key, p] : probs) {
    double e = p.convert_to<double>() * total;
    auto it = observed.find(key);
    double o = it == observed.end() ? 0.0 : it->second;
    if (e == 0.0) {
      if (o > 0) return std::numeric_limits<double>::infinity();
      continue;
    }
    stat += (o - e) * (o - e) / e;
  }
  return stat;
}

}  // namespace relmeas
