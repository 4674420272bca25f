#pragma once

#include <map>
#include <string>

#include "relmeas/rational.hpp"

namespace relmeas {

// Upper regularized incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double regularized_gamma_q(double s, double x);

// Critical value c with P(ChiSq_df > c) = alpha.
double chi_square_critical(int df, double alpha);

// Pearson statistic of observed counts against exact cell probabilities over
// `total` draws. An observation in a zero-probability cell returns infinity.
double chi_square_statistic(const std::map<std::string, int>& observed,
                            const std::map<std::string, Rat>& probs, int total);

}  // namespace relmeas
