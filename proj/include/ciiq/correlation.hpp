#pragma once

#include <vector>

namespace ciiq {

/// Mid-ranks (ties get the average of the ranks they span), 1-based.
std::vector<double> midranks(const std::vector<double>& v);

/// Pearson linear correlation. Throws DegenerateInput when either sequence
/// is shorter than 2 or constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation: Pearson over mid-ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Kendall tau-b (tie corrected), exact pair enumeration.
double kendall(const std::vector<double>& x, const std::vector<double>& y);

/// Root mean squared difference.
double rmse(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ciiq
