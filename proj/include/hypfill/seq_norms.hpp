#pragma once

#include <span>

namespace hypfill::seq {

/// Infimal C with #{n : |x_n| > lambda} <= (C / lambda)^p for all lambda > 0.
/// Computed as max_k k^{1/p} |s|_(k) over the decreasing rearrangement.
double weak_star_norm(std::span<const double> s, double p);

/// sup_n n^{-1+1/p} (sum of the n largest |x_j|). Requires p > 1.
double weak_norm(std::span<const double> s, double p);

double lp_norm(std::span<const double> s, double p);

/// Weak-type functional for a measure given by per-entry masses:
/// max_k (m_1 + ... + m_k)^{1/p} |v|_(k), entries sorted by |v| decreasing.
/// Entries of equal magnitude are grouped so the tail mass is the strict
/// superlevel measure.
double weighted_weak_star(std::span<const double> values,
                          std::span<const double> masses, double p);

}  // namespace hypfill::seq
