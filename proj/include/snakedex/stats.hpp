#pragma once

#include <span>
#include <string>
#include <vector>

namespace snakedex {

struct ComparisonReport {
    std::vector<double> samples_a;
    std::vector<double> samples_b;
    double u_statistic = 0.0; // pairs where a ranks above b, ties counted half
    double z_score = 0.0;
    double threshold_z = 2.576; // 99% two-sided normal quantile
    bool significant = false;   // z > threshold: a stochastically dominates b
    std::string verdict;
};

// Rank-sum U with midrank ties; Z = (U - n1*n2/2) / sqrt(n1*n2*(n1+n2+1)/12).
// Requires at least two samples per group.
ComparisonReport mann_whitney_z(std::span<const double> samples_a,
                                std::span<const double> samples_b);

} // namespace snakedex
