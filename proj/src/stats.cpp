#include "snakedex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snakedex {

ComparisonReport mann_whitney_z(std::span<const double> samples_a,
                                std::span<const double> samples_b)
{
    const std::size_t n1 = samples_a.size();
    const std::size_t n2 = samples_b.size();
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("mann_whitney_z: need at least 2 samples per group");

    struct Tagged {
        double value;
        bool from_a;
    };
    std::vector<Tagged> all;
    all.reserve(n1 + n2);
    for (double v : samples_a)
        all.push_back({v, true});
    for (double v : samples_b)
        all.push_back({v, false});
    std::sort(all.begin(), all.end(),
              [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

    // Midranks over tie runs.
    double rank_sum_a = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value)
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (all[k].from_a)
                rank_sum_a += midrank;
        i = j;
    }

    ComparisonReport report;
    report.samples_a.assign(samples_a.begin(), samples_a.end());
    report.samples_b.assign(samples_b.begin(), samples_b.end());
    const double fn1 = static_cast<double>(n1), fn2 = static_cast<double>(n2);
    report.u_statistic = rank_sum_a - fn1 * (fn1 + 1.0) / 2.0;
    const double sigma = std::sqrt(fn1 * fn2 * (fn1 + fn2 + 1.0) / 12.0);
    report.z_score = (report.u_statistic - fn1 * fn2 / 2.0) / sigma;
    report.significant = report.z_score > report.threshold_z;
    report.verdict = report.significant
        ? "group A dominates group B at the 99% confidence level"
        : "no dominance of group A over group B at the 99% confidence level";
    return report;
}

} // namespace snakedex
