#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snakedex/rng.hpp"
#include "snakedex/snake_model.hpp"

namespace snakedex {

// Flat design vector [alpha1, d1, n1, alpha2, d2, n2, ...]. The n genes stay
// continuous inside the optimizer and are rounded at decode time.
using Genome = std::vector<double>;

struct GeneBounds {
    double lo = 0.0;
    double hi = 1.0;
};

struct DEConfig {
    double f_weight = 0.8;
    double cr = 0.7;
    int population = 0; // 0 resolves to 10 * genome length
    std::vector<GeneBounds> bounds;
    std::vector<int> integer_genes;
    int max_generations = 50;
    double time_budget_s = 600.0; // wall-clock cap per repeat; 0 disables
    uint64_t seed = 1;
    int repeats = 1;
    int workers = 1;

    int resolved_population() const;
    void validate() const;
};

struct GenerationRecord {
    int repeat = 0;
    int gen = 0;
    double best_f = 0.0;
    double mean_f = 0.0;
    Genome best_genome;
    double elapsed_s = 0.0;
};

struct RepeatResult {
    int repeat = 0;
    double best_f = 0.0;
    Genome best_genome;
    int generations_run = 0;
    double elapsed_s = 0.0;
};

struct RunTrace {
    std::vector<GenerationRecord> generations;
    std::vector<RepeatResult> repeats;

    const RepeatResult& overall_best() const;
};

// DE/rand/1 donor: r1 + F*(r2 - r3), clamped to the violated bound.
Genome mutate(const Genome& r1, const Genome& r2, const Genome& r3, double f_weight,
              const std::vector<GeneBounds>& bounds);

// Binomial crossover with one forced donor gene.
Genome crossover_binomial(const Genome& target, const Genome& donor, double cr, SplitMix64& rng);

// Genome -> DesignParams with w=4 and tool_length=5. Integer genes are
// rounded half-up and clamped to >= 1. Throws on NaN genes.
DesignParams decode_design(const Genome& genome, const std::vector<int>& integer_genes);
Genome encode_design(const DesignParams& params);

// Bounds for an s-segment design: alpha in [0.1, 1.5] rad, d in [0.2, 8] mm,
// n in [1, 10].
std::vector<GeneBounds> default_design_bounds(int segments);
std::vector<int> integer_gene_indices(int segments);

// Fitness receives the repeat index so callers can derive per-repeat
// evaluation seeds; it must be pure for the determinism contract to hold.
using FitnessFn = std::function<double(const Genome&, int repeat)>;

// Synchronous DE/rand/1/bin with greedy (<=) selection. Trials of a generation
// may be evaluated concurrently; selection applies in member order, so a run
// is reproducible for any worker count.
RunTrace run(const FitnessFn& fitness, const DEConfig& cfg);

} // namespace snakedex
