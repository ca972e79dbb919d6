#include "snakedex/diff_evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace snakedex {

int DEConfig::resolved_population() const
{
    return population > 0 ? population : 10 * static_cast<int>(bounds.size());
}

void DEConfig::validate() const
{
    if (bounds.empty())
        throw std::invalid_argument("DEConfig: bounds must be non-empty");
    for (const GeneBounds& b : bounds)
        if (!(b.lo < b.hi))
            throw std::invalid_argument("DEConfig: gene bounds require lo < hi");
    if (resolved_population() < 4)
        throw std::invalid_argument("DEConfig: population must be >= 4");
    if (cr < 0.0 || cr > 1.0)
        throw std::invalid_argument("DEConfig: CR must be in [0,1]");
    if (max_generations < 0)
        throw std::invalid_argument("DEConfig: max_generations must be >= 0");
    if (repeats < 1)
        throw std::invalid_argument("DEConfig: repeats must be >= 1");
    if (workers < 1)
        throw std::invalid_argument("DEConfig: workers must be >= 1");
    for (int idx : integer_genes)
        if (idx < 0 || idx >= static_cast<int>(bounds.size()))
            throw std::invalid_argument("DEConfig: integer gene index out of range");
}

const RepeatResult& RunTrace::overall_best() const
{
    if (repeats.empty())
        throw std::logic_error("RunTrace: no repeats recorded");
    const RepeatResult* best = &repeats.front();
    for (const RepeatResult& r : repeats)
        if (r.best_f < best->best_f)
            best = &r;
    return *best;
}

Genome mutate(const Genome& r1, const Genome& r2, const Genome& r3, double f_weight,
              const std::vector<GeneBounds>& bounds)
{
    Genome out(r1.size());
    for (std::size_t g = 0; g < r1.size(); ++g) {
        double v = r1[g] + f_weight * (r2[g] - r3[g]);
        out[g] = std::clamp(v, bounds[g].lo, bounds[g].hi);
    }
    return out;
}

Genome crossover_binomial(const Genome& target, const Genome& donor, double cr, SplitMix64& rng)
{
    if (target.size() != donor.size())
        throw std::invalid_argument("crossover_binomial: genome length mismatch");
    Genome trial(target.size());
    const std::size_t forced = rng.below(target.size());
    for (std::size_t g = 0; g < target.size(); ++g) {
        const bool from_donor = rng.next_double() < cr || g == forced;
        trial[g] = from_donor ? donor[g] : target[g];
    }
    return trial;
}

DesignParams decode_design(const Genome& genome, const std::vector<int>& integer_genes)
{
    if (genome.size() % 3 != 0)
        throw std::invalid_argument("decode_design: genome length must be a multiple of 3");
    for (double g : genome)
        if (std::isnan(g))
            throw std::invalid_argument("decode_design: NaN gene");

    auto is_integer_gene = [&](int idx) {
        return std::find(integer_genes.begin(), integer_genes.end(), idx) != integer_genes.end();
    };
    DesignParams params;
    for (std::size_t s = 0; s < genome.size() / 3; ++s) {
        SegmentSpec seg;
        seg.alpha = genome[3 * s];
        seg.d = genome[3 * s + 1];
        const double n_gene = genome[3 * s + 2];
        const int base = static_cast<int>(3 * s + 2);
        seg.n = is_integer_gene(base)
            ? std::max(1, static_cast<int>(std::floor(n_gene + 0.5)))
            : static_cast<int>(n_gene);
        params.segments.push_back(seg);
    }
    params.validate();
    return params;
}

Genome encode_design(const DesignParams& params)
{
    Genome genome;
    for (const SegmentSpec& seg : params.segments) {
        genome.push_back(seg.alpha);
        genome.push_back(seg.d);
        genome.push_back(static_cast<double>(seg.n));
    }
    return genome;
}

std::vector<GeneBounds> default_design_bounds(int segments)
{
    if (segments < 1)
        throw std::invalid_argument("default_design_bounds: segments must be >= 1");
    std::vector<GeneBounds> bounds;
    for (int s = 0; s < segments; ++s) {
        bounds.push_back({0.1, 1.5}); // alpha, rad
        bounds.push_back({0.2, 8.0}); // d, mm
        bounds.push_back({1.0, 10.0}); // n, disks
    }
    return bounds;
}

std::vector<int> integer_gene_indices(int segments)
{
    std::vector<int> idx;
    for (int s = 0; s < segments; ++s)
        idx.push_back(3 * s + 2);
    return idx;
}

namespace {

void evaluate_all(const FitnessFn& fitness, const std::vector<Genome>& genomes, int repeat,
                  int workers, std::vector<double>& out)
{
    out.resize(genomes.size());
    if (workers <= 1 || genomes.size() <= 1) {
        for (std::size_t i = 0; i < genomes.size(); ++i)
            out[i] = fitness(genomes[i], repeat);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    const std::size_t chunk = (genomes.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, genomes.size());
        if (begin >= end)
            break;
        threads.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i)
                    out[i] = fitness(genomes[i], repeat);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads)
        t.join();
    for (const std::exception_ptr& err : errors)
        if (err)
            std::rethrow_exception(err);
}

} // namespace

RunTrace run(const FitnessFn& fitness, const DEConfig& cfg)
{
    cfg.validate();
    const int np = cfg.resolved_population();
    const std::size_t m = cfg.bounds.size();

    RunTrace trace;
    for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
        const auto t_repeat = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_repeat)
                .count();
        };
        SplitMix64 rng(derive_seed(cfg.seed, 0xDE000000ULL + repeat));

        std::vector<Genome> population(np, Genome(m));
        for (Genome& genome : population)
            for (std::size_t g = 0; g < m; ++g)
                genome[g] = rng.uniform(cfg.bounds[g].lo, cfg.bounds[g].hi);

        std::vector<double> scores;
        try {
            evaluate_all(fitness, population, repeat, cfg.workers, scores);
        } catch (const std::exception& e) {
            throw std::runtime_error("DE fitness failed at repeat " + std::to_string(repeat)
                                     + " generation 0: " + e.what());
        }

        auto record_generation = [&](int gen) {
            GenerationRecord rec;
            rec.repeat = repeat;
            rec.gen = gen;
            const std::size_t best =
                std::min_element(scores.begin(), scores.end()) - scores.begin();
            rec.best_f = scores[best];
            rec.best_genome = population[best];
            rec.mean_f = 0.0;
            for (double s : scores)
                rec.mean_f += s;
            rec.mean_f /= static_cast<double>(np);
            rec.elapsed_s = elapsed();
            trace.generations.push_back(std::move(rec));
        };
        record_generation(0);

        int generations_run = 0;
        std::vector<Genome> trials(np);
        std::vector<double> trial_scores;
        for (int gen = 1; gen <= cfg.max_generations; ++gen) {
            if (cfg.time_budget_s > 0.0 && elapsed() >= cfg.time_budget_s)
                break;
            for (int i = 0; i < np; ++i) {
                auto pick_distinct = [&](std::initializer_list<int> taken) {
                    int r;
                    do {
                        r = static_cast<int>(rng.below(np));
                    } while (r == i
                             || std::find(taken.begin(), taken.end(), r) != taken.end());
                    return r;
                };
                const int r1 = pick_distinct({});
                const int r2 = pick_distinct({r1});
                const int r3 = pick_distinct({r1, r2});
                const Genome donor =
                    mutate(population[r1], population[r2], population[r3], cfg.f_weight,
                           cfg.bounds);
                trials[i] = crossover_binomial(population[i], donor, cfg.cr, rng);
            }
            try {
                evaluate_all(fitness, trials, repeat, cfg.workers, trial_scores);
            } catch (const std::exception& e) {
                throw std::runtime_error("DE fitness failed at repeat " + std::to_string(repeat)
                                         + " generation " + std::to_string(gen) + ": "
                                         + e.what());
            }
            for (int i = 0; i < np; ++i) {
                if (trial_scores[i] <= scores[i]) {
                    population[i] = trials[i];
                    scores[i] = trial_scores[i];
                }
            }
            generations_run = gen;
            record_generation(gen);
        }

        RepeatResult result;
        result.repeat = repeat;
        const std::size_t best = std::min_element(scores.begin(), scores.end()) - scores.begin();
        result.best_f = scores[best];
        result.best_genome = population[best];
        result.generations_run = generations_run;
        result.elapsed_s = elapsed();
        trace.repeats.push_back(std::move(result));
    }
    return trace;
}

} // namespace snakedex
