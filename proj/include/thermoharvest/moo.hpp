#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/surrogate.hpp"

namespace thermoharvest {

/// Minimisation convention throughout.
using ObjectiveVector = std::vector<double>;

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Fronts as index lists; front 0 is the non-dominated set.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& population);

/// Standard NSGA-II crowding: boundary members get +inf, interior members sum
/// neighbour gaps normalised by each objective's range.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

/// Volume dominated by `points` and bounded by `reference` (2 or 3
/// objectives). Points not strictly better than the reference in every
/// objective contribute nothing.
double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference);

enum class EvaluatorKind { Surrogate, Direct };

struct NsgaConfig {
    std::size_t population = 100;
    std::size_t generations = 200;
    double crossover_prob = 0.9;
    double sbx_eta = 15.0;
    double mutation_prob = 1.0 / 9.0;  // per variable
    double mutation_eta = 20.0;
    std::uint64_t seed = 0;
    EvaluatorKind evaluator = EvaluatorKind::Surrogate;
    std::size_t workers = 1;
    /// Hypervolume reference in raw objective units. When absent, objectives
    /// are scaled to [0, 1] by the initial population's range and the
    /// reference is 1.1 in every objective.
    std::optional<ObjectiveVector> reference;

    void validate() const;
};

struct Individual {
    std::vector<double> x;
    ObjectiveVector objectives;
    std::size_t rank = 0;
    double crowding = 0.0;
};

/// Affine map applied before hypervolume: (f - offset) / scale.
struct HypervolumeFrame {
    ObjectiveVector offset;
    ObjectiveVector scale;
    ObjectiveVector reference;  // in scaled units

    [[nodiscard]] double measure(const std::vector<ObjectiveVector>& points) const;
};

struct ParetoFront {
    std::vector<Individual> members;  // rank 0, deduplicated, sorted by objectives
    double hypervolume = 0.0;
    HypervolumeFrame frame;
};

struct GenerationRecord {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    std::size_t front_size = 0;
    double front_hypervolume = 0.0;
    /// Hypervolume of every non-dominated point seen so far; never decreases.
    double archive_hypervolume = 0.0;
    ObjectiveVector best;  // per-objective minimum over the population
};

struct EvolveResult {
    ParetoFront front;
    std::vector<GenerationRecord> log;
};

using BoxObjective = std::function<ObjectiveVector(const std::vector<double>&)>;

/// NSGA-II on a box: LHS start, binary tournament on (rank, crowding), SBX
/// and polynomial mutation with clipping, (mu + lambda) survival. Offspring
/// pair j of generation g draws from its own stream derived from
/// (seed, g, j), so the result does not depend on `workers`.
EvolveResult evolve_box(const std::vector<std::pair<double, double>>& box, const NsgaConfig& config,
                        const BoxObjective& objective);

using DesignObjective = std::function<ObjectiveVector(const DesignPoint&)>;

EvolveResult evolve(const DesignBounds& bounds, const NsgaConfig& config, const DesignObjective& objective);

/// Rank-0 subset of `candidates`, deduplicated within 1e-12 in objective
/// space, with crowding recomputed on the result.
ParetoFront build_front(std::vector<Individual> candidates, const HypervolumeFrame& frame);

/// Frame scaling each objective by the range seen in `points`, reference 1.1.
HypervolumeFrame normalized_frame(const std::vector<ObjectiveVector>& points);

/// (-dT, -P_out, t_device).
ObjectiveVector design_objectives(const PerformanceMetrics& m);

ParetoFront extract_front_from_dataset(const Dataset& dataset);

DesignObjective direct_objective(const Environment& env, const IncidentSpectrum& incident, const Calibration& cal);

/// GP means of dT_K and pout_W; thickness is exact.
DesignObjective surrogate_objective(const SurrogateBundle& bundle);

/// Evaluates every member directly and keeps the non-dominated ones.
ParetoFront reevaluate_front(const ParetoFront& front, const Environment& env, const IncidentSpectrum& incident,
                             const Calibration& cal);

/// Design columns + dT_K,pout_W,tdev_m,rank,crowding.
void write_front_csv(std::ostream& os, const ParetoFront& front, std::uint64_t seed, const std::string& ledger);
void write_generation_log_csv(std::ostream& os, const std::vector<GenerationRecord>& log, std::uint64_t seed,
                              const std::string& ledger);

/// Member closest to the ideal point in the frame's scaled units.
std::size_t knee_point(const ParetoFront& front);

}  // namespace thermoharvest
