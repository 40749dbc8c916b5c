#include "thermoharvest/moo.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near_equal(const ObjectiveVector& a, const ObjectiveVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max({1.0, std::abs(a[i]), std::abs(b[i])})) {
            return false;
        }
    }
    return true;
}

/// Area dominated by a 2-D staircase, maintained under insertion.
class Staircase {
public:
    Staircase(double rx, double ry) : rx_(rx), ry_(ry) {}

    void insert(double x, double y) {
        auto it = steps_.upper_bound(x);
        if (it != steps_.begin() && std::prev(it)->second <= y) {
            return;  // dominated (or duplicated)
        }
        // Drop the steps the new point dominates; they are contiguous from x.
        for (auto j = steps_.lower_bound(x); j != steps_.end() && j->second >= y;) {
            j = erase(j);
        }
        it = steps_.lower_bound(x);
        const double next_x = it == steps_.end() ? rx_ : it->first;
        const double prev_y = it == steps_.begin() ? ry_ : std::prev(it)->second;
        area_ += (next_x - x) * (prev_y - y);
        steps_.emplace_hint(it, x, y);
    }

    [[nodiscard]] double area() const noexcept { return area_; }

private:
    std::map<double, double>::iterator erase(std::map<double, double>::iterator j) {
        const auto next = std::next(j);
        const double next_x = next == steps_.end() ? rx_ : next->first;
        const double prev_y = j == steps_.begin() ? ry_ : std::prev(j)->second;
        area_ -= (next_x - j->first) * (prev_y - j->second);
        return steps_.erase(j);
    }

    double rx_;
    double ry_;
    double area_ = 0.0;
    std::map<double, double> steps_;
};

std::vector<std::size_t> sorted_by(const std::vector<ObjectiveVector>& pts, std::size_t m) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][m] < pts[b][m]; });
    return order;
}

void assign_rank_and_crowding(std::vector<Individual>& pop) {
    std::vector<ObjectiveVector> objs;
    objs.reserve(pop.size());
    for (const auto& ind : pop) {
        objs.push_back(ind.objectives);
    }
    const auto fronts = non_dominated_sort(objs);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        std::vector<ObjectiveVector> f;
        for (auto i : fronts[r]) {
            f.push_back(objs[i]);
        }
        const auto cd = crowding_distance(f);
        for (std::size_t k = 0; k < fronts[r].size(); ++k) {
            pop[fronts[r][k]].rank = r;
            pop[fronts[r][k]].crowding = cd[k];
        }
    }
}

std::string describe_x(const std::vector<double>& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (i ? ", " : "") + format_double(x[i]);
    }
    return s + "]";
}

ObjectiveVector evaluate_checked(const BoxObjective& objective, const std::vector<double>& x, std::size_t arity) {
    ObjectiveVector f;
    try {
        f = objective(x);
    } catch (const Error& e) {
        rethrow_with_context(e, "objective at x=" + describe_x(x));
    }
    if (arity != 0 && f.size() != arity) {
        throw ArgumentError("objective returned " + std::to_string(f.size()) + " values, expected " +
                            std::to_string(arity));
    }
    for (double v : f) {
        if (!std::isfinite(v)) {
            throw DomainError("objective at x=" + describe_x(x) + " is not finite");
        }
    }
    return f;
}

void evaluate_all(std::vector<Individual>& inds, const BoxObjective& objective, std::size_t workers,
                  std::size_t arity) {
    parallel_for(inds.size(), workers,
                 [&](std::size_t i) { inds[i].objectives = evaluate_checked(objective, inds[i].x, arity); });
}

const Individual& tournament(const std::vector<Individual>& pop, RandomStream& rng) {
    const std::size_t a = rng.below(pop.size());
    const std::size_t b = rng.below(pop.size());
    const auto& p = pop[a];
    const auto& q = pop[b];
    if (p.rank != q.rank) {
        return p.rank < q.rank ? p : q;
    }
    if (p.crowding != q.crowding) {
        return p.crowding > q.crowding ? p : q;
    }
    return a <= b ? p : q;
}

// Bounded SBX: the spread on each side is limited by the distance to the box edge.
void sbx(std::vector<double>& c1, std::vector<double>& c2, const std::vector<std::pair<double, double>>& box,
         double eta, RandomStream& rng) {
    for (std::size_t i = 0; i < c1.size(); ++i) {
        const double cross = rng.uniform();
        const double u = rng.uniform();
        const double swap = rng.uniform();
        if (cross > 0.5 || std::abs(c1[i] - c2[i]) <= 1e-14 * std::max(1.0, std::abs(c1[i]))) {
            continue;
        }
        const double lo = box[i].first, hi = box[i].second;
        const double y1 = std::min(c1[i], c2[i]), y2 = std::max(c1[i], c2[i]);
        const double span = y2 - y1;
        const auto beta_q = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                    : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        };
        const double b1 = beta_q(1.0 + 2.0 * (y1 - lo) / span);
        const double b2 = beta_q(1.0 + 2.0 * (hi - y2) / span);
        double x1 = std::clamp(0.5 * ((y1 + y2) - b1 * span), lo, hi);
        double x2 = std::clamp(0.5 * ((y1 + y2) + b2 * span), lo, hi);
        if (swap < 0.5) {
            std::swap(x1, x2);
        }
        c1[i] = x1;
        c2[i] = x2;
    }
}

// Bounded polynomial mutation.
void polynomial_mutation(std::vector<double>& x, const std::vector<std::pair<double, double>>& box, double prob,
                         double eta, RandomStream& rng) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double gate = rng.uniform();
        const double u = rng.uniform();
        if (gate >= prob) {
            continue;
        }
        const double lo = box[i].first, hi = box[i].second;
        const double range = hi - lo;
        const double d1 = (x[i] - lo) / range;
        const double d2 = (hi - x[i]) / range;
        const double p = 1.0 / (eta + 1.0);
        double delta;
        if (u < 0.5) {
            const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            delta = std::pow(v, p) - 1.0;
        } else {
            const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            delta = 1.0 - std::pow(v, p);
        }
        x[i] = std::clamp(x[i] + delta * range, lo, hi);
    }
}

/// Non-dominated archive of every evaluated point.
class Archive {
public:
    void add(const ObjectiveVector& f) {
        for (const auto& a : points_) {
            if (dominates(a, f) || near_equal(a, f)) {
                return;
            }
        }
        std::erase_if(points_, [&](const ObjectiveVector& a) { return dominates(f, a); });
        points_.push_back(f);
    }
    [[nodiscard]] const std::vector<ObjectiveVector>& points() const noexcept { return points_; }

private:
    std::vector<ObjectiveVector> points_;
};

GenerationRecord record(std::size_t gen, std::size_t evals, const std::vector<Individual>& pop,
                        const HypervolumeFrame& frame, const Archive& archive) {
    GenerationRecord r;
    r.generation = gen;
    r.evaluations = evals;
    std::vector<ObjectiveVector> front;
    r.best.assign(pop.front().objectives.size(), kInf);
    for (const auto& ind : pop) {
        if (ind.rank == 0) {
            front.push_back(ind.objectives);
        }
        for (std::size_t m = 0; m < r.best.size(); ++m) {
            r.best[m] = std::min(r.best[m], ind.objectives[m]);
        }
    }
    r.front_size = front.size();
    r.front_hypervolume = frame.measure(front);
    r.archive_hypervolume = frame.measure(archive.points());
    return r;
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) {
        throw ArgumentError("dominates: objective vectors have different arity");
    }
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        strictly = strictly || a[i] < b[i];
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& population) {
    const std::size_t n = population.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(population[p], population[q])) {
                dominated[p].push_back(q);
                ++count[q];
            } else if (dominates(population[q], population[p])) {
                dominated[q].push_back(p);
                ++count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    while (!fronts.back().empty()) {
        std::vector<std::size_t> next;
        for (auto p : fronts.back()) {
            for (auto q : dominated[p]) {
                if (--count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        return d;
    }
    for (std::size_t m = 0; m < front.front().size(); ++m) {
        const auto order = sorted_by(front, m);
        d[order.front()] = kInf;
        d[order.back()] = kInf;
        const double range = front[order.back()][m] - front[order.front()][m];
        if (range == 0.0) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            d[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / range;
        }
    }
    return d;
}

double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference) {
    const std::size_t dims = reference.size();
    if (dims != 2 && dims != 3) {
        throw ArgumentError("hypervolume supports 2 or 3 objectives, got " + std::to_string(dims));
    }
    std::vector<ObjectiveVector> pts;
    for (const auto& p : points) {
        if (p.size() != dims) {
            throw ArgumentError("hypervolume: point arity differs from the reference");
        }
        bool inside = true;
        for (std::size_t i = 0; i < dims; ++i) {
            inside = inside && p[i] < reference[i];
        }
        if (inside) {
            pts.push_back(p);
        }
    }
    if (pts.empty()) {
        return 0.0;
    }
    if (dims == 2) {
        Staircase s(reference[0], reference[1]);
        for (const auto& p : pts) {
            s.insert(p[0], p[1]);
        }
        return s.area();
    }
    // Sweep in z, keeping the (x, y) staircase of every point already passed.
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
    Staircase s(reference[0], reference[1]);
    double volume = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s.insert(pts[i][0], pts[i][1]);
        const double z_next = i + 1 < pts.size() ? pts[i + 1][2] : reference[2];
        volume += s.area() * (z_next - pts[i][2]);
    }
    return volume;
}

void NsgaConfig::validate() const {
    if (population < 4 || population % 2 != 0) {
        throw ConfigError("nsga.population must be even and >= 4, got " + std::to_string(population));
    }
    if (generations < 1) {
        throw ConfigError("nsga.generations must be >= 1");
    }
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw ConfigError("nsga.crossover_prob must lie in [0, 1]");
    }
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
        throw ConfigError("nsga.mutation_prob must lie in [0, 1]");
    }
    if (!(sbx_eta > 0.0) || !(mutation_eta > 0.0)) {
        throw ConfigError("nsga.sbx_eta and nsga.mutation_eta must be positive");
    }
}

double HypervolumeFrame::measure(const std::vector<ObjectiveVector>& points) const {
    std::vector<ObjectiveVector> scaled;
    scaled.reserve(points.size());
    for (const auto& p : points) {
        ObjectiveVector s(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            s[i] = (p[i] - offset[i]) / scale[i];
        }
        scaled.push_back(std::move(s));
    }
    return hypervolume(scaled, reference);
}

HypervolumeFrame normalized_frame(const std::vector<ObjectiveVector>& points) {
    if (points.empty()) {
        throw ArgumentError("normalized_frame needs at least one point");
    }
    const std::size_t m = points.front().size();
    HypervolumeFrame f;
    f.offset.assign(m, kInf);
    std::vector<double> hi(m, -kInf);
    for (const auto& p : points) {
        for (std::size_t i = 0; i < m; ++i) {
            f.offset[i] = std::min(f.offset[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    f.scale.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double span = hi[i] - f.offset[i];
        f.scale[i] = span > 0.0 ? span : 1.0;
    }
    f.reference.assign(m, 1.1);
    return f;
}

ParetoFront build_front(std::vector<Individual> candidates, const HypervolumeFrame& frame) {
    ParetoFront out;
    out.frame = frame;
    if (candidates.empty()) {
        return out;
    }
    std::vector<ObjectiveVector> objs;
    for (const auto& c : candidates) {
        objs.push_back(c.objectives);
    }
    const auto first = non_dominated_sort(objs).front();
    std::vector<Individual> members;
    for (auto i : first) {
        members.push_back(std::move(candidates[i]));
    }
    std::stable_sort(members.begin(), members.end(), [](const Individual& a, const Individual& b) {
        if (a.objectives != b.objectives) {
            return a.objectives < b.objectives;
        }
        return a.x < b.x;
    });
    for (auto& m : members) {
        bool duplicate = false;
        for (const auto& kept : out.members) {
            duplicate = duplicate || near_equal(kept.objectives, m.objectives);
        }
        if (!duplicate) {
            out.members.push_back(std::move(m));
        }
    }
    std::vector<ObjectiveVector> kept;
    for (const auto& m : out.members) {
        kept.push_back(m.objectives);
    }
    const auto cd = crowding_distance(kept);
    for (std::size_t i = 0; i < out.members.size(); ++i) {
        out.members[i].rank = 0;
        out.members[i].crowding = cd[i];
    }
    out.hypervolume = frame.measure(kept);
    return out;
}

EvolveResult evolve_box(const std::vector<std::pair<double, double>>& box, const NsgaConfig& config,
                        const BoxObjective& objective) {
    config.validate();
    if (box.empty()) {
        throw ArgumentError("evolve needs at least one variable");
    }
    for (const auto& [lo, hi] : box) {
        if (!(lo < hi)) {
            throw ArgumentError("every box interval needs min < max");
        }
    }
    const std::size_t n = config.population;
    const std::size_t workers = resolve_workers(config.workers);

    std::vector<Individual> pop(n);
    const auto start = latin_hypercube(box, n, derive_seed(config.seed, "nsga_init"));
    for (std::size_t i = 0; i < n; ++i) {
        pop[i].x = start[i];
    }
    evaluate_all(pop, objective, workers, 0);
    const std::size_t arity = pop.front().objectives.size();
    for (const auto& ind : pop) {
        if (ind.objectives.size() != arity || arity == 0) {
            throw ArgumentError("objective arity must be constant and non-zero");
        }
    }
    assign_rank_and_crowding(pop);

    HypervolumeFrame frame;
    if (config.reference) {
        if (config.reference->size() != arity) {
            throw ConfigError("hypervolume reference arity does not match the objectives");
        }
        frame.offset.assign(arity, 0.0);
        frame.scale.assign(arity, 1.0);
        frame.reference = *config.reference;
    } else {
        std::vector<ObjectiveVector> objs;
        for (const auto& ind : pop) {
            objs.push_back(ind.objectives);
        }
        frame = normalized_frame(objs);
    }

    Archive archive;
    for (const auto& ind : pop) {
        archive.add(ind.objectives);
    }
    std::size_t evals = n;
    EvolveResult result;
    result.log.push_back(record(0, evals, pop, frame, archive));

    for (std::size_t g = 1; g <= config.generations; ++g) {
        std::vector<Individual> kids(n);
        for (std::size_t j = 0; j < n / 2; ++j) {
            RandomStream rng(derive_seed(config.seed, g, j));
            auto c1 = tournament(pop, rng).x;
            auto c2 = tournament(pop, rng).x;
            if (rng.uniform() < config.crossover_prob) {
                sbx(c1, c2, box, config.sbx_eta, rng);
            }
            polynomial_mutation(c1, box, config.mutation_prob, config.mutation_eta, rng);
            polynomial_mutation(c2, box, config.mutation_prob, config.mutation_eta, rng);
            kids[2 * j].x = std::move(c1);
            kids[2 * j + 1].x = std::move(c2);
        }
        evaluate_all(kids, objective, workers, arity);
        evals += n;
        for (const auto& k : kids) {
            archive.add(k.objectives);
        }

        std::vector<Individual> merged = std::move(pop);
        merged.insert(merged.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
        // Copies of an existing member only compete for slots left over.
        std::vector<Individual> copies;
        {
            std::vector<Individual> unique;
            unique.reserve(merged.size());
            for (auto& ind : merged) {
                const bool seen = std::any_of(unique.begin(), unique.end(),
                                              [&](const Individual& u) { return u.objectives == ind.objectives; });
                (seen ? copies : unique).push_back(std::move(ind));
            }
            if (unique.size() < n) {
                for (std::size_t k = 0; unique.size() < n; ++k) {
                    unique.push_back(copies[k]);
                }
            }
            merged = std::move(unique);
        }
        std::vector<ObjectiveVector> objs;
        for (const auto& ind : merged) {
            objs.push_back(ind.objectives);
        }
        std::vector<Individual> next;
        next.reserve(n);
        for (const auto& front : non_dominated_sort(objs)) {
            if (next.size() + front.size() <= n) {
                for (auto i : front) {
                    next.push_back(merged[i]);
                }
                continue;
            }
            std::vector<ObjectiveVector> f;
            for (auto i : front) {
                f.push_back(objs[i]);
            }
            const auto cd = crowding_distance(f);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
            for (std::size_t k = 0; next.size() < n; ++k) {
                next.push_back(merged[front[order[k]]]);
            }
            break;
        }
        pop = std::move(next);
        assign_rank_and_crowding(pop);
        result.log.push_back(record(g, evals, pop, frame, archive));
    }

    std::vector<Individual> rank0;
    for (const auto& ind : pop) {
        if (ind.rank == 0) {
            rank0.push_back(ind);
        }
    }
    result.front = build_front(std::move(rank0), frame);
    return result;
}

EvolveResult evolve(const DesignBounds& bounds, const NsgaConfig& config, const DesignObjective& objective) {
    bounds.validate();
    std::vector<std::pair<double, double>> box(bounds.ranges.begin(), bounds.ranges.end());
    return evolve_box(box, config, [&](const std::vector<double>& x) {
        DesignPoint::Vector v{};
        std::copy(x.begin(), x.end(), v.begin());
        return objective(DesignPoint::from_vector(v));
    });
}

ObjectiveVector design_objectives(const PerformanceMetrics& m) {
    return {-m.delta_T_eff, -m.p_out, m.device_thickness};
}

ParetoFront extract_front_from_dataset(const Dataset& dataset) {
    if (dataset.designs.empty()) {
        throw ArgumentError("extract_front_from_dataset needs a non-empty dataset");
    }
    std::vector<Individual> cands;
    std::vector<ObjectiveVector> objs;
    for (std::size_t i = 0; i < dataset.designs.size(); ++i) {
        const auto v = dataset.designs[i].to_vector();
        Individual ind;
        ind.x.assign(v.begin(), v.end());
        ind.objectives = design_objectives(dataset.metrics[i]);
        objs.push_back(ind.objectives);
        cands.push_back(std::move(ind));
    }
    return build_front(std::move(cands), normalized_frame(objs));
}

DesignObjective direct_objective(const Environment& env, const IncidentSpectrum& incident, const Calibration& cal) {
    return [env, incident, &cal](const DesignPoint& d) {
        return design_objectives(evaluate_design(d, env, incident, cal));
    };
}

DesignObjective surrogate_objective(const SurrogateBundle& bundle) {
    for (const char* t : {"dT_K", "pout_W"}) {
        if (!bundle.models.count(t)) {
            throw ConfigError(std::string("surrogate has no model for '") + t + "'");
        }
    }
    return [&bundle](const DesignPoint& d) {
        const auto v = d.to_vector();
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        const double dT = gpr_predict(bundle.models.at("dT_K"), x).mean;
        const double p = gpr_predict(bundle.models.at("pout_W"), x).mean;
        return ObjectiveVector{-dT, -p, d.device_thickness()};
    };
}

ParetoFront reevaluate_front(const ParetoFront& front, const Environment& env, const IncidentSpectrum& incident,
                             const Calibration& cal) {
    std::vector<Individual> cands;
    for (const auto& m : front.members) {
        DesignPoint::Vector v{};
        std::copy(m.x.begin(), m.x.end(), v.begin());
        Individual ind = m;
        ind.objectives = design_objectives(evaluate_design(DesignPoint::from_vector(v), env, incident, cal));
        cands.push_back(std::move(ind));
    }
    return build_front(std::move(cands), front.frame);
}

void write_front_csv(std::ostream& os, const ParetoFront& front, std::uint64_t seed, const std::string& ledger) {
    os << provenance_comment(seed, ledger) << '\n';
    for (auto name : design_column_names()) {
        os << name << ',';
    }
    os << "dT_K,pout_W,tdev_m,rank,crowding\n";
    for (const auto& m : front.members) {
        if (m.x.size() != kDesignVariableCount || m.objectives.size() != 3) {
            throw ArgumentError("front CSV needs design-space members with 3 objectives");
        }
        for (double v : m.x) {
            os << format_double(v) << ',';
        }
        os << format_double(-m.objectives[0]) << ',' << format_double(-m.objectives[1]) << ','
           << format_double(m.objectives[2]) << ',' << m.rank << ',' << format_double(m.crowding) << '\n';
    }
}

void write_generation_log_csv(std::ostream& os, const std::vector<GenerationRecord>& log, std::uint64_t seed,
                              const std::string& ledger) {
    os << provenance_comment(seed, ledger) << '\n';
    os << "generation,evaluations,front_size,front_hv,archive_hv,best_dT_K,best_pout_W,best_tdev_m\n";
    for (const auto& r : log) {
        if (r.best.size() != 3) {
            throw ArgumentError("generation log CSV needs 3 objectives");
        }
        os << r.generation << ',' << r.evaluations << ',' << r.front_size << ',' << format_double(r.front_hypervolume)
           << ',' << format_double(r.archive_hypervolume) << ',' << format_double(-r.best[0]) << ','
           << format_double(-r.best[1]) << ',' << format_double(r.best[2]) << '\n';
    }
}

std::size_t knee_point(const ParetoFront& front) {
    if (front.members.empty()) {
        throw ArgumentError("knee_point needs a non-empty front");
    }
    const std::size_t m = front.members.front().objectives.size();
    std::vector<double> ideal(m, kInf);
    for (const auto& mem : front.members) {
        for (std::size_t i = 0; i < m; ++i) {
            ideal[i] = std::min(ideal[i], mem.objectives[i]);
        }
    }
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t k = 0; k < front.members.size(); ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = (front.members[k].objectives[i] - ideal[i]) / front.frame.scale[i];
            d += s * s;
        }
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace thermoharvest
