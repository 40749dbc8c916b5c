#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "thermoharvest/error.hpp"
#include "thermoharvest/moo.hpp"
#include "thermoharvest/util.hpp"

using namespace thermoharvest;

namespace {

ObjectiveVector zdt1(const std::vector<double>& x) {
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) g += x[i];
    g = 1.0 + 9.0 * g / static_cast<double>(x.size() - 1);
    const double f1 = x[0];
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

std::set<std::size_t> brute_first_front(const std::vector<ObjectiveVector>& pop) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pop.size(); ++j) dominated = dominated || dominates(pop[j], pop[i]);
        if (!dominated) out.insert(i);
    }
    return out;
}

std::string front_bytes(const EvolveResult& r) {
    std::ostringstream os;
    for (const auto& m : r.front.members) {
        for (double v : m.x) os << format_double(v) << ',';
        for (double v : m.objectives) os << format_double(v) << ',';
        os << m.rank << ',' << format_double(m.crowding) << '\n';
    }
    for (const auto& g : r.log) {
        os << g.generation << ',' << g.evaluations << ',' << g.front_size << ','
           << format_double(g.front_hypervolume) << ',' << format_double(g.archive_hypervolume) << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("Pareto dominance examples") {
    CHECK(dominates({1, 2}, {2, 3}));
    CHECK(dominates({1, 2}, {1, 3}));
    CHECK_FALSE(dominates({1, 2}, {1, 2}));
    CHECK_FALSE(dominates({1, 3}, {2, 2}));
    CHECK_FALSE(dominates({2, 3}, {1, 2}));
    CHECK_THROWS_AS((void)dominates({1, 2}, {1, 2, 3}), ArgumentError);
}

TEST_CASE("non-dominated sort of a chain and an antichain") {
    const auto chain = non_dominated_sort({{3, 3}, {1, 1}, {2, 2}});
    REQUIRE(chain.size() == 3);
    CHECK(chain[0] == std::vector<std::size_t>{1});
    CHECK(chain[1] == std::vector<std::size_t>{2});
    CHECK(chain[2] == std::vector<std::size_t>{0});
    const auto anti = non_dominated_sort({{1, 4}, {2, 3}, {3, 2}, {4, 1}});
    REQUIRE(anti.size() == 1);
    CHECK(anti[0].size() == 4);
}

TEST_CASE("non-dominated sort agrees with brute force") {
    RandomStream rng(2);
    std::vector<ObjectiveVector> pop;
    for (int i = 0; i < 50; ++i) pop.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const auto fronts = non_dominated_sort(pop);
    const auto f0 = std::set<std::size_t>(fronts[0].begin(), fronts[0].end());
    CHECK(f0 == brute_first_front(pop));
    std::size_t total = 0;
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        total += fronts[k].size();
        for (auto i : fronts[k]) {
            for (std::size_t m = k; m < fronts.size(); ++m)
                for (auto j : fronts[m]) CHECK_FALSE(dominates(pop[j], pop[i]));
            if (k > 0) {
                bool has_dominator = false;
                for (auto j : fronts[k - 1]) has_dominator = has_dominator || dominates(pop[j], pop[i]);
                CHECK(has_dominator);
            }
        }
    }
    CHECK(total == pop.size());
}

TEST_CASE("crowding distance") {
    const auto two = crowding_distance({{0, 1}, {1, 0}});
    CHECK(std::isinf(two[0]));
    CHECK(std::isinf(two[1]));
    const auto line = crowding_distance({{0, 2}, {1, 1}, {2, 0}});
    CHECK(std::isinf(line[0]));
    CHECK(std::isinf(line[2]));
    CHECK(line[1] == doctest::Approx(2.0).epsilon(1e-15));
    const auto dup = crowding_distance({{0, 2}, {1, 1}, {1, 1}, {2, 0}});
    for (double d : dup) CHECK(d >= 0.0);
    const auto flat = crowding_distance({{0, 5}, {1, 5}, {2, 5}});
    CHECK(std::isfinite(flat[1]));
}

TEST_CASE("hypervolume of simple sets") {
    CHECK(hypervolume({{0, 0}}, {1, 1}) == doctest::Approx(1.0));
    CHECK(hypervolume({{0, 0.5}, {0.5, 0}}, {1, 1}) == doctest::Approx(0.75));
    CHECK(hypervolume({{2, 2}}, {1, 1}) == 0.0);
    CHECK(hypervolume({{0, 0, 0}}, {1, 2, 3}) == doctest::Approx(6.0));
    CHECK(hypervolume({{0, 0, 0.5}, {0.5, 0.5, 0}}, {1, 1, 1}) == doctest::Approx(0.5 + 0.25 * 0.5));
}

TEST_CASE("a constant objective does not break the optimiser") {
    NsgaConfig cfg;
    cfg.population = 20;
    cfg.generations = 10;
    cfg.seed = 3;
    const auto r = evolve_box({{0, 1}, {0, 1}}, cfg, [](const std::vector<double>& x) {
        return ObjectiveVector{1.0, x[0]};
    });
    REQUIRE_FALSE(r.front.members.empty());
    for (const auto& m : r.front.members) CHECK(std::isfinite(m.objectives[1]));
}

TEST_CASE("ZDT1 front reaches 98 percent of the true hypervolume") {
    NsgaConfig cfg;
    cfg.population = 100;
    cfg.generations = 250;
    cfg.seed = 7;
    cfg.mutation_prob = 1.0 / 30.0;
    cfg.reference = ObjectiveVector{1.1, 1.1};
    const std::vector<std::pair<double, double>> box(30, {0.0, 1.0});
    const auto r = evolve_box(box, cfg, zdt1);
    // Area dominated by f2 = 1 - sqrt(f1) up to (1.1, 1.1).
    const double truth = 0.11 + 0.1 + 2.0 / 3.0;
    std::vector<ObjectiveVector> pts;
    for (const auto& m : r.front.members) pts.push_back(m.objectives);
    CHECK(hypervolume(pts, {1.1, 1.1}) >= 0.98 * truth);
}

TEST_CASE("evolution is bit-identical across worker counts") {
    NsgaConfig cfg;
    cfg.population = 40;
    cfg.generations = 30;
    cfg.seed = 11;
    const std::vector<std::pair<double, double>> box(6, {0.0, 1.0});
    cfg.workers = 1;
    const auto a = evolve_box(box, cfg, zdt1);
    cfg.workers = 8;
    const auto b = evolve_box(box, cfg, zdt1);
    CHECK(front_bytes(a) == front_bytes(b));
    cfg.seed = 12;
    CHECK(front_bytes(evolve_box(box, cfg, zdt1)) != front_bytes(a));
}

TEST_CASE("elitism, bounds and archive monotonicity") {
    NsgaConfig cfg;
    cfg.population = 30;
    cfg.generations = 40;
    cfg.seed = 5;
    const std::vector<std::pair<double, double>> box{{-1, 2}, {0, 3}, {5, 6}};
    const auto r = evolve_box(box, cfg, [](const std::vector<double>& x) {
        return ObjectiveVector{x[0] * x[0] + x[2], (x[0] - 1) * (x[0] - 1) + x[1]};
    });
    for (const auto& m : r.front.members) {
        for (std::size_t d = 0; d < box.size(); ++d) {
            CHECK(m.x[d] >= box[d].first);
            CHECK(m.x[d] <= box[d].second);
        }
        CHECK(m.rank == 0);
    }
    REQUIRE(r.log.size() == cfg.generations + 1);
    for (std::size_t g = 1; g < r.log.size(); ++g) {
        CHECK(r.log[g].archive_hypervolume >= r.log[g - 1].archive_hypervolume);
        for (std::size_t k = 0; k < 2; ++k) CHECK(r.log[g].best[k] <= r.log[g - 1].best[k]);
    }
}

TEST_CASE("front extraction") {
    HypervolumeFrame frame = normalized_frame({{0, 0}, {1, 1}});
    Individual only{{0.5}, {1, 1}, 0, 0};
    CHECK(build_front({only}, frame).members.size() == 1);
    Individual a{{0.1}, {1, 2}, 0, 0}, b{{0.2}, {0.5, 1}, 0, 0}, c{{0.3}, {0.5, 1}, 0, 0};
    const auto f = build_front({a, b, c}, frame);
    REQUIRE(f.members.size() == 1);
    CHECK(f.members[0].objectives == ObjectiveVector{0.5, 1});
}

TEST_CASE("512-point grid front equals brute force") {
    std::vector<Individual> all;
    std::vector<ObjectiveVector> objs;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c) {
                Individual ind;
                ind.x = {double(a), double(b), double(c)};
                ind.objectives = {double((a - 3) * (a - 3) + b), double((a - 5) * (a - 5) + c), double(7 - b + c)};
                objs.push_back(ind.objectives);
                all.push_back(ind);
            }
    const auto f = build_front(all, normalized_frame(objs));
    std::set<ObjectiveVector> want;
    for (auto i : brute_first_front(objs)) want.insert(objs[i]);
    std::set<ObjectiveVector> got;
    for (const auto& m : f.members) got.insert(m.objectives);
    CHECK(got == want);
}

TEST_CASE("evolution on a discrete grid recovers the exhaustive front") {
    auto level = [](double x) { return std::min(7, static_cast<int>(x)); };
    auto obj = [&](const std::vector<double>& x) {
        const int a = level(x[0]), b = level(x[1]), c = level(x[2]);
        return ObjectiveVector{double((a - 2) * (a - 2) + c), double((a - 6) * (a - 6) + b), double(3 - b + 2 * c)};
    };
    std::vector<ObjectiveVector> grid;
    std::vector<std::vector<int>> cells;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c) {
                grid.push_back(obj({a + 0.5, b + 0.5, c + 0.5}));
                cells.push_back({a, b, c});
            }
    std::set<ObjectiveVector> want;
    for (auto i : brute_first_front(grid)) want.insert(grid[i]);

    NsgaConfig cfg;
    cfg.seed = 19;
    const auto r = evolve_box({{0, 8}, {0, 8}, {0, 8}}, cfg, obj);
    std::set<ObjectiveVector> got;
    for (const auto& m : r.front.members) got.insert(m.objectives);
    CHECK(got == want);
}

TEST_CASE("knee point and objectives") {
    PerformanceMetrics m;
    m.delta_T_eff = 10;
    m.p_out = 1e-7;
    m.device_thickness = 1e-5;
    CHECK(design_objectives(m) == ObjectiveVector{-10, -1e-7, 1e-5});
    HypervolumeFrame frame = normalized_frame({{0, 1}, {1, 0}});
    Individual a{{0}, {0, 1}, 0, 0}, b{{1}, {0.4, 0.4}, 0, 0}, c{{2}, {1, 0}, 0, 0};
    const auto f = build_front({a, b, c}, frame);
    CHECK(f.members[knee_point(f)].objectives == ObjectiveVector{0.4, 0.4});
}

TEST_CASE("configuration validation") {
    NsgaConfig cfg;
    cfg.population = 1;
    CHECK_THROWS((void)cfg.validate());
    NsgaConfig odd;
    odd.crossover_prob = 1.5;
    CHECK_THROWS((void)odd.validate());
}
