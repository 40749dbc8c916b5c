#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "test_support.hpp"
#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

using namespace thermoharvest;

TEST_CASE("splitmix64 matches the reference generator") {
    // First output of the reference splitmix64 seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("derived seeds depend on label and index") {
    CHECK(derive_seed(42, "dataset") == derive_seed(42, "dataset"));
    CHECK(derive_seed(42, "dataset") != derive_seed(42, "optimize"));
    CHECK(derive_seed(42, "dataset") != derive_seed(43, "dataset"));
    std::set<std::uint64_t> seen;
    for (std::uint64_t g = 0; g < 20; ++g) {
        for (std::uint64_t j = 0; j < 20; ++j) {
            seen.insert(derive_seed(7, g, j));
        }
    }
    CHECK(seen.size() == 400);
}

TEST_CASE("random stream is reproducible and uniform") {
    RandomStream a(5);
    RandomStream b(5);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
    RandomStream r(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        ++counts[r.below(7)];
    }
    for (int c : counts) {
        CHECK(c == doctest::Approx(10000).epsilon(0.05));
    }
}

TEST_CASE("shuffle is a permutation") {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    RandomStream r(3);
    r.shuffle(v);
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 50);
    CHECK(*s.begin() == 0);
    CHECK(*s.rbegin() == 49);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
    for (std::size_t workers : {1u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(1000, workers, [&](std::size_t i) { hits[i].fetch_add(1); });
        for (auto& h : hits) {
            CHECK(h.load() == 1);
        }
    }
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("resolve_workers prefers the flag, then the environment") {
    CHECK(resolve_workers(3) == 3);
    ::setenv("THERMOHARVEST_WORKERS", "5", 1);
    CHECK(resolve_workers(0) == 5);
    ::setenv("THERMOHARVEST_WORKERS", "zero", 1);
    CHECK_THROWS_AS((void)resolve_workers(0), ConfigError);
    ::unsetenv("THERMOHARVEST_WORKERS");
    CHECK(resolve_workers(0) == 1);
}

TEST_CASE("format_double round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(12.9) == "12.9");
    CHECK(format_double(1e-9) == "1e-09");
    for (double v : {1.0 / 3.0, 2.709e-3, 6.02214076e23, -4.5e-300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("provenance comment names version, seed and ledger") {
    const auto c = provenance_comment(7, "L1");
    CHECK(c == std::string("# thermoharvest ") + kArtifactVersion + " seed=7 ledger=L1");
}

TEST_CASE("sha256 of a known string") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("text file round trip and missing file") {
    th_test::TempDir dir("util");
    write_text_file(dir.path() / "a.txt", "hello\n");
    CHECK(read_text_file(dir.path() / "a.txt") == "hello\n");
    CHECK_THROWS_AS((void)read_text_file(dir.path() / "missing.txt"), IoError);
}

TEST_CASE("rethrow_with_context keeps the error kind") {
    try {
        try {
            throw DomainError("gap too small");
        } catch (const Error& e) {
            rethrow_with_context(e, "design 3");
        }
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()) == "design 3: gap too small");
        CHECK(e.kind() == "domain");
    }
}
