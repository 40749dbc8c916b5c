#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace thermoharvest {

inline constexpr const char* kArtifactVersion = THERMOHARVEST_VERSION;

// ---------------------------------------------------------------------------
// Seeding. Every stochastic decision draws from a stream keyed by
// (master seed, label, index...) so that results never depend on which thread
// happened to run which piece of work.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for a labelled sub-task ("dataset", "optimize", ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

/// Child seed for the i-th item of a keyed family.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// xoshiro256** with its own bit-exact
/// uniform transform, so sequences are identical across standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n).
    std::size_t below(std::size_t n) noexcept;

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::uint64_t s_[4];
};

// ---------------------------------------------------------------------------
// Work distribution.

/// Worker count from an explicit flag value, else THERMOHARVEST_WORKERS, else 1.
std::size_t resolve_workers(std::size_t requested);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; the first exception thrown is rethrown after join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Text output.

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Comment line embedded at the top of every CSV the tools write.
std::string provenance_comment(std::uint64_t seed, std::string_view ledger_version);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

}  // namespace thermoharvest
