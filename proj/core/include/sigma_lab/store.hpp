#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab {

class CorruptEntry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw, unvalidated form of a cache line.
struct CacheEntry {
    std::string value;
    std::vector<std::pair<std::string, std::uint32_t>> parts;
};

/// `<value> <p1>^<e1> <p2>^<e2> ...` without the trailing newline.
std::string format_cache_line(const Factorization& f);

/// Parses one line and validates it (primality, ordering, product).
/// Throws CorruptEntry on any failure.
Factorization parse_cache_line(std::string_view line);

/// Validates a raw entry; throws CorruptEntry.
Factorization to_factorization(const CacheEntry& entry);

struct CorruptLine {
    std::size_t line_number = 0;
    std::string reason;
};

/// On-disk factorization cache: one entry per line, appended as it grows.
///
/// Lookups may run concurrently from any number of threads; inserts are
/// serialized through a single writer lock and each one appends a complete,
/// newline-terminated line. A final line without its newline (a torn append)
/// is reported as corrupt on load and otherwise ignored, as is any line that
/// fails to parse or whose product does not match its value.
class FactorCache : public FactorSource {
public:
    /// Memory-only cache.
    FactorCache() = default;
    /// Loads `path` if it exists; inserts are appended to it.
    explicit FactorCache(std::filesystem::path path);

    FactorCache(const FactorCache&) = delete;
    FactorCache& operator=(const FactorCache&) = delete;

    std::optional<Factorization> lookup(const Integer& value) const override;
    void remember(const Factorization& f) override { insert(f); }

    /// Returns false when the value was already present (no line written).
    bool insert(const Factorization& f);
    /// Validates before anything is written; throws CorruptEntry.
    bool insert(const CacheEntry& entry);

    void flush();
    /// Re-reads the backing file, replacing the in-memory index.
    void reload();
    /// Writes every entry, ascending by value, to `path` via a temporary file and rename.
    void save_as(const std::filesystem::path& path) const;

    std::size_t size() const;
    std::vector<CorruptLine> corrupt_lines() const;
    const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

private:
    void load_locked();

    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::map<Integer, Factorization> entries_;
    std::vector<CorruptLine> corrupt_;
    std::mutex writer_mutex_;
    std::ofstream writer_;
};

/// Scan-time view of a FactorCache. Lookups see only the entries present when
/// the view was created, so results and budget use do not depend on how work
/// was scheduled; new factorizations are held back until commit(), which
/// inserts them in ascending order.
class SnapshotSource : public FactorSource {
public:
    explicit SnapshotSource(FactorCache& cache) : cache_(cache) {}

    std::optional<Factorization> lookup(const Integer& value) const override;
    void remember(const Factorization& f) override;

    /// Returns the number of entries newly written to the cache.
    std::size_t commit();

private:
    FactorCache& cache_;
    std::mutex pending_mutex_;
    std::map<Integer, Factorization> pending_;
};

/// Environment variable naming the default cache file.
inline constexpr const char* kCacheEnvVar = "SIGMA_LAB_CACHE";

}  // namespace sigma_lab
