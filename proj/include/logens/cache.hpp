#pragma once

// Exact-match prediction cache keyed by the ordered template-id list.
// Reads take a shared lock; writes are serialized. Memory accounting uses
// a documented deterministic estimate, not allocator introspection.

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "logens/core.hpp"

namespace logens {

enum class CacheAddOutcome { Inserted, AlreadyPresent, CapacityExceeded };
enum class CacheUpdateOutcome { Updated, Missing };
enum class CacheDeleteOutcome { Deleted, Missing };

// Estimate constants: 4 bytes per stored id, 32 bytes per entry for the
// label/counter/bucket bookkeeping, 64 bytes for the table itself.
inline constexpr std::size_t kCacheIdWidthBytes = 4;
inline constexpr std::size_t kCachePerEntryOverheadBytes = 32;
inline constexpr std::size_t kCacheBaseOverheadBytes = 64;

class PredictionCache {
public:
    PredictionCache() = default;

    // Optional guard: adds beyond the limit return CapacityExceeded.
    explicit PredictionCache(std::size_t max_entries) : max_entries_(max_entries) {}

    // Movable for pipeline construction; the source must be quiescent.
    PredictionCache(PredictionCache&& other) noexcept
        : entries_(std::move(other.entries_)),
          key_ids_total_(other.key_ids_total_),
          next_counter_(other.next_counter_),
          max_entries_(other.max_entries_) {}
    PredictionCache& operator=(PredictionCache&&) = delete;
    PredictionCache(const PredictionCache&) = delete;
    PredictionCache& operator=(const PredictionCache&) = delete;

    std::optional<Label> query(const std::vector<TemplateId>& seq) const;
    CacheAddOutcome add(const std::vector<TemplateId>& seq, Label label);
    CacheUpdateOutcome update(const std::vector<TemplateId>& seq, Label label);
    CacheDeleteOutcome remove(const std::vector<TemplateId>& seq);

    std::size_t size() const;
    std::size_t memory_usage_bytes() const;

    // Snapshot format matches the canonical sequence file: label<TAB>ids.
    void save_snapshot(const std::string& path) const;
    void load_snapshot(const std::string& path);

private:
    struct Entry {
        Label label;
        std::uint64_t inserted_at;
    };
    struct KeyHash {
        std::size_t operator()(const std::vector<TemplateId>& key) const {
            std::uint64_t h = 1469598103934665603ull;
            for (TemplateId id : key) {
                h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(id));
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::vector<TemplateId>, Entry, KeyHash> entries_;
    std::size_t key_ids_total_ = 0;  // sum of key lengths, for the estimate
    std::uint64_t next_counter_ = 0;
    std::optional<std::size_t> max_entries_;
};

}  // namespace logens
