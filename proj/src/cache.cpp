#include "logens/cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace logens {

std::optional<Label> PredictionCache::query(const std::vector<TemplateId>& seq) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(seq);
    if (it == entries_.end()) return std::nullopt;
    return it->second.label;
}

CacheAddOutcome PredictionCache::add(const std::vector<TemplateId>& seq, Label label) {
    std::unique_lock lock(mutex_);
    if (entries_.count(seq)) return CacheAddOutcome::AlreadyPresent;
    if (max_entries_ && entries_.size() >= *max_entries_)
        return CacheAddOutcome::CapacityExceeded;
    entries_.emplace(seq, Entry{label, next_counter_++});
    key_ids_total_ += seq.size();
    return CacheAddOutcome::Inserted;
}

CacheUpdateOutcome PredictionCache::update(const std::vector<TemplateId>& seq, Label label) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(seq);
    if (it == entries_.end()) return CacheUpdateOutcome::Missing;
    it->second.label = label;
    return CacheUpdateOutcome::Updated;
}

CacheDeleteOutcome PredictionCache::remove(const std::vector<TemplateId>& seq) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(seq);
    if (it == entries_.end()) return CacheDeleteOutcome::Missing;
    key_ids_total_ -= it->first.size();
    entries_.erase(it);
    return CacheDeleteOutcome::Deleted;
}

std::size_t PredictionCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::size_t PredictionCache::memory_usage_bytes() const {
    std::shared_lock lock(mutex_);
    return kCacheBaseOverheadBytes + key_ids_total_ * kCacheIdWidthBytes +
           entries_.size() * kCachePerEntryOverheadBytes;
}

void PredictionCache::save_snapshot(const std::string& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    for (const auto& [key, entry] : entries_) {
        out << label_to_int(entry.label) << '\t';
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (i) out << ' ';
            out << key[i];
        }
        out << '\n';
    }
}

void PredictionCache::load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open cache snapshot: " + path);
    std::string line;
    std::size_t lineno = 0;
    std::unique_lock lock(mutex_);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) +
                              ": expected label<TAB>ids");
        const Label label = label_from_int(std::stoi(line.substr(0, tab)));
        std::vector<TemplateId> ids;
        std::istringstream rest(line.substr(tab + 1));
        TemplateId id;
        while (rest >> id) ids.push_back(id);
        if (ids.empty())
            throw input_error(path + ":" + std::to_string(lineno) + ": empty sequence");
        if (!entries_.count(ids)) {
            key_ids_total_ += ids.size();
            entries_.emplace(std::move(ids), Entry{label, next_counter_++});
        }
    }
}

}  // namespace logens
