#pragma once

// Lookup table of template/system-call descriptions used to enrich prompts.
// Keys are exact and case-sensitive after whitespace trim.

#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>

#include "logens/core.hpp"

namespace logens {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class KnowledgeBase {
public:
    KnowledgeBase() = default;

    void put(const std::string& key, std::string description) {
        entries_[trim(key)] = std::move(description);
    }

    std::optional<std::string> lookup(const std::string& key) const {
        auto it = entries_.find(trim(key));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Line format: key<TAB>description
    static KnowledgeBase load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open knowledge base: " + path);
        KnowledgeBase kb;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw input_error(path + ":" + std::to_string(lineno) +
                                  ": expected key<TAB>description");
            kb.put(line.substr(0, tab), trim(line.substr(tab + 1)));
        }
        return kb;
    }

private:
    std::unordered_map<std::string, std::string> entries_;
};

}  // namespace logens
