#pragma once

// Template mining: a fixed-depth prefix tree groups messages by their
// leading tokens, then similarity against the group's templates decides
// between reuse (with wildcard updates) and a new template. A passthrough
// mode covers corpora whose messages are single atomic tokens.

#include <string>
#include <unordered_map>
#include <vector>

#include "logens/core.hpp"

namespace logens {

struct ParserConfig {
    int tree_depth = 4;                  // >= 2
    double similarity_threshold = 0.4;   // in (0,1)
    int max_children = 100;
    std::string wildcard_marker = kWildcard;
    bool numeric_masking = true;

    void validate() const;
};

// Dense-id template container: ids 0..size()-1 are always all present.
class TemplateStore {
public:
    TemplateId add(std::vector<std::string> tokens);
    const LogTemplate& get(TemplateId id) const;
    LogTemplate& get_mutable(TemplateId id);
    std::size_t size() const { return templates_.size(); }
    const std::vector<LogTemplate>& all() const { return templates_; }

private:
    std::vector<LogTemplate> templates_;
};

struct ParseResult {
    TemplateId id = 0;
    std::vector<std::string> params;  // message tokens at wildcard positions
};

class TemplateMiner {
public:
    explicit TemplateMiner(ParserConfig cfg);

    // Matches content against the mined templates, updating wildcards where
    // aligned tokens differ, or mints a new template. Throws input_error on
    // content that is empty after trimming.
    ParseResult parse_message(const std::string& content);

    // One template per distinct single-token message.
    TemplateId parse_passthrough(const std::string& content);

    const TemplateStore& store() const { return store_; }
    const ParserConfig& config() const { return cfg_; }

private:
    struct TreeNode {
        std::unordered_map<std::string, int> children;  // token -> node index
        std::vector<TemplateId> group;                  // leaf-level template ids
    };

    int route(const std::vector<std::string>& tokens);
    double similarity(const LogTemplate& t, const std::vector<std::string>& tokens) const;

    ParserConfig cfg_;
    TemplateStore store_;
    std::vector<TreeNode> nodes_;
    std::unordered_map<std::string, TemplateId> passthrough_ids_;
};

std::vector<std::string> tokenize(const std::string& content);

// True for tokens made of digits and separator punctuation only (no letters):
// "12", "0x" fails, "12.2.1.6" and "08:55:03" pass.
bool is_numeric_token(const std::string& token);

// Fraction of message pairs whose grouped-together/apart status agrees
// between the two assignments. Both vectors map message index -> group id.
double grouping_accuracy(const std::vector<int>& assignment,
                         const std::vector<int>& reference);

// Line format: id<TAB>token token token
void save_template_store(const TemplateStore& store, const std::string& path);
TemplateStore load_template_store(const std::string& path);

}  // namespace logens
