#include "logens/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace logens {

void ParserConfig::validate() const {
    if (tree_depth < 2) throw config_error("parser tree_depth must be >= 2");
    if (similarity_threshold <= 0.0 || similarity_threshold >= 1.0)
        throw config_error("parser similarity_threshold must be in (0,1)");
    if (max_children < 1) throw config_error("parser max_children must be >= 1");
}

std::vector<std::string> tokenize(const std::string& content) {
    std::vector<std::string> tokens;
    std::istringstream in(content);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

bool is_numeric_token(const std::string& token) {
    bool digit = false;
    for (unsigned char c : token) {
        if (std::isdigit(c)) {
            digit = true;
        } else if (std::isalpha(c)) {
            return false;
        } else if (c != '.' && c != ',' && c != ':' && c != '-' && c != '_' && c != '/') {
            return false;
        }
    }
    return digit;
}

TemplateId TemplateStore::add(std::vector<std::string> tokens) {
    LogTemplate t;
    t.id = static_cast<TemplateId>(templates_.size());
    t.tokens = std::move(tokens);
    templates_.push_back(std::move(t));
    return templates_.back().id;
}

const LogTemplate& TemplateStore::get(TemplateId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= templates_.size())
        throw input_error("unknown template id " + std::to_string(id));
    return templates_[static_cast<std::size_t>(id)];
}

LogTemplate& TemplateStore::get_mutable(TemplateId id) {
    return const_cast<LogTemplate&>(static_cast<const TemplateStore*>(this)->get(id));
}

TemplateMiner::TemplateMiner(ParserConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    nodes_.push_back({});  // root
}

int TemplateMiner::route(const std::vector<std::string>& tokens) {
    int node = 0;
    const std::size_t levels =
        std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(cfg_.tree_depth));
    for (std::size_t i = 0; i < levels; ++i) {
        const std::string& key = tokens[i];
        auto& children = nodes_[static_cast<std::size_t>(node)].children;
        auto it = children.find(key);
        if (it != children.end()) {
            node = it->second;
            continue;
        }
        // Full fan-out collapses into a shared wildcard branch.
        if (key != cfg_.wildcard_marker &&
            static_cast<int>(children.size()) >= cfg_.max_children) {
            auto wit = children.find(cfg_.wildcard_marker);
            if (wit != children.end()) {
                node = wit->second;
                continue;
            }
            const int idx = static_cast<int>(nodes_.size());
            nodes_.push_back({});
            nodes_[static_cast<std::size_t>(node)].children[cfg_.wildcard_marker] = idx;
            node = idx;
            continue;
        }
        const int idx = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_[static_cast<std::size_t>(node)].children[key] = idx;
        node = idx;
    }
    return node;
}

double TemplateMiner::similarity(const LogTemplate& t,
                                 const std::vector<std::string>& tokens) const {
    if (t.tokens.size() != tokens.size()) return 0.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (t.tokens[i] != cfg_.wildcard_marker && t.tokens[i] == tokens[i]) ++same;
    return static_cast<double>(same) / static_cast<double>(tokens.size());
}

ParseResult TemplateMiner::parse_message(const std::string& content) {
    std::vector<std::string> raw = tokenize(content);
    if (raw.empty()) throw input_error("cannot parse empty log content");

    std::vector<std::string> masked = raw;
    if (cfg_.numeric_masking) {
        for (auto& tok : masked)
            if (is_numeric_token(tok)) tok = cfg_.wildcard_marker;
    }

    const int leaf = route(masked);
    auto& group = nodes_[static_cast<std::size_t>(leaf)].group;

    TemplateId best = -1;
    double best_sim = -1.0;
    for (TemplateId id : group) {
        const double s = similarity(store_.get(id), masked);
        if (s > best_sim) {
            best_sim = s;
            best = id;
        }
    }

    if (best >= 0 && best_sim >= cfg_.similarity_threshold) {
        LogTemplate& t = store_.get_mutable(best);
        for (std::size_t i = 0; i < masked.size(); ++i)
            if (t.tokens[i] != cfg_.wildcard_marker && t.tokens[i] != masked[i])
                t.tokens[i] = cfg_.wildcard_marker;
        ParseResult r;
        r.id = best;
        for (std::size_t i = 0; i < masked.size(); ++i)
            if (t.tokens[i] == cfg_.wildcard_marker) r.params.push_back(raw[i]);
        return r;
    }

    const TemplateId id = store_.add(masked);
    group.push_back(id);
    ParseResult r;
    r.id = id;
    const LogTemplate& t = store_.get(id);
    for (std::size_t i = 0; i < masked.size(); ++i)
        if (t.tokens[i] == cfg_.wildcard_marker) r.params.push_back(raw[i]);
    return r;
}

TemplateId TemplateMiner::parse_passthrough(const std::string& content) {
    std::vector<std::string> tokens = tokenize(content);
    if (tokens.size() != 1)
        throw input_error("passthrough expects a single token, got: " + content);
    auto it = passthrough_ids_.find(tokens[0]);
    if (it != passthrough_ids_.end()) return it->second;
    const TemplateId id = store_.add({tokens[0]});
    passthrough_ids_.emplace(tokens[0], id);
    return id;
}

double grouping_accuracy(const std::vector<int>& assignment,
                         const std::vector<int>& reference) {
    if (assignment.size() != reference.size())
        throw input_error("grouping reference does not cover all parsed messages");
    const std::size_t n = assignment.size();
    if (n < 2) return 1.0;
    std::size_t agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool a = assignment[i] == assignment[j];
            const bool b = reference[i] == reference[j];
            agree += (a == b);
            ++pairs;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

void save_template_store(const TemplateStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    for (const LogTemplate& t : store.all()) {
        out << t.id << '\t';
        for (std::size_t i = 0; i < t.tokens.size(); ++i) {
            if (i) out << ' ';
            out << t.tokens[i];
        }
        out << '\n';
    }
}

TemplateStore load_template_store(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open template store: " + path);
    TemplateStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected id<TAB>tokens");
        const int id = std::stoi(line.substr(0, tab));
        std::vector<std::string> tokens = tokenize(line.substr(tab + 1));
        if (tokens.empty())
            throw input_error(path + ":" + std::to_string(lineno) + ": template has no tokens");
        const TemplateId got = store.add(std::move(tokens));
        if (got != id)
            throw input_error(path + ": template ids must be dense and in order");
    }
    return store;
}

}  // namespace logens
