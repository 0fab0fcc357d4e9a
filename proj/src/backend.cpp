#include "logens/backend.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace logens {

namespace {

std::vector<std::string> lower_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

}  // namespace

std::optional<Label> parse_label_response(const std::string& text) {
    const std::vector<std::string> tokens = lower_tokens(text);
    for (const std::string& t : tokens)
        if (t == "anomalous" || t == "abnormal" || t == "1") return Label::Anomalous;
    for (const std::string& t : tokens)
        if (t == "normal" || t == "0") return Label::Normal;
    return std::nullopt;
}

ClassifyResult classify_with_llm(ChatBackend& backend, const Prompt& prompt,
                                 const RetryPolicy& policy, int max_tokens) {
    policy.validate();
    const std::string text = prompt.render();
    const int attempts_max = policy.max_attempts();

    for (int attempt = 1; attempt <= attempts_max; ++attempt) {
        ChatRequest req;
        req.prompt = text;
        req.temperature = attempt == 1
                              ? policy.base_temperature
                              : policy.ladder[static_cast<std::size_t>(attempt - 2)];
        req.max_tokens = max_tokens;

        const ChatResponse resp = backend.complete(req);
        if (!resp.ok) {
            if (attempt == attempts_max)
                throw backend_error("backend unavailable after " +
                                    std::to_string(attempts_max) +
                                    " attempts: " + resp.error);
            continue;
        }
        if (auto label = parse_label_response(resp.content)) return {*label, attempt};
    }
    return {policy.default_label, attempts_max};
}

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw config_error("backend endpoint must include a scheme: " + cfg_.endpoint);
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = cfg_.endpoint;
        path_ = "/v1/chat/completions";
    } else {
        host_ = cfg_.endpoint.substr(0, path_start);
        path_ = cfg_.endpoint.substr(path_start);
    }
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
    httplib::Client client(host_);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);

    httplib::Headers headers;
    if (!cfg_.token_env.empty()) {
        if (const char* token = std::getenv(cfg_.token_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    nlohmann::json body = {
        {"model", cfg_.model},
        {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    ChatResponse out;
    if (!res) {
        out.error = "connection to " + host_ + " failed";
        return out;
    }
    if (res->status != 200) {
        out.error = "HTTP " + std::to_string(res->status);
        return out;
    }
    try {
        const auto j = nlohmann::json::parse(res->body);
        out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
        out.ok = true;
    } catch (const nlohmann::json::exception& e) {
        out.error = std::string("malformed completion response: ") + e.what();
    }
    return out;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    temperatures_.push_back(request.temperature);
    ChatResponse out;
    if (next_ >= responses_.size()) {
        out.error = "script exhausted";
        return out;
    }
    const std::string& r = responses_[next_++];
    if (r == "!fail") {
        out.error = "scripted transport failure";
        return out;
    }
    out.ok = true;
    out.content = r;
    return out;
}

RuleBackend::RuleBackend(const std::string& rule) {
    const auto colon = rule.find(':');
    const std::string head = rule.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : rule.substr(colon + 1);
    if (head == "always") {
        kind_ = Kind::Always;
        if (tail == "anomalous") {
            always_ = Label::Anomalous;
        } else if (tail == "normal") {
            always_ = Label::Normal;
        } else {
            throw config_error("mock rule 'always:' expects normal|anomalous");
        }
    } else if (head == "contains") {
        kind_ = Kind::Contains;
        std::string cur;
        for (char c : tail) {
            if (c == '|') {
                if (!cur.empty()) needles_.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) needles_.push_back(cur);
        if (needles_.empty()) throw config_error("mock rule 'contains:' lists no items");
    } else {
        throw config_error("unknown mock rule: " + rule);
    }
}

std::vector<std::string> RuleBackend::extract_items(const std::string& prompt) {
    static const std::string marker = "log sequence: [";
    const auto start = prompt.rfind(marker);
    if (start == std::string::npos) return {};
    const auto open = start + marker.size();
    const auto close = prompt.find(']', open);
    if (close == std::string::npos) return {};

    std::vector<std::string> items;
    std::string body = prompt.substr(open, close - open);
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto comma = body.find(", ", pos);
        if (comma == std::string::npos) {
            if (pos < body.size()) items.push_back(body.substr(pos));
            break;
        }
        items.push_back(body.substr(pos, comma - pos));
        pos = comma + 2;
    }
    return items;
}

ChatResponse RuleBackend::complete(const ChatRequest& request) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    ChatResponse out;
    out.ok = true;
    if (kind_ == Kind::Always) {
        out.content = label_name(always_);
        return out;
    }
    const std::vector<std::string> items = extract_items(request.prompt);
    for (const std::string& item : items) {
        for (const std::string& needle : needles_) {
            if (item == needle) {
                out.content = "anomalous";
                return out;
            }
        }
    }
    out.content = "normal";
    return out;
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& cfg) {
    if (cfg.kind == "http") return std::make_unique<HttpBackend>(cfg.http);
    if (cfg.kind == "mock") return std::make_unique<RuleBackend>(cfg.rule);
    if (cfg.kind == "script") {
        std::ifstream in(cfg.script_path);
        if (!in) throw input_error("cannot open backend script: " + cfg.script_path);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
        return std::make_unique<ScriptedBackend>(std::move(lines));
    }
    throw config_error("unknown backend kind: " + cfg.kind);
}

std::vector<FinetuneRecord> export_finetune_dataset(
    const std::vector<LabeledSequence>& data, const TemplateStore& store,
    const KnowledgeBase& kb, const PromptOptions& options) {
    std::vector<FinetuneRecord> records;
    records.reserve(data.size());
    for (const LabeledSequence& ls : data) {
        FinetuneRecord r;
        r.prompt = build_prompt(ls.sequence, store, kb, options).render();
        r.completion = label_name(ls.label);
        records.push_back(std::move(r));
    }
    return records;
}

void write_finetune_jsonl(const std::vector<FinetuneRecord>& records,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    for (const FinetuneRecord& r : records) {
        nlohmann::json j = {{"prompt", r.prompt}, {"completion", r.completion}};
        out << j.dump() << '\n';
    }
}

}  // namespace logens
