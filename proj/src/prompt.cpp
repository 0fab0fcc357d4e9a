#include "logens/prompt.hpp"

#include <set>

namespace logens {

namespace {

const char* const kDescription =
    "Below is a description of an anomaly detection task, followed by a task "
    "request. Generate an output that appropriately completes the request.";

const char* const kInstruction =
    "Decide whether the following log sequence is normal or anomalous. The log "
    "sequence is delimited by brackets and its items are separated by commas. "
    "Answer with a single label: normal or anomalous. No explanation is required.";

std::string render_item(const LogTemplate& t, bool render_ids) {
    return render_ids ? std::to_string(t.id) : t.rendered();
}

}  // namespace

std::string Prompt::render() const {
    std::string out = description;
    out += "\n\n";
    out += instruction;
    out += "\n\n";
    if (relevant_info) {
        out += *relevant_info;
        out += "\n\n";
    }
    out += input_line;
    out += "\n\n";
    out += output_cue;
    return out;
}

std::optional<std::string> retrieve_context(const LogSequence& seq,
                                            const TemplateStore& store,
                                            const KnowledgeBase& kb) {
    std::string info;
    std::set<TemplateId> seen;
    for (TemplateId id : seq.template_ids) {
        if (!seen.insert(id).second) continue;
        const std::string key = store.get(id).rendered();
        if (auto desc = kb.lookup(key)) {
            if (!info.empty()) info += '\n';
            info += key + ": " + *desc;
        }
    }
    if (info.empty()) return std::nullopt;
    return info;
}

Prompt build_prompt(const LogSequence& seq, const TemplateStore& store,
                    const KnowledgeBase& kb, const PromptOptions& options) {
    if (seq.template_ids.empty()) throw input_error("cannot build a prompt for an empty sequence");

    Prompt p;
    p.description = kDescription;
    p.instruction = kInstruction;
    if (options.rag_enabled) p.relevant_info = retrieve_context(seq, store, kb);

    std::string line = "log sequence: [";
    for (std::size_t i = 0; i < seq.template_ids.size(); ++i) {
        if (i) line += ", ";
        line += render_item(store.get(seq.template_ids[i]), options.render_ids);
    }
    line += ']';
    p.input_line = std::move(line);
    p.output_cue = "label:";
    return p;
}

}  // namespace logens
