#pragma once

// Five-part prompt construction for the LLM base model: description,
// instruction, optional retrieved context, the input line and the output
// cue. Rendering is deterministic for identical inputs.

#include <optional>
#include <string>

#include "logens/core.hpp"
#include "logens/knowledge_base.hpp"
#include "logens/parser.hpp"

namespace logens {

struct Prompt {
    std::string description;
    std::string instruction;
    std::optional<std::string> relevant_info;
    std::string input_line;  // log sequence: [item, item, ...]
    std::string output_cue;  // ends with "label:"

    std::string render() const;
};

struct PromptOptions {
    bool rag_enabled = true;
    bool render_ids = false;  // render raw template ids instead of template text
};

// Description lines for each distinct template of the sequence (first-
// occurrence order) whose rendered text is a knowledge-base key; absent
// when nothing matches.
std::optional<std::string> retrieve_context(const LogSequence& seq,
                                            const TemplateStore& store,
                                            const KnowledgeBase& kb);

Prompt build_prompt(const LogSequence& seq, const TemplateStore& store,
                    const KnowledgeBase& kb, const PromptOptions& options);

}  // namespace logens
