#pragma once

// Canonical file formats. Sequences travel as one record per line,
// `label<TAB>id id id ...` with label in {0,1}; parsed message streams as
// `session<TAB>template_id` ('-' for no session). Detection output is
// `final<TAB>source<TAB>model=vote,...`.

#include <string>
#include <utility>
#include <vector>

#include "logens/core.hpp"
#include "logens/ensemble.hpp"

namespace logens {

std::vector<LabeledSequence> read_sequence_file(const std::string& path);
void write_sequence_file(const std::vector<LabeledSequence>& data, const std::string& path);

struct ParsedRecord {
    std::string session;  // "-" when absent
    TemplateId id = 0;
};

std::vector<ParsedRecord> read_parsed_stream(const std::string& path);
void write_parsed_stream(const std::vector<ParsedRecord>& records, const std::string& path);

std::vector<TemplateId> read_safe_template_ids(const std::string& path);

void write_detection_output(const std::vector<VoteRecord>& records, const std::string& path);
std::vector<Label> read_prediction_labels(const std::string& path);

std::vector<std::string> read_word_pool(const std::string& path);

}  // namespace logens
