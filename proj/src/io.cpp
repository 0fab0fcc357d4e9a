#include "logens/io.hpp"

#include <fstream>
#include <sstream>

namespace logens {

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    return out;
}

}  // namespace

std::vector<LabeledSequence> read_sequence_file(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<LabeledSequence> data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected label<TAB>ids");
        LabeledSequence ls;
        ls.label = label_from_int(std::stoi(line.substr(0, tab)));
        std::istringstream rest(line.substr(tab + 1));
        TemplateId id;
        while (rest >> id) {
            if (id < 0)
                throw input_error(path + ":" + std::to_string(lineno) + ": negative id");
            ls.sequence.template_ids.push_back(id);
        }
        if (ls.sequence.template_ids.empty())
            throw input_error(path + ":" + std::to_string(lineno) + ": empty sequence");
        data.push_back(std::move(ls));
    }
    return data;
}

void write_sequence_file(const std::vector<LabeledSequence>& data, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const LabeledSequence& ls : data) {
        out << label_to_int(ls.label) << '\t';
        const auto& ids = ls.sequence.template_ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) out << ' ';
            out << ids[i];
        }
        out << '\n';
    }
}

std::vector<ParsedRecord> read_parsed_stream(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<ParsedRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) +
                              ": expected session<TAB>template_id");
        ParsedRecord r;
        r.session = line.substr(0, tab);
        r.id = std::stoi(line.substr(tab + 1));
        records.push_back(std::move(r));
    }
    return records;
}

void write_parsed_stream(const std::vector<ParsedRecord>& records, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const ParsedRecord& r : records)
        out << (r.session.empty() ? "-" : r.session) << '\t' << r.id << '\n';
}

std::vector<TemplateId> read_safe_template_ids(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<TemplateId> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ids.push_back(std::stoi(line));
    }
    return ids;
}

void write_detection_output(const std::vector<VoteRecord>& records, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const VoteRecord& r : records) {
        out << label_to_int(r.final) << '\t'
            << (r.source == VoteSource::CacheHit ? "cache_hit" : "computed") << '\t';
        if (r.per_model.empty()) {
            out << '-';
        } else {
            bool first = true;
            for (const auto& [name, vote] : r.per_model) {
                if (!first) out << ',';
                out << name << '=' << label_to_int(vote);
                first = false;
            }
        }
        out << '\n';
    }
}

std::vector<Label> read_prediction_labels(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<Label> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        const std::string head = tab == std::string::npos ? line : line.substr(0, tab);
        labels.push_back(label_from_int(std::stoi(head)));
    }
    return labels;
}

std::vector<std::string> read_word_pool(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::string> words;
    std::string word;
    while (in >> word) words.push_back(word);
    if (words.empty()) throw input_error("word pool is empty: " + path);
    return words;
}

}  // namespace logens
