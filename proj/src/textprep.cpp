// SPDX-License-Identifier: Apache-2.0
#include "llrecall/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "llrecall/embedded_data.hpp"
#include "llrecall/error.hpp"

namespace llrecall {

std::string_view PipelineConfig::name() const {
    if (stop && stem) return "stopstem";
    if (stop) return "stop";
    if (stem) return "stem";
    return "none";
}

std::string_view PipelineConfig::label() const {
    if (stop && stem) return "stemming+stopping";
    if (stop) return "stopping";
    if (stem) return "stemming";
    return "none";
}

PipelineConfig PipelineConfig::parse(std::string_view text) {
    for (const auto& p : all()) {
        if (text == p.name() || text == p.label()) return p;
    }
    throw ConfigError(fmt::format("unknown preprocessing pipeline '{}'", text));
}

std::array<PipelineConfig, 4> PipelineConfig::all() {
    return {PipelineConfig{false, false}, PipelineConfig{false, true}, PipelineConfig{true, false},
            PipelineConfig{true, true}};
}

const Stoplist& Stoplist::default_list() {
    static const Stoplist list = from_text(embedded::stopwords_txt());
    return list;
}

Stoplist Stoplist::from_text(std::string_view text) {
    std::set<std::string> words;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        words.insert(line.substr(first, last - first + 1));
    }
    return from_words(std::move(words));
}

Stoplist Stoplist::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open stoplist '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

Stoplist Stoplist::from_words(std::set<std::string> words) {
    for (const auto& w : words) {
        if (w.empty() || std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isupper(c); }))
            throw ValidationError(fmt::format("stoplist word '{}' is empty or not lowercase", w));
    }
    if (!words.contains("the") || !words.contains("an"))
        throw ValidationError("stoplist must contain at least \"the\" and \"an\"");
    Stoplist s;
    s.words_.insert(words.begin(), words.end());
    return s;
}

bool Stoplist::contains(std::string_view word) const {
    return words_.find(word) != words_.end();
}

TokenList tokenize(std::string_view text) {
    TokenList out;
    std::string cur;
    for (unsigned char c : text) {
        if (c < 0x80 && std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

TokenList remove_stopwords(TokenList tokens, const Stoplist& stoplist) {
    std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
    return tokens;
}

TokenList preprocess(std::string_view text, PipelineConfig config, const Stoplist& stoplist) {
    TokenList tokens = tokenize(text);
    if (config.stop) tokens = remove_stopwords(std::move(tokens), stoplist);
    if (config.stem) {
        for (auto& t : tokens) t = porter_stem(t);
    }
    return tokens;
}

}  // namespace llrecall
