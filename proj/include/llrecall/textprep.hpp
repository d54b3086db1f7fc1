// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace llrecall {

/// Which of the two preprocessing steps run. The four combinations form the
/// preprocessing axis of the experiment grid.
struct PipelineConfig {
    bool stop = false;
    bool stem = false;

    /// Short stable name: none, stem, stop, stopstem.
    std::string_view name() const;
    /// Human label: none, stemming, stopping, stemming+stopping.
    std::string_view label() const;

    /// Accepts either the short name or the human label.
    static PipelineConfig parse(std::string_view text);
    /// none, stemming, stopping, stemming+stopping (in that order).
    static std::array<PipelineConfig, 4> all();

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

using TokenList = std::vector<std::string>;

/// A set of lowercase stop words. Always contains at least "the" and "an".
class Stoplist {
public:
    /// The bundled list (data/stopwords.txt).
    static const Stoplist& default_list();
    /// One word per line; blank lines ignored. Throws IoError / ValidationError.
    static Stoplist from_file(const std::filesystem::path& path);
    static Stoplist from_text(std::string_view text);
    static Stoplist from_words(std::set<std::string> words);

    bool contains(std::string_view word) const;
    const std::set<std::string, std::less<>>& words() const { return words_; }
    std::size_t size() const { return words_.size(); }

    friend bool operator==(const Stoplist&, const Stoplist&) = default;

private:
    std::set<std::string, std::less<>> words_;
};

/// Lowercased maximal runs of ASCII letters and digits; every other byte is a
/// delimiter.
TokenList tokenize(std::string_view text);

TokenList remove_stopwords(TokenList tokens, const Stoplist& stoplist);

/// Porter (1980) suffix stripping, following the author's reference C
/// implementation. Tokens containing anything but a-z are returned unchanged.
std::string porter_stem(std::string_view token);

/// tokenize -> remove_stopwords (if stop) -> porter_stem (if stem).
TokenList preprocess(std::string_view text, PipelineConfig config, const Stoplist& stoplist);

}  // namespace llrecall
