// SPDX-License-Identifier: Apache-2.0
#include "llrecall/persist.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include "llrecall/error.hpp"

namespace llrecall {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "llrecall-index";

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

json config_to_json(const ClassifierConfig& c) {
    json j = {{"id", c.id()}, {"model", to_string(c.model)}, {"pipeline", c.pipeline.name()}};
    if (c.weight) j["weight"] = to_string(*c.weight);
    if (c.similarity) j["similarity"] = to_string(*c.similarity);
    if (c.topics) j["topics"] = *c.topics;
    if (c.lda) {
        const auto& p = *c.lda;
        j["lda"] = {{"alpha", p.alpha ? json(*p.alpha) : json(nullptr)},
                    {"beta", p.beta},
                    {"max_iterations", p.max_iterations},
                    {"convergence_window", p.convergence_window},
                    {"convergence_tol", p.convergence_tol},
                    {"seed", p.seed}};
    }
    return j;
}

ClassifierConfig config_from_json(const json& j) {
    ClassifierConfig c;
    c.model = parse_model_kind(j.at("model").get<std::string>());
    c.pipeline = PipelineConfig::parse(j.at("pipeline").get<std::string>());
    if (j.contains("weight")) c.weight = parse_weight_scheme(j["weight"].get<std::string>());
    if (j.contains("similarity")) c.similarity = parse_similarity(j["similarity"].get<std::string>());
    if (j.contains("topics")) c.topics = j["topics"].get<std::size_t>();
    if (j.contains("lda")) {
        const auto& l = j["lda"];
        LdaParams p;
        if (!l.at("alpha").is_null()) p.alpha = l["alpha"].get<double>();
        p.beta = l.at("beta").get<double>();
        p.max_iterations = l.at("max_iterations").get<std::size_t>();
        p.convergence_window = l.at("convergence_window").get<std::size_t>();
        p.convergence_tol = l.at("convergence_tol").get<double>();
        p.seed = l.at("seed").get<std::uint64_t>();
        c.lda = p;
    }
    c.validate();
    if (c.id() != j.at("id").get<std::string>()) throw FormatError("persisted config id does not match its fields");
    return c;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != flat.size())
        throw FormatError("matrix block has inconsistent dimensions");
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[i++];
    return m;
}

json stoplist_to_json(const Stoplist& s) {
    return std::vector<std::string>(s.words().begin(), s.words().end());
}

Stoplist stoplist_from_json(const json& j) {
    const auto words = j.get<std::vector<std::string>>();
    return Stoplist::from_words(std::set<std::string>(words.begin(), words.end()));
}

json vsm_to_json(const VsmIndex& idx) {
    json triplets = json::array();
    for (const auto& t : idx.matrix().triplets()) triplets.push_back({t.term, t.doc, t.value});
    return {{"doc_ids", idx.doc_ids()},
            {"doc_texts", idx.doc_texts()},
            {"pipeline", idx.pipeline().name()},
            {"stoplist", stoplist_to_json(idx.stoplist())},
            {"terms", idx.vocabulary().terms()},
            {"df", idx.vocabulary().document_frequencies()},
            {"scheme", to_string(idx.scheme())},
            {"similarity", to_string(idx.similarity_kind())},
            {"triplets", triplets}};
}

VsmIndex vsm_from_json(const json& j) {
    VsmIndex::Parts p;
    p.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    p.doc_texts = j.at("doc_texts").get<std::vector<std::string>>();
    p.pipeline = PipelineConfig::parse(j.at("pipeline").get<std::string>());
    p.stoplist = stoplist_from_json(j.at("stoplist"));
    p.vocabulary = Vocabulary::from_parts(j.at("terms").get<std::vector<std::string>>(),
                                          j.at("df").get<std::vector<std::size_t>>(), p.doc_ids.size());
    p.similarity = parse_similarity(j.at("similarity").get<std::string>());
    std::vector<SparseVector> columns(p.doc_ids.size());
    for (const auto& t : j.at("triplets")) {
        const auto term = t.at(0).get<std::uint32_t>();
        const auto doc = t.at(1).get<std::size_t>();
        if (doc >= columns.size()) throw FormatError("triplet document index out of range");
        columns[doc].entries.emplace_back(term, t.at(2).get<double>());
    }
    for (const auto& c : columns) {
        for (std::size_t i = 1; i < c.entries.size(); ++i) {
            if (c.entries[i - 1].first >= c.entries[i].first) throw FormatError("triplets are not in term order");
        }
    }
    p.matrix = TermDocMatrix(p.vocabulary.size(), parse_weight_scheme(j.at("scheme").get<std::string>()),
                             std::move(columns));
    return VsmIndex::from_parts(std::move(p));
}

json payload_for(const Classifier& classifier) {
    json j = {{"config", config_to_json(classifier.config())}};
    const auto& model = classifier.model();
    if (const auto* vsm = std::get_if<std::shared_ptr<const VsmIndex>>(&model)) {
        j["vsm"] = vsm_to_json(**vsm);
    } else if (const auto* lsi = std::get_if<std::shared_ptr<const LsiSpace>>(&model)) {
        const auto& s = **lsi;
        j["vsm"] = vsm_to_json(s.index());
        j["lsi"] = {{"requested_k", s.svd().requested_k},
                    {"numerical_rank", s.svd().numerical_rank},
                    {"T", matrix_to_json(s.svd().term_topic)},
                    {"S", std::vector<double>(s.svd().singular_values.begin(), s.svd().singular_values.end())},
                    {"D", matrix_to_json(s.svd().topic_doc)}};
    } else {
        const auto& m = *std::get<std::shared_ptr<const LdaModel>>(model);
        j["lda"] = {{"doc_ids", m.doc_ids()},
                    {"doc_texts", m.doc_texts()},
                    {"stoplist", stoplist_to_json(m.stoplist())},
                    {"terms", m.terms()},
                    {"phi", matrix_to_json(m.phi())},
                    {"theta", matrix_to_json(m.theta())},
                    {"log_likelihood", m.log_likelihood_trace()},
                    {"assignments", m.assignments()}};
    }
    return j;
}

Classifier classifier_from_payload(const json& j) {
    ClassifierConfig config = config_from_json(j.at("config"));
    switch (config.model) {
        case ModelKind::vsm:
            return Classifier(config, std::make_shared<const VsmIndex>(vsm_from_json(j.at("vsm"))));
        case ModelKind::lsi: {
            auto index = std::make_shared<const VsmIndex>(vsm_from_json(j.at("vsm")));
            const auto& l = j.at("lsi");
            TruncatedSvd svd;
            svd.requested_k = l.at("requested_k").get<std::size_t>();
            svd.numerical_rank = l.at("numerical_rank").get<std::size_t>();
            svd.term_topic = matrix_from_json(l.at("T"));
            const auto s = l.at("S").get<std::vector<double>>();
            svd.singular_values = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
            svd.topic_doc = matrix_from_json(l.at("D"));
            return Classifier(config, std::make_shared<const LsiSpace>(LsiSpace::from_parts(index, std::move(svd))));
        }
        case ModelKind::lda: {
            const auto& l = j.at("lda");
            LdaModel::Parts p;
            p.doc_ids = l.at("doc_ids").get<std::vector<std::string>>();
            p.doc_texts = l.at("doc_texts").get<std::vector<std::string>>();
            p.stoplist = stoplist_from_json(l.at("stoplist"));
            p.terms = l.at("terms").get<std::vector<std::string>>();
            p.config = config.lda_config();
            p.phi = matrix_from_json(l.at("phi"));
            p.theta = matrix_from_json(l.at("theta"));
            p.log_likelihood_trace = l.at("log_likelihood").get<std::vector<double>>();
            p.assignments = l.at("assignments").get<std::vector<std::vector<std::uint32_t>>>();
            return Classifier(config, std::make_shared<const LdaModel>(LdaModel::from_parts(std::move(p))));
        }
    }
    throw FormatError("unknown model kind in index file");
}

}  // namespace

std::string config_to_json_text(const ClassifierConfig& config) {
    return config_to_json(config).dump();
}

ClassifierConfig config_from_json_text(std::string_view text) {
    try {
        return config_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("malformed classifier config ({})", e.what()));
    }
}

std::string serialize_classifier(const Classifier& classifier) {
    const std::string payload = payload_for(classifier).dump();
    return fmt::format("{} {}\n{} {:08x}\n{}", kMagic, kIndexFormatVersion, payload.size(), crc32_of(payload),
                       payload);
}

Classifier deserialize_classifier(std::string_view bytes) {
    auto next_line = [&](std::string_view& rest) -> std::string_view {
        const auto nl = rest.find('\n');
        if (nl == std::string_view::npos) throw FormatError("index file is truncated (incomplete header)");
        const auto line = rest.substr(0, nl);
        rest.remove_prefix(nl + 1);
        return line;
    };
    std::string_view rest = bytes;
    const auto magic_line = next_line(rest);
    if (magic_line.substr(0, kMagic.size()) != kMagic || magic_line.size() <= kMagic.size() + 1 ||
        magic_line[kMagic.size()] != ' ')
        throw FormatError("not an llrecall index file");
    int version = 0;
    const auto vtext = magic_line.substr(kMagic.size() + 1);
    if (std::from_chars(vtext.data(), vtext.data() + vtext.size(), version).ec != std::errc{})
        throw FormatError("index file has an unreadable format version");
    if (version != kIndexFormatVersion)
        throw FormatError(fmt::format("index format version {} is not supported (this build reads version {})",
                                      version, kIndexFormatVersion));

    const auto size_line = next_line(rest);
    std::size_t length = 0;
    std::uint32_t crc = 0;
    {
        const auto space = size_line.find(' ');
        if (space == std::string_view::npos) throw FormatError("index file has a malformed checksum line");
        const auto ltext = size_line.substr(0, space);
        const auto ctext = size_line.substr(space + 1);
        if (std::from_chars(ltext.data(), ltext.data() + ltext.size(), length).ec != std::errc{} ||
            std::from_chars(ctext.data(), ctext.data() + ctext.size(), crc, 16).ec != std::errc{})
            throw FormatError("index file has a malformed checksum line");
    }
    if (rest.size() != length)
        throw FormatError(fmt::format("index payload is {} bytes, header says {} (truncated or corrupt; checksum "
                                      "cannot match)",
                                      rest.size(), length));
    if (crc32_of(rest) != crc) throw FormatError("index payload checksum mismatch");

    try {
        return classifier_from_payload(json::parse(rest));
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("index payload is malformed ({})", e.what()));
    }
}

void persist_index(const Classifier& classifier, const std::filesystem::path& path) {
    const std::string bytes = serialize_classifier(classifier);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write index '{}'", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("failed writing index '{}'", path.string()));
}

Classifier load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open index '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_classifier(buf.str());
}

}  // namespace llrecall
