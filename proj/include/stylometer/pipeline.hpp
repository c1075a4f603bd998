#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylometer/checkpoint.hpp"
#include "stylometer/common.hpp"
#include "stylometer/corpus.hpp"
#include "stylometer/features.hpp"
#include "stylometer/mds.hpp"
#include "stylometer/nn.hpp"
#include "stylometer/synthetic.hpp"
#include "stylometer/viz.hpp"

namespace stylo {

enum class MdsMethod { Smacof, Classical };

struct ExperimentConfig {
    std::string manifest_path;
    std::string out_dir;
    std::size_t min_words = 1000;
    std::size_t min_works = 5;
    SplitRatios ratios{};
    std::uint64_t seed = 42;
    MdsMethod mds_method = MdsMethod::Smacof;
    MdsConfig mds{};
    nn::TrainConfig train_unigram{};
    nn::TrainConfig train_bigram{};

    /// Fill the derived per-stage seeds from the master seed when unset.
    void finalize() {
        if (mds.seed == 0) mds.seed = mix_seed(seed, fnv1a("mds"));
        if (train_unigram.seed == 0) train_unigram.seed = mix_seed(seed, fnv1a("unigram"));
        if (train_bigram.seed == 0) train_bigram.seed = mix_seed(seed, fnv1a("bigram"));
    }
};

struct ExperimentResult {
    std::size_t documents_loaded = 0;
    std::size_t documents_excluded = 0;
    std::size_t authors_total = 0;
    std::vector<std::string> class_authors;  // the 8 classification targets, sorted
    double unigram_train_accuracy = 0.0;
    double unigram_test_accuracy = 0.0;
    double bigram_train_accuracy = 0.0;
    double bigram_test_accuracy = 0.0;
    double chance_level = 0.0;
    std::string summary_json;
};

// ---------------------------------------------------------------------------
// Shared stages, also used directly by the CLI subcommands.
// ---------------------------------------------------------------------------

struct LoadedCorpus {
    std::vector<Document> docs;   // preprocessed survivors, manifest order
    std::size_t excluded = 0;
};

inline LoadedCorpus load_preprocessed_corpus(const std::string& manifest_path,
                                             std::size_t min_words,
                                             const TagLexicon& lexicon = builtin_german_lexicon()) {
    LoadedCorpus corpus;
    const Manifest manifest = load_manifest(manifest_path);
    for (const auto& entry : manifest.entries) {
        Document raw = load_document(manifest, entry, lexicon);
        if (auto kept = preprocess(raw, min_words)) {
            corpus.docs.push_back(std::move(*kept));
        } else {
            ++corpus.excluded;
        }
    }
    return corpus;
}

/// Everything the two classifiers need: the 8-way label set (the 8 most
/// frequent authors, names sorted for stable label indices) and the
/// stratified split of their documents.
struct ClassificationData {
    std::vector<std::string> class_authors;
    std::map<std::string, std::size_t> class_index;
    std::vector<Document> class_docs;          // docs by class authors, corpus order
    std::vector<std::size_t> row_of_class_doc; // row into the feature table per class doc
    SplitAssignment split;
    std::vector<std::size_t> train_rows, val_rows, test_rows;  // feature-table rows
};

inline ClassificationData prepare_classification(const std::vector<Document>& docs,
                                                 SplitRatios ratios, std::uint64_t seed) {
    std::map<std::string, std::size_t> counts;
    for (const auto& d : docs) ++counts[d.author];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() < 8)
        throw StyloError("classification needs at least 8 authors, corpus has " +
                         std::to_string(ranked.size()));

    ClassificationData cls;
    for (std::size_t i = 0; i < 8; ++i) cls.class_authors.push_back(ranked[i].first);
    std::sort(cls.class_authors.begin(), cls.class_authors.end());
    for (std::size_t i = 0; i < cls.class_authors.size(); ++i)
        cls.class_index[cls.class_authors[i]] = i;

    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (cls.class_index.count(docs[i].author)) {
            cls.class_docs.push_back(docs[i]);
            cls.row_of_class_doc.push_back(i);
        }
    }
    cls.split = split_dataset(cls.class_docs, ratios, seed);
    for (std::size_t k = 0; k < cls.class_docs.size(); ++k) {
        const std::size_t row = cls.row_of_class_doc[k];
        if (cls.split.train.count(k)) cls.train_rows.push_back(row);
        else if (cls.split.validation.count(k)) cls.val_rows.push_back(row);
        else cls.test_rows.push_back(row);
    }
    return cls;
}

inline nn::Dataset make_dataset(const FeatureTable& table, const std::vector<std::size_t>& rows,
                                const std::map<std::string, std::size_t>& class_index,
                                bool bigram_input) {
    nn::Dataset ds;
    const std::size_t n = rows.size();
    if (bigram_input) {
        ds.inputs = nn::Tensor({n, 1, static_cast<std::size_t>(kTagCount),
                                static_cast<std::size_t>(kTagCount)});
    } else {
        ds.inputs = nn::Tensor({n, static_cast<std::size_t>(kTagCount)});
    }
    ds.labels = nn::Tensor({n, class_index.size()});
    for (std::size_t k = 0; k < n; ++k) {
        const FeatureRow& row = table.rows[rows[k]];
        if (bigram_input) {
            std::copy(row.bigram.values.begin(), row.bigram.values.end(),
                      ds.inputs.data.begin() + static_cast<std::ptrdiff_t>(k * kTagCount * kTagCount));
        } else {
            std::copy(row.unigram.values.begin(), row.unigram.values.end(),
                      ds.inputs.data.begin() + static_cast<std::ptrdiff_t>(k * kTagCount));
        }
        ds.labels.data[k * class_index.size() + class_index.at(row.author)] = 1.0;
    }
    return ds;
}

namespace pipeline_detail {

template <typename F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

inline std::string slugify(const std::string& s) {
    std::string out;
    for (char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out += c;
        else if (c >= 'A' && c <= 'Z') out += static_cast<char>(c - 'A' + 'a');
        else out += '_';
    }
    return out;
}

inline double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

inline Embedding2D run_mds(const std::vector<std::vector<double>>& vectors, MdsMethod method,
                           const MdsConfig& cfg) {
    const DistanceMatrix D = pairwise_distances(vectors);
    return method == MdsMethod::Classical ? classical_mds(D) : smacof(D, cfg);
}

inline std::vector<LabeledPoint> to_points(const Embedding2D& emb,
                                           const std::vector<std::string>& labels) {
    std::vector<LabeledPoint> points(emb.coords.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i] = {emb.coords[i][0], emb.coords[i][1], labels[i]};
    return points;
}

inline nlohmann::json train_report_json(const nn::TrainReport& report) {
    nlohmann::json j;
    j["chance_level"] = report.chance_level;
    j["best_epoch"] = report.best_epoch;
    j["epochs_run"] = report.epochs.size();
    if (!std::isnan(report.final_test_accuracy))
        j["final_test_accuracy"] = round4(report.final_test_accuracy);
    j["config"] = {{"learning_rate", report.config.learning_rate},
                   {"beta1", report.config.beta1},
                   {"beta2", report.config.beta2},
                   {"eps", report.config.eps},
                   {"batch_size", report.config.batch_size},
                   {"max_epochs", report.config.max_epochs},
                   {"patience", report.config.patience},
                   {"seed", report.config.seed}};
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : report.epochs) {
        epochs.push_back({{"train_loss", round4(e.train_loss)},
                          {"train_accuracy", round4(e.train_accuracy)},
                          {"val_loss", round4(e.val_loss)},
                          {"val_accuracy", round4(e.val_accuracy)}});
    }
    j["epochs"] = epochs;
    return j;
}

}  // namespace pipeline_detail

/// MDS figures for one feature side: full-corpus scatter, the
/// frequent-author view as a filtered copy of the very same coordinates
/// (never a re-fit), and cluster circles over the frequent subset.
inline Embedding2D emit_mds_figures(const FeatureTable& table, bool bigram_side,
                                    const std::set<std::string>& frequent_authors,
                                    MdsMethod method, const MdsConfig& mds_cfg,
                                    const std::string& out_dir) {
    namespace pd = pipeline_detail;
    namespace fs = std::filesystem;
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> doc_ids, authors;
    for (const auto& row : table.rows) {
        if (bigram_side)
            vectors.emplace_back(row.bigram.values.begin(), row.bigram.values.end());
        else
            vectors.emplace_back(row.unigram.values.begin(), row.unigram.values.end());
        doc_ids.push_back(row.doc_id);
        authors.push_back(row.author);
    }
    const Embedding2D emb = pd::run_mds(vectors, method, mds_cfg);

    const std::string base = bigram_side ? "mds_bigram" : "mds_unigram";
    const auto out_path = [&](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };
    write_file(out_path(base + ".csv"), embedding_to_csv(emb, doc_ids, authors));
    const auto all_points = pd::to_points(emb, authors);
    write_file(out_path(base + ".svg"), scatter_svg(all_points));

    std::vector<LabeledPoint> filtered;
    std::vector<std::string> filtered_labels;
    Embedding2D filtered_emb;
    for (std::size_t i = 0; i < authors.size(); ++i) {
        if (!frequent_authors.count(authors[i])) continue;
        filtered.push_back(all_points[i]);
        filtered_labels.push_back(authors[i]);
        filtered_emb.coords.push_back(emb.coords[i]);
    }
    if (!filtered.empty()) {
        const DataBounds shared = viz_detail::bounds_of_points(all_points);
        write_file(out_path(base + "_frequent.svg"), scatter_svg(filtered, {}, shared));
        const ClusterSummary summary = cluster_summary(filtered_emb, filtered_labels);
        const std::string side = bigram_side ? "bigram" : "unigram";
        write_file(out_path("clusters_" + side + ".csv"), cluster_summary_to_csv(summary));
        write_file(out_path("clusters_" + side + ".svg"), cluster_circles_svg(summary, {}, shared));
    }
    return emb;
}

struct ModelOutcome {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    nn::TrainReport report;
};

/// Train one of the two classifiers, write its checkpoint, training report
/// and softmax-embedding figures, and return the accuracies.
inline ModelOutcome train_one_model(const FeatureTable& table, const ClassificationData& cls,
                                    bool bigram_input, const nn::TrainConfig& tc,
                                    MdsMethod method, const MdsConfig& mds_cfg,
                                    const std::string& out_dir) {
    namespace pd = pipeline_detail;
    namespace fs = std::filesystem;
    const std::string name = bigram_input ? "bigram" : "unigram";
    const auto out_path = [&](const std::string& n) { return (fs::path(out_dir) / n).string(); };

    const nn::Dataset train_set = make_dataset(table, cls.train_rows, cls.class_index, bigram_input);
    const nn::Dataset val_set = make_dataset(table, cls.val_rows, cls.class_index, bigram_input);
    const nn::Dataset test_set = make_dataset(table, cls.test_rows, cls.class_index, bigram_input);

    const auto specs = bigram_input ? nn::build_bigram_cnn() : nn::build_unigram_net();
    auto [state, report] = nn::train(specs, train_set, val_set, tc);

    ModelOutcome outcome;
    outcome.test_accuracy = nn::evaluate(state, test_set).first;
    outcome.train_accuracy = nn::evaluate(state, train_set).first;
    report.final_test_accuracy = outcome.test_accuracy;
    outcome.report = report;

    nn::save_checkpoint(state, out_path(name + ".ckpt"));
    write_file(out_path("train_" + name + ".json"), pd::train_report_json(report).dump(2) + "\n");

    // Softmax-output embeddings of train and test sets (Figs 5-6 analog).
    const auto emit_embed = [&](const nn::Dataset& ds, const std::vector<std::size_t>& rows,
                                const std::string& subset) {
        if (ds.size() < 3) return;
        const auto probs = nn::embed(state, ds.inputs);
        const Embedding2D emb = pd::run_mds(probs, method, mds_cfg);
        std::vector<std::string> labels;
        for (std::size_t r : rows) labels.push_back(table.rows[r].author);
        write_file(out_path("embed_" + name + "_" + subset + ".svg"),
                   scatter_svg(pd::to_points(emb, labels)));
    };
    emit_embed(train_set, cls.train_rows, "train");
    emit_embed(test_set, cls.test_rows, "test");
    return outcome;
}

// ---------------------------------------------------------------------------

/// Run the full experiment: corpus -> features -> MDS figures -> both
/// classifiers -> report directory with CSVs, SVGs, checkpoints and a
/// versioned JSON summary. Deterministic: identical config and corpus give
/// byte-identical outputs.
inline ExperimentResult run_experiment(ExperimentConfig config) {
    namespace fs = std::filesystem;
    namespace pd = pipeline_detail;
    config.finalize();
    fs::create_directories(config.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (fs::path(config.out_dir) / name).string();
    };

    ExperimentResult result;

    LoadedCorpus corpus = pd::stage("corpus", [&] {
        LoadedCorpus c = load_preprocessed_corpus(config.manifest_path, config.min_words);
        if (c.docs.empty()) throw EmptyCorpus("no documents survived preprocessing");
        return c;
    });
    const std::vector<Document>& docs = corpus.docs;
    result.documents_loaded = docs.size() + corpus.excluded;
    result.documents_excluded = corpus.excluded;

    const FeatureTable table = pd::stage("features", [&] { return build_feature_table(docs); });
    write_file(out_path("features.csv"), feature_table_to_csv(table));
    {
        std::set<std::string> uniq;
        for (const auto& d : docs) uniq.insert(d.author);
        result.authors_total = uniq.size();
    }

    // Feature histograms for two works each of the first three authors in
    // manifest order (Fig 1 analog).
    pd::stage("histograms", [&] {
        std::vector<std::string> tag_names(kTagNames.begin(), kTagNames.end());
        std::map<std::string, int> emitted;
        for (const auto& row : table.rows) {
            if (emitted.find(row.author) == emitted.end()) {
                if (emitted.size() == 3) continue;
                emitted[row.author] = 0;
            }
            if (emitted[row.author] >= 2) continue;
            ++emitted[row.author];
            const std::string slug = pd::slugify(row.doc_id);
            std::vector<double> uni(row.unigram.values.begin(), row.unigram.values.end());
            std::vector<double> big(row.bigram.values.begin(), row.bigram.values.end());
            write_file(out_path("hist_unigram_" + slug + ".svg"), histogram_svg(uni, tag_names));
            write_file(out_path("hist_bigram_" + slug + ".svg"), histogram_svg(big, {}));
        }
        return 0;
    });

    const std::set<std::string> frequent = select_frequent_authors(docs, config.min_works);

    const Embedding2D mds_uni = pd::stage("mds", [&] {
        return emit_mds_figures(table, false, frequent, config.mds_method, config.mds,
                                config.out_dir);
    });
    const Embedding2D mds_big = pd::stage("mds", [&] {
        return emit_mds_figures(table, true, frequent, config.mds_method, config.mds,
                                config.out_dir);
    });

    const ClassificationData cls = pd::stage("split", [&] {
        return prepare_classification(docs, config.ratios, config.seed);
    });
    result.class_authors = cls.class_authors;
    result.chance_level = 1.0 / static_cast<double>(cls.class_authors.size());
    write_file(out_path("split.csv"), split_to_csv(cls.split, cls.class_docs));

    const ModelOutcome uni = pd::stage("train-unigram", [&] {
        return train_one_model(table, cls, false, config.train_unigram, config.mds_method,
                               config.mds, config.out_dir);
    });
    const ModelOutcome big = pd::stage("train-bigram", [&] {
        return train_one_model(table, cls, true, config.train_bigram, config.mds_method,
                               config.mds, config.out_dir);
    });
    result.unigram_train_accuracy = uni.train_accuracy;
    result.unigram_test_accuracy = uni.test_accuracy;
    result.bigram_train_accuracy = big.train_accuracy;
    result.bigram_test_accuracy = big.test_accuracy;

    nlohmann::json summary;
    summary["schema_version"] = 1;
    summary["seed"] = config.seed;
    summary["counts"] = {{"documents_loaded", result.documents_loaded},
                         {"documents_excluded", corpus.excluded},
                         {"documents_kept", docs.size()},
                         {"authors", result.authors_total},
                         {"frequent_authors", frequent.size()},
                         {"train", cls.train_rows.size()},
                         {"validation", cls.val_rows.size()},
                         {"test", cls.test_rows.size()}};
    summary["class_authors"] = cls.class_authors;
    summary["chance_level"] = result.chance_level;
    summary["mds"] = {{"method", config.mds_method == MdsMethod::Classical ? "classical" : "smacof"},
                      {"unigram_stress", pd::round4(mds_uni.stress)},
                      {"bigram_stress", pd::round4(mds_big.stress)}};
    summary["unigram"] = {{"train_accuracy", pd::round4(uni.train_accuracy)},
                          {"test_accuracy", pd::round4(uni.test_accuracy)}};
    summary["bigram"] = {{"train_accuracy", pd::round4(big.train_accuracy)},
                         {"test_accuracy", pd::round4(big.test_accuracy)}};

    result.summary_json = summary.dump(2) + "\n";
    write_file(out_path("summary.json"), result.summary_json);
    return result;
}

// ---------------------------------------------------------------------------
// Config file support (JSON). Per the CLI contract, values present in the
// config file override command-line flags.
// ---------------------------------------------------------------------------

inline void apply_config_json(ExperimentConfig& config, const nlohmann::json& j) {
    if (j.contains("manifest")) config.manifest_path = j.at("manifest").get<std::string>();
    if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("min_words")) config.min_words = j.at("min_words").get<std::size_t>();
    if (j.contains("min_works")) config.min_works = j.at("min_works").get<std::size_t>();
    if (j.contains("ratios")) {
        const auto r = j.at("ratios");
        if (!r.is_array() || r.size() != 3) throw StyloError("config: ratios must be [train,val,test]");
        config.ratios = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
    }
    if (j.contains("mds")) {
        const auto& m = j.at("mds");
        if (m.contains("method")) {
            const std::string method = m.at("method").get<std::string>();
            if (method == "classical") config.mds_method = MdsMethod::Classical;
            else if (method == "smacof") config.mds_method = MdsMethod::Smacof;
            else throw StyloError("config: unknown mds method " + method);
        }
        if (m.contains("max_iter")) config.mds.max_iter = m.at("max_iter").get<int>();
        if (m.contains("eps")) config.mds.eps = m.at("eps").get<double>();
        if (m.contains("n_init")) config.mds.n_init = m.at("n_init").get<int>();
        if (m.contains("seed")) config.mds.seed = m.at("seed").get<std::uint64_t>();
        if (m.contains("stress_floor")) config.mds.stress_floor = m.at("stress_floor").get<double>();
    }
    const auto apply_train = [](nn::TrainConfig& tc, const nlohmann::json& t) {
        if (t.contains("learning_rate")) tc.learning_rate = t.at("learning_rate").get<double>();
        if (t.contains("batch_size")) tc.batch_size = t.at("batch_size").get<std::size_t>();
        if (t.contains("max_epochs")) tc.max_epochs = t.at("max_epochs").get<int>();
        if (t.contains("patience")) tc.patience = t.at("patience").get<int>();
        if (t.contains("seed")) tc.seed = t.at("seed").get<std::uint64_t>();
    };
    if (j.contains("train")) {
        const auto& t = j.at("train");
        if (t.contains("unigram")) apply_train(config.train_unigram, t.at("unigram"));
        if (t.contains("bigram")) apply_train(config.train_bigram, t.at("bigram"));
    }
}

inline void apply_config_file(ExperimentConfig& config, const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw StyloError("config file " + path + ": " + e.what());
    }
    apply_config_json(config, j);
}

}  // namespace stylo
