// stylometer: corpus statistics, MDS projections and author classification
// over POS-tag n-gram features.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stylometer/stylometer.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string manifest;
    std::string out;
    std::string config_file;
    std::uint64_t seed = 42;
    std::size_t min_words = 1000;
    std::size_t min_works = 5;
    std::string mds_method = "smacof";
    std::string lexicon_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_manifest) {
    auto* m = cmd->add_option("--manifest", args.manifest, "Corpus manifest CSV");
    if (needs_manifest) m->required();
    cmd->add_option("--out", args.out, "Output directory")->required();
    cmd->add_option("--seed", args.seed, "Master random seed");
    cmd->add_option("--min-words", args.min_words, "Exclude documents with fewer words");
    cmd->add_option("--min-works", args.min_works, "Frequent-author document threshold");
    cmd->add_option("--mds", args.mds_method, "MDS variant: smacof or classical")
        ->check(CLI::IsMember({"smacof", "classical"}));
    cmd->add_option("--config", args.config_file,
                    "JSON config file; values in it override flags");
    cmd->add_option("--lexicon", args.lexicon_path, "Tag lexicon for raw-text entries");
}

stylo::ExperimentConfig to_config(const CommonArgs& args) {
    stylo::ExperimentConfig config;
    config.manifest_path = args.manifest;
    config.out_dir = args.out;
    config.seed = args.seed;
    config.min_words = args.min_words;
    config.min_works = args.min_works;
    config.mds_method =
        args.mds_method == "classical" ? stylo::MdsMethod::Classical : stylo::MdsMethod::Smacof;
    if (!args.config_file.empty()) stylo::apply_config_file(config, args.config_file);
    return config;
}

const stylo::TagLexicon& lexicon_for(const CommonArgs& args) {
    static stylo::TagLexicon loaded;
    if (!args.lexicon_path.empty()) {
        loaded = stylo::TagLexicon::load(args.lexicon_path);
        return loaded;
    }
    return stylo::builtin_german_lexicon();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"POS-tag stylometry: features, MDS projections, author classification"};
    app.require_subcommand(1);

    CommonArgs args;

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark corpus");
    std::size_t gen_docs = 12, gen_min_len = 2000, gen_max_len = 10000;
    generate->add_option("--out", args.out, "Corpus output directory")->required();
    generate->add_option("--seed", args.seed, "Generator seed");
    generate->add_option("--docs", gen_docs, "Documents per author");
    generate->add_option("--min-len", gen_min_len, "Minimum words per document");
    generate->add_option("--max-len", gen_max_len, "Maximum words per document");

    auto* features_cmd = app.add_subcommand("features", "Extract the feature table to CSV");
    CommonArgs feat_args;
    add_common(features_cmd, feat_args, true);

    auto* mds_cmd = app.add_subcommand("mds", "MDS projections and cluster figures");
    CommonArgs mds_args;
    add_common(mds_cmd, mds_args, true);

    auto* train_cmd = app.add_subcommand("train", "Train one classifier");
    CommonArgs train_args;
    std::string model = "unigram";
    add_common(train_cmd, train_args, true);
    train_cmd->add_option("--model", model, "Which model to train")
        ->check(CLI::IsMember({"unigram", "bigram"}));

    auto* report_cmd = app.add_subcommand("report", "Run the full experiment");
    CommonArgs report_args;
    add_common(report_cmd, report_args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            auto specs = stylo::benchmark_author_specs();
            for (auto& s : specs) {
                s.docs = gen_docs;
                s.min_len = gen_min_len;
                s.max_len = gen_max_len;
            }
            const auto manifest = stylo::generate_synthetic_corpus(specs, args.seed, args.out);
            std::cout << "wrote " << manifest.entries.size() << " documents under " << args.out
                      << "\n";
            return 0;
        }
        if (features_cmd->parsed()) {
            const auto config = to_config(feat_args);
            const auto corpus = stylo::load_preprocessed_corpus(config.manifest_path,
                                                                config.min_words,
                                                                lexicon_for(feat_args));
            const auto table = stylo::build_feature_table(corpus.docs);
            fs::create_directories(config.out_dir);
            const auto path = (fs::path(config.out_dir) / "features.csv").string();
            stylo::write_file(path, stylo::feature_table_to_csv(table));
            std::cout << "kept " << corpus.docs.size() << " documents (excluded "
                      << corpus.excluded << "), features in " << path << "\n";
            return 0;
        }
        if (mds_cmd->parsed()) {
            auto config = to_config(mds_args);
            config.finalize();
            const auto corpus = stylo::load_preprocessed_corpus(config.manifest_path,
                                                                config.min_words,
                                                                lexicon_for(mds_args));
            const auto table = stylo::build_feature_table(corpus.docs);
            const auto frequent = stylo::select_frequent_authors(corpus.docs, config.min_works);
            fs::create_directories(config.out_dir);
            const auto uni = stylo::emit_mds_figures(table, false, frequent, config.mds_method,
                                                     config.mds, config.out_dir);
            const auto big = stylo::emit_mds_figures(table, true, frequent, config.mds_method,
                                                     config.mds, config.out_dir);
            std::cout << "embedded " << table.rows.size() << " documents; raw stress "
                      << stylo::format_full(uni.stress) << " (unigram), "
                      << stylo::format_full(big.stress) << " (bigram)\n";
            return 0;
        }
        if (train_cmd->parsed()) {
            auto config = to_config(train_args);
            config.finalize();
            const auto corpus = stylo::load_preprocessed_corpus(config.manifest_path,
                                                                config.min_words,
                                                                lexicon_for(train_args));
            const auto table = stylo::build_feature_table(corpus.docs);
            const auto cls =
                stylo::prepare_classification(corpus.docs, config.ratios, config.seed);
            fs::create_directories(config.out_dir);
            const bool bigram = model == "bigram";
            const auto outcome = stylo::train_one_model(
                table, cls, bigram, bigram ? config.train_bigram : config.train_unigram,
                config.mds_method, config.mds, config.out_dir);
            std::cout << model << ": train accuracy " << stylo::format_fixed(outcome.train_accuracy, 4)
                      << ", test accuracy " << stylo::format_fixed(outcome.test_accuracy, 4)
                      << " (chance " << stylo::format_fixed(outcome.report.chance_level, 4) << ")\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            const auto config = to_config(report_args);
            const auto result = stylo::run_experiment(config);
            std::cout << result.summary_json;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
