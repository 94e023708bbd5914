// Command-line surface for the dependency-graph sentiment pipeline:
// graph dumps, importance-curve CSVs, training runs, and the two built-in
// verification oracles (distance cross-check, gradient check).

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdgcn/checkpoint.hpp"
#include "rdgcn/conllu.hpp"
#include "rdgcn/error.hpp"
#include "rdgcn/importance.hpp"
#include "rdgcn/io.hpp"
#include "rdgcn/oracle.hpp"
#include "rdgcn/synthetic.hpp"
#include "rdgcn/training.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

// Every command writes exactly one manifest next to its outputs.
struct Manifest {
    std::string command;
    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    unsigned long long seed = 0;

    void write(const std::string& path) const {
        json hashes = json::object();
        for (const std::string& out : outputs) {
            hashes[fs::path(out).filename().string()] = rdgcn::fnv1a_hex(rdgcn::read_file(out));
        }
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        json doc{
            {"command", command},
            {"config", config},
            {"inputs", inputs},
            {"outputs", outputs},
            {"seed", seed},
            {"artifact_hashes", std::move(hashes)},
            {"created_unix_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
        };
        rdgcn::write_file(path, doc.dump(2) + "\n");
    }
};

std::string manifest_path_for(const std::string& output_path) {
    fs::path p(output_path);
    return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

int cmd_build_graph(const std::string& conllu_path, const std::string& out_path, int cap) {
    const auto trees = rdgcn::parse_conllu(rdgcn::read_file(conllu_path));
    const rdgcn::TypeVocab vocab = rdgcn::TypeVocab::build_from_trees(trees);
    std::string dump;
    for (const rdgcn::DepTree& tree : trees) {
        dump += rdgcn::views_json(rdgcn::build_views(tree, vocab, cap), vocab).dump();
        dump += '\n';
    }
    rdgcn::write_file(out_path, dump);

    Manifest manifest;
    manifest.command = "build-graph";
    manifest.config = json{{"T", cap}};
    manifest.inputs = {conllu_path};
    manifest.outputs = {out_path};
    manifest.write(manifest_path_for(out_path));
    std::cout << trees.size() << " sentences -> " << out_path << "\n";
    return kExitOk;
}

int cmd_curve(const std::string& variant, double curvature, int cap, const std::string& out_path) {
    rdgcn::DistanceFnConfig cfg;
    cfg.cap = cap;
    cfg.curvature = curvature;
    cfg.variant = rdgcn::parse_variant(variant);
    cfg.validate();

    std::ostringstream csv;
    rdgcn::write_curve_csv(csv, rdgcn::emit_curve(cfg));
    rdgcn::write_file(out_path, csv.str());

    Manifest manifest;
    manifest.command = "curve";
    manifest.config = json{{"variant", variant}, {"K", curvature}, {"T", cap}};
    manifest.outputs = {out_path};
    manifest.write(manifest_path_for(out_path));
    std::cout << "curve " << variant << " K=" << rdgcn::format_double(curvature) << " -> "
              << out_path << "\n";
    return kExitOk;
}

struct TrainCli {
    bool synthetic = false;
    int synthetic_train = 2000;
    int synthetic_test = 500;
    unsigned long long corpus_seed = 7;
    std::string dataset_path;
    std::string conllu_path;
    std::string test_dataset_path;
    std::string test_conllu_path;
    std::string resume_path;
    bool epochs_given = false;
    std::string out_dir = "run";
    std::string mode = "full";
    rdgcn::TrainConfig cfg;
};

rdgcn::Dataset load_train_inputs(const TrainCli& cli, Manifest& manifest) {
    if (cli.synthetic) {
        rdgcn::SyntheticConfig syn;
        syn.train_size = cli.synthetic_train;
        syn.test_size = cli.synthetic_test;
        syn.seed = cli.corpus_seed;
        return rdgcn::make_synthetic_corpus(syn);
    }
    if (cli.dataset_path.empty() || cli.test_dataset_path.empty()) {
        throw rdgcn::InputError("either --synthetic or both --dataset and --test-dataset are required");
    }
    rdgcn::Dataset data;
    auto load = [&](const std::string& jsonl, const std::string& conllu) {
        manifest.inputs.push_back(jsonl);
        if (conllu.empty()) return rdgcn::load_dataset(jsonl);
        manifest.inputs.push_back(conllu);
        const auto trees = rdgcn::parse_conllu(rdgcn::read_file(conllu));
        return rdgcn::load_dataset(jsonl, &trees);
    };
    data.train = load(cli.dataset_path, cli.conllu_path);
    data.test = load(cli.test_dataset_path, cli.test_conllu_path);
    return data;
}

int cmd_train(TrainCli& cli) {
    Manifest manifest;
    manifest.command = "train";

    std::unique_ptr<rdgcn::Trainer> trainer;
    if (!cli.resume_path.empty()) {
        // The checkpoint carries the configuration; only the epoch budget
        // may be raised. The dataset flags must rebuild the original data.
        rdgcn::Trainer::Snapshot snap = rdgcn::load_checkpoint(cli.resume_path);
        if (cli.epochs_given) snap.config.epochs = cli.cfg.epochs;
        manifest.inputs.push_back(cli.resume_path);
        const rdgcn::Dataset data = load_train_inputs(cli, manifest);
        trainer = std::make_unique<rdgcn::Trainer>(data, snap);
    } else {
        cli.cfg.mode = rdgcn::parse_mode(cli.mode);
        cli.cfg.validate();
        const rdgcn::Dataset data = load_train_inputs(cli, manifest);
        trainer = std::make_unique<rdgcn::Trainer>(data, cli.cfg);
    }
    trainer->run_epochs();

    fs::create_directories(cli.out_dir);
    const std::string trace_path = (fs::path(cli.out_dir) / "bandit_trace.csv").string();
    const std::string metrics_path = (fs::path(cli.out_dir) / "metrics.json").string();
    const std::string checkpoint_path = (fs::path(cli.out_dir) / "checkpoint.json").string();

    rdgcn::write_file(trace_path, rdgcn::bandit_trace_csv(trainer->trace()));
    const rdgcn::EvalReport final_report = trainer->evaluate_test();
    rdgcn::write_file(metrics_path,
                      rdgcn::metrics_json(trainer->config(), trainer->epoch_stats(), final_report,
                                          "bandit_trace.csv")
                              .dump(2) +
                          "\n");
    rdgcn::save_checkpoint(trainer->snapshot(), checkpoint_path);

    manifest.config = rdgcn::to_json(trainer->config());
    manifest.config["synthetic"] = cli.synthetic;
    if (cli.synthetic) manifest.config["corpus_seed"] = cli.corpus_seed;
    manifest.seed = trainer->config().seed;
    manifest.outputs = {trace_path, metrics_path, checkpoint_path};
    manifest.write((fs::path(cli.out_dir) / "manifest.json").string());

    std::cout << "mode=" << rdgcn::mode_name(trainer->config().mode)
              << " test_accuracy=" << rdgcn::format_double(final_report.accuracy)
              << " macro_f1=" << rdgcn::format_double(final_report.macro_f1)
              << " K=" << rdgcn::format_double(trainer->bandit().curvature())
              << (trainer->bandit().frozen() ? " (frozen)" : " (searching)") << "\n";
    return kExitOk;
}

int cmd_grad_check(const rdgcn::GradCheckOptions& opts) {
    const rdgcn::GradCheckReport report = rdgcn::run_grad_check(opts);
    for (const rdgcn::ParamGradError& entry : report.per_param) {
        std::cout << entry.name << " max_rel_error=" << rdgcn::format_double(entry.max_rel_error)
                  << "\n";
    }
    std::cout << "worst=" << rdgcn::format_double(report.worst)
              << " tolerance=" << rdgcn::format_double(opts.tolerance)
              << (report.passed ? " PASS" : " FAIL") << "\n";
    return report.passed ? kExitOk : kExitInternal;
}

int cmd_oracle_dist(const rdgcn::DistOracleOptions& opts) {
    const rdgcn::DistOracleReport report = rdgcn::run_distance_oracle(opts);
    std::cout << "trials=" << report.trials << " mismatches=" << report.mismatches << "\n";
    if (report.mismatches > 0) {
        std::cout << report.first_mismatch << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dependency-weighted graph convolutional sentiment pipeline"};
    app.require_subcommand(1);

    // build-graph
    std::string conllu_path;
    std::string graph_out = "views.jsonl";
    int graph_cap = 10;
    auto* build_graph = app.add_subcommand("build-graph", "Dump syntactic views per sentence");
    build_graph->add_option("--conllu", conllu_path, "CoNLL-U input file")->required();
    build_graph->add_option("--out", graph_out, "Output JSONL path");
    build_graph->add_option("--T", graph_cap, "Distance bound");

    // curve
    std::string variant = "combined";
    double curve_k = 0.1;
    int curve_cap = 10;
    std::string curve_out = "curve.csv";
    auto* curve = app.add_subcommand("curve", "Emit a distance-importance curve as CSV");
    curve->add_option("--variant", variant, "combined|linear_cut|power_only|exp_only");
    curve->add_option("--K", curve_k, "Curvature (or slope for linear_cut)");
    curve->add_option("--T", curve_cap, "Distance bound");
    curve->add_option("--out", curve_out, "Output CSV path");

    // train
    TrainCli train_cli;
    auto* train = app.add_subcommand("train", "Train the sentiment classifier");
    train->add_flag("--synthetic", train_cli.synthetic, "Use the built-in synthetic corpus");
    train->add_option("--synthetic-train", train_cli.synthetic_train, "Synthetic train size");
    train->add_option("--synthetic-test", train_cli.synthetic_test, "Synthetic test size");
    train->add_option("--corpus-seed", train_cli.corpus_seed, "Synthetic corpus seed");
    train->add_option("--dataset", train_cli.dataset_path, "Training JSONL dataset");
    train->add_option("--conllu", train_cli.conllu_path, "Companion CoNLL-U for --dataset");
    train->add_option("--test-dataset", train_cli.test_dataset_path, "Test JSONL dataset");
    train->add_option("--test-conllu", train_cli.test_conllu_path, "Companion CoNLL-U for --test-dataset");
    train->add_option("--resume", train_cli.resume_path,
                      "Continue from a checkpoint (dataset flags must rebuild the same data; "
                      "other flags except --epochs are taken from the checkpoint)");
    train->add_option("--out-dir", train_cli.out_dir, "Output directory");
    train->add_option("--epochs", train_cli.cfg.epochs, "Training epochs");
    train->add_option("--batch", train_cli.cfg.batch_size, "Batch size");
    train->add_option("--lr", train_cli.cfg.adam.lr, "Adam learning rate");
    train->add_option("--D", train_cli.cfg.model.hidden_dim, "Hidden width");
    train->add_option("--embed-dim", train_cli.cfg.model.embed_dim, "Embedding width");
    train->add_option("--L", train_cli.cfg.model.layers, "Graph layers");
    train->add_option("--dropout-in", train_cli.cfg.model.dropout_in, "Input dropout rate");
    train->add_option("--dropout-out", train_cli.cfg.model.dropout_out, "Output dropout rate");
    train->add_option("--T", train_cli.cfg.distance_cap, "Distance bound");
    train->add_option("--K0", train_cli.cfg.bandit.initial_k, "Initial curvature");
    train->add_option("--S", train_cli.cfg.bandit.step_size, "Curvature action step");
    train->add_option("--K-min", train_cli.cfg.bandit.k_min, "Curvature lower bound");
    train->add_option("--K-max", train_cli.cfg.bandit.k_max, "Curvature upper bound");
    train->add_option("--R", train_cli.cfg.bandit.window, "Reward history size");
    train->add_option("--interval", train_cli.cfg.bandit_interval, "Batches per reward interval");
    train->add_option("--seed", train_cli.cfg.seed, "Run seed")->envname("RDGCN_SEED");
    train->add_option("--val-frac", train_cli.cfg.val_fraction, "Held-out reward fraction");
    train->add_flag("--reward-on-test", train_cli.cfg.reward_on_test,
                    "Reward on the test split instead of a held-out fraction");
    train->add_option("--mode", train_cli.mode, "full|no_dis|no_type|eq2_control");

    // grad-check
    rdgcn::GradCheckOptions grad_opts;
    auto* grad_check = app.add_subcommand("grad-check", "Finite-difference gradient check");
    grad_check->add_option("--seed", grad_opts.seed, "Instance seed")->envname("RDGCN_SEED");
    grad_check->add_option("--examples", grad_opts.examples, "Batch size of the instance");
    grad_check->add_option("--max-n", grad_opts.max_tokens, "Largest sentence length");
    grad_check->add_option("--D", grad_opts.hidden_dim, "Hidden width");
    grad_check->add_option("--embed-dim", grad_opts.embed_dim, "Embedding width");
    grad_check->add_option("--L", grad_opts.layers, "Graph layers");
    grad_check->add_option("--tolerance", grad_opts.tolerance, "Max relative error");
    grad_check->add_flag("--inject-error", grad_opts.inject_error, "Negative-control hook")
        ->group("");  // hidden

    // oracle-dist
    rdgcn::DistOracleOptions oracle_opts;
    auto* oracle_dist = app.add_subcommand("oracle-dist", "BFS vs Floyd-Warshall distance check");
    oracle_dist->add_option("--seed", oracle_opts.seed, "Tree seed")->envname("RDGCN_SEED");
    oracle_dist->add_option("--max-n", oracle_opts.max_tokens, "Largest sentence length");
    oracle_dist->add_option("--trials", oracle_opts.trials, "Number of random trees");
    oracle_dist->add_option("--T", oracle_opts.cap, "Distance bound");
    oracle_dist->add_flag("--inject-bug", oracle_opts.inject_off_by_one, "Negative-control hook")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (build_graph->parsed()) return cmd_build_graph(conllu_path, graph_out, graph_cap);
        if (curve->parsed()) return cmd_curve(variant, curve_k, curve_cap, curve_out);
        if (train->parsed()) {
            train_cli.epochs_given = train->count("--epochs") > 0;
            return cmd_train(train_cli);
        }
        if (grad_check->parsed()) return cmd_grad_check(grad_opts);
        if (oracle_dist->parsed()) return cmd_oracle_dist(oracle_opts);
    } catch (const rdgcn::InputError& e) {
        std::cerr << "error: input: " << e.what() << "\n";
        return kExitInput;
    } catch (const rdgcn::InternalError& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInput;
}
