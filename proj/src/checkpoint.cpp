#include "rdgcn/checkpoint.hpp"

#include <fstream>

#include "rdgcn/error.hpp"
#include "rdgcn/io.hpp"

namespace rdgcn {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

json grid_to_json(const IntGrid& grid) {
    json rows = json::array();
    for (int i = 0; i < grid.n; ++i) {
        json row = json::array();
        for (int j = 0; j < grid.n; ++j) row.push_back(grid.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

IntGrid grid_from_json(const json& j) {
    IntGrid grid(static_cast<int>(j.size()));
    for (int i = 0; i < grid.n; ++i) {
        if (static_cast<int>(j[i].size()) != grid.n) throw InputError("views grid is not square");
        for (int c = 0; c < grid.n; ++c) grid.at(i, c) = j[i][c].get<int>();
    }
    return grid;
}

}  // namespace

json to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& data = j.at("data");
    if (data.size() != m.size()) throw InputError("matrix payload size mismatch");
    for (size_t i = 0; i < m.size(); ++i) m.data()[i] = data[i].get<double>();
    return m;
}

json to_json(const TrainConfig& cfg) {
    return json{
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"lr", cfg.adam.lr},
        {"beta1", cfg.adam.beta1},
        {"beta2", cfg.adam.beta2},
        {"adam_eps", cfg.adam.eps},
        {"embed_dim", cfg.model.embed_dim},
        {"D", cfg.model.hidden_dim},
        {"L", cfg.model.layers},
        {"classes", cfg.model.classes},
        {"dropout_in", cfg.model.dropout_in},
        {"dropout_out", cfg.model.dropout_out},
        {"T", cfg.distance_cap},
        {"K0", cfg.bandit.initial_k},
        {"S", cfg.bandit.step_size},
        {"K_min", cfg.bandit.k_min},
        {"K_max", cfg.bandit.k_max},
        {"R", cfg.bandit.window},
        {"interval", cfg.bandit_interval},
        {"seed", cfg.seed},
        {"val_fraction", cfg.val_fraction},
        {"reward_on_test", cfg.reward_on_test},
        {"mode", std::string(mode_name(cfg.mode))},
    };
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.adam.lr = j.at("lr").get<double>();
    cfg.adam.beta1 = j.at("beta1").get<double>();
    cfg.adam.beta2 = j.at("beta2").get<double>();
    cfg.adam.eps = j.at("adam_eps").get<double>();
    cfg.model.embed_dim = j.at("embed_dim").get<int>();
    cfg.model.hidden_dim = j.at("D").get<int>();
    cfg.model.layers = j.at("L").get<int>();
    cfg.model.classes = j.at("classes").get<int>();
    cfg.model.dropout_in = j.at("dropout_in").get<double>();
    cfg.model.dropout_out = j.at("dropout_out").get<double>();
    cfg.distance_cap = j.at("T").get<int>();
    cfg.bandit.initial_k = j.at("K0").get<double>();
    cfg.bandit.step_size = j.at("S").get<double>();
    cfg.bandit.k_min = j.at("K_min").get<double>();
    cfg.bandit.k_max = j.at("K_max").get<double>();
    cfg.bandit.window = j.at("R").get<int>();
    cfg.bandit_interval = j.at("interval").get<int>();
    cfg.seed = j.at("seed").get<unsigned long long>();
    cfg.val_fraction = j.at("val_fraction").get<double>();
    cfg.reward_on_test = j.at("reward_on_test").get<bool>();
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    return cfg;
}

json to_json(const EvalReport& report) {
    json per_class = json::array();
    for (size_t c = 0; c < report.per_class.size(); ++c) {
        const ClassMetrics& m = report.per_class[c];
        per_class.push_back(json{{"label", std::string(polarity_name(static_cast<int>(c)))},
                                 {"precision", m.precision},
                                 {"recall", m.recall},
                                 {"f1", m.f1},
                                 {"support", m.support}});
    }
    return json{{"accuracy", report.accuracy},
                {"macro_f1", report.macro_f1},
                {"per_class", std::move(per_class)},
                {"confusion", report.confusion},
                {"total", report.total}};
}

namespace {

EvalReport eval_report_from_json(const json& j) {
    EvalReport report;
    report.accuracy = j.at("accuracy").get<double>();
    report.macro_f1 = j.at("macro_f1").get<double>();
    report.total = j.at("total").get<long>();
    for (const auto& row : j.at("confusion")) {
        report.confusion.push_back(row.get<std::vector<long>>());
    }
    for (const auto& entry : j.at("per_class")) {
        ClassMetrics m;
        m.precision = entry.at("precision").get<double>();
        m.recall = entry.at("recall").get<double>();
        m.f1 = entry.at("f1").get<double>();
        m.support = entry.at("support").get<long>();
        report.per_class.push_back(m);
    }
    return report;
}

json trace_to_json(const std::vector<BanditTraceRow>& trace) {
    json rows = json::array();
    for (const BanditTraceRow& row : trace) {
        rows.push_back(json{{"b", row.interval},
                            {"K", row.curvature},
                            {"reward", row.reward},
                            {"frozen", row.frozen}});
    }
    return rows;
}

std::vector<BanditTraceRow> trace_from_json(const json& j) {
    std::vector<BanditTraceRow> trace;
    for (const auto& entry : j) {
        trace.push_back(BanditTraceRow{entry.at("b").get<int>(), entry.at("K").get<double>(),
                                       entry.at("reward").get<int>(),
                                       entry.at("frozen").get<bool>()});
    }
    return trace;
}

json gradients_to_json(const Gradients& grads) {
    json j = json::object();
    grads.for_each([&](const std::string& name, const Matrix& m) { j[name] = to_json(m); });
    return j;
}

}  // namespace

json to_json(const Trainer::Snapshot& snap) {
    json params = json::object();
    snap.params.for_each(
        [&](const std::string& name, const Matrix& m) { params[name] = to_json(m); });

    json epoch_stats = json::array();
    for (const EpochStats& stats : snap.epoch_stats) {
        epoch_stats.push_back(json{{"epoch", stats.epoch},
                                   {"mean_loss", stats.mean_loss},
                                   {"val_accuracy", stats.val_accuracy},
                                   {"curvature", stats.curvature},
                                   {"test", to_json(stats.test)}});
    }

    return json{
        {"format", "rdgcn-checkpoint"},
        {"version", kCheckpointVersion},
        {"config", to_json(snap.config)},
        {"epoch", snap.epoch},
        {"global_batch", snap.global_batch},
        {"rng", snap.rng_state},
        {"token_vocab", snap.token_vocab},
        {"type_vocab", snap.type_vocab},
        {"params", std::move(params)},
        {"adam",
         json{{"steps", snap.adam.steps},
              {"m", gradients_to_json(snap.adam.first_moment)},
              {"v", gradients_to_json(snap.adam.second_moment)}}},
        {"bandit",
         json{{"curvature", snap.curvature},
              {"intervals", snap.bandit_intervals},
              {"frozen", snap.bandit_frozen},
              {"last_accuracy", snap.bandit_last_accuracy ? json(*snap.bandit_last_accuracy)
                                                          : json(nullptr)},
              {"history", snap.bandit_history}}},
        {"trace", trace_to_json(snap.trace)},
        {"epoch_stats", std::move(epoch_stats)},
    };
}

namespace {

void fill_params_from_json(const json& j, ModelParams& params, int layers) {
    params.embed = matrix_from_json(j.at("embed"));
    params.proj = matrix_from_json(j.at("proj"));
    params.gcn_w.clear();
    for (int l = 1; l <= layers; ++l) {
        params.gcn_w.push_back(matrix_from_json(j.at("gcn_w" + std::to_string(l))));
    }
    params.type_feats = matrix_from_json(j.at("type_H"));
    params.type_query = matrix_from_json(j.at("type_q"));
    params.clf_weight = matrix_from_json(j.at("clf_Z"));
    params.clf_bias = matrix_from_json(j.at("clf_b"));
}

Gradients gradients_from_json(const json& j, int layers) {
    Gradients g;
    g.embed = matrix_from_json(j.at("embed"));
    g.proj = matrix_from_json(j.at("proj"));
    for (int l = 1; l <= layers; ++l) {
        g.gcn_w.push_back(matrix_from_json(j.at("gcn_w" + std::to_string(l))));
    }
    g.type_feats = matrix_from_json(j.at("type_H"));
    g.type_query = matrix_from_json(j.at("type_q"));
    g.clf_weight = matrix_from_json(j.at("clf_Z"));
    g.clf_bias = matrix_from_json(j.at("clf_b"));
    return g;
}

}  // namespace

Trainer::Snapshot snapshot_from_json(const json& j) {
    if (j.value("format", "") != "rdgcn-checkpoint") {
        throw InputError("not an rdgcn checkpoint");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
        throw InputError("unsupported checkpoint version " +
                         std::to_string(j.at("version").get<int>()));
    }
    Trainer::Snapshot snap;
    snap.config = train_config_from_json(j.at("config"));
    snap.epoch = j.at("epoch").get<int>();
    snap.global_batch = j.at("global_batch").get<long long>();
    snap.rng_state = j.at("rng").get<std::string>();
    snap.token_vocab = j.at("token_vocab").get<std::vector<std::string>>();
    snap.type_vocab = j.at("type_vocab").get<std::vector<std::string>>();
    fill_params_from_json(j.at("params"), snap.params, snap.config.model.layers);
    snap.adam.steps = j.at("adam").at("steps").get<long long>();
    snap.adam.first_moment = gradients_from_json(j.at("adam").at("m"), snap.config.model.layers);
    snap.adam.second_moment = gradients_from_json(j.at("adam").at("v"), snap.config.model.layers);
    const json& bandit = j.at("bandit");
    snap.curvature = bandit.at("curvature").get<double>();
    snap.bandit_intervals = bandit.at("intervals").get<int>();
    snap.bandit_frozen = bandit.at("frozen").get<bool>();
    if (!bandit.at("last_accuracy").is_null()) {
        snap.bandit_last_accuracy = bandit.at("last_accuracy").get<double>();
    }
    snap.bandit_history = bandit.at("history").get<std::vector<int>>();
    snap.trace = trace_from_json(j.at("trace"));
    for (const auto& entry : j.at("epoch_stats")) {
        EpochStats stats;
        stats.epoch = entry.at("epoch").get<int>();
        stats.mean_loss = entry.at("mean_loss").get<double>();
        stats.val_accuracy = entry.at("val_accuracy").get<double>();
        stats.curvature = entry.at("curvature").get<double>();
        stats.test = eval_report_from_json(entry.at("test"));
        snap.epoch_stats.push_back(std::move(stats));
    }
    return snap;
}

void save_checkpoint(const Trainer::Snapshot& snap, const std::string& path) {
    write_file(path, to_json(snap).dump(2) + "\n");
}

Trainer::Snapshot load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("malformed checkpoint '" + path + "': " + e.what());
    }
    return snapshot_from_json(j);
}

json metrics_json(const TrainConfig& cfg, const std::vector<EpochStats>& epochs,
                  const EvalReport& final_report, const std::string& trace_path) {
    json epoch_rows = json::array();
    for (const EpochStats& stats : epochs) {
        epoch_rows.push_back(json{{"epoch", stats.epoch},
                                  {"mean_loss", stats.mean_loss},
                                  {"val_accuracy", stats.val_accuracy},
                                  {"curvature", stats.curvature},
                                  {"test_accuracy", stats.test.accuracy},
                                  {"test_macro_f1", stats.test.macro_f1}});
    }
    return json{{"config", to_json(cfg)},
                {"epochs", std::move(epoch_rows)},
                {"final", to_json(final_report)},
                {"bandit_trace", trace_path}};
}

std::string bandit_trace_csv(const std::vector<BanditTraceRow>& trace) {
    std::string out = "b,K,reward,frozen\n";
    for (const BanditTraceRow& row : trace) {
        out += std::to_string(row.interval);
        out += ',';
        out += format_double(row.curvature);
        out += ',';
        out += std::to_string(row.reward);
        out += ',';
        out += row.frozen ? '1' : '0';
        out += '\n';
    }
    return out;
}

json views_json(const SyntacticViews& views, const TypeVocab& vocab) {
    json vocab_map = json::object();
    for (int id = 0; id < vocab.size(); ++id) vocab_map[vocab.labels()[id]] = id;
    return json{{"dist", grid_to_json(views.dist)},
                {"type_ids", grid_to_json(views.type_ids)},
                {"topo", grid_to_json(views.topo)},
                {"vocab", std::move(vocab_map)}};
}

SyntacticViews views_from_json(const json& j) {
    SyntacticViews views;
    views.dist = grid_from_json(j.at("dist"));
    views.type_ids = grid_from_json(j.at("type_ids"));
    views.topo = grid_from_json(j.at("topo"));
    return views;
}

}  // namespace rdgcn
