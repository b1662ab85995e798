#include "mtdea/config.hpp"

#include <fstream>

#include "mtdea/errors.hpp"

namespace mtdea {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("config key " + key + ": expected integer, got \"" + v + "\"");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("config key " + key + ": expected number, got \"" + v + "\"");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("config key " + key + ": expected true|false, got \"" + v + "\"");
}

}  // namespace

RunConfig::RunConfig() {
    values_ = {
        {"model.hidden_dim", "32"},
        {"model.num_gnn_layers", "2"},
        {"model.num_mlp_layers", "2"},
        {"model.max_tasks", "2"},
        {"model.homogeneous", "false"},
        {"train.batch_positives", "256"},
        {"train.lr", "0.001"},
        {"train.weight_decay", "0.0005"},
        {"train.clip_norm", "1.0"},
        {"train.max_epochs", "10"},
        {"train.patience", "5"},
        {"train.adapt_epochs", "10"},
        {"train.adapt_holdout_fraction", "0.1"},
        {"loss.n_tail", "2"},
        {"loss.m_rel", "2"},
        {"loss.lambda1", "0.1"},
        {"loss.lambda2", "0.1"},
        {"loss.anneal", "1.1"},
    };
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("unknown config key: " + key);
    it->second = value;
}

std::string RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("unknown config key: " + key);
    return it->second;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + " line " + std::to_string(line_no) + ": expected key = value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

ModelConfig RunConfig::model() const {
    ModelConfig m;
    m.hidden_dim = to_int("model.hidden_dim", get("model.hidden_dim"));
    m.num_gnn_layers = to_int("model.num_gnn_layers", get("model.num_gnn_layers"));
    m.num_mlp_layers = to_int("model.num_mlp_layers", get("model.num_mlp_layers"));
    m.max_tasks = to_int("model.max_tasks", get("model.max_tasks"));
    m.homogeneous = to_bool("model.homogeneous", get("model.homogeneous"));
    m.validate();
    return m;
}

TrainConfig RunConfig::train() const {
    TrainConfig t;
    t.batch_positives = to_int("train.batch_positives", get("train.batch_positives"));
    t.lr = to_double("train.lr", get("train.lr"));
    t.weight_decay = to_double("train.weight_decay", get("train.weight_decay"));
    t.clip_norm = to_double("train.clip_norm", get("train.clip_norm"));
    t.max_epochs = to_int("train.max_epochs", get("train.max_epochs"));
    t.patience = to_int("train.patience", get("train.patience"));
    t.adapt_epochs = to_int("train.adapt_epochs", get("train.adapt_epochs"));
    t.adapt_holdout_fraction = to_double("train.adapt_holdout_fraction", get("train.adapt_holdout_fraction"));
    t.loss.n_tail = to_int("loss.n_tail", get("loss.n_tail"));
    t.loss.m_rel = to_int("loss.m_rel", get("loss.m_rel"));
    t.loss.lambda1 = to_double("loss.lambda1", get("loss.lambda1"));
    t.loss.lambda2 = to_double("loss.lambda2", get("loss.lambda2"));
    t.loss.anneal = to_double("loss.anneal", get("loss.anneal"));
    t.validate();
    return t;
}

}  // namespace mtdea
