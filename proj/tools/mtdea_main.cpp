#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mtdea/checkpoint.hpp"
#include "mtdea/config.hpp"
#include "mtdea/errors.hpp"
#include "mtdea/eval.hpp"
#include "mtdea/metafam.hpp"
#include "mtdea/verify.hpp"

namespace fs = std::filesystem;
using namespace mtdea;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MTDEA_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Flag overrides are collected during parsing and applied after any config
// file, so the precedence is defaults < file < flags.
void add_config_overrides(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
    const RunConfig defaults;
    for (const auto& [key, value] : defaults.values()) {
        cmd->add_option_function<std::string>(
               "--" + key, [&overrides, key = key](const std::string& v) { overrides[key] = v; },
               "override config key (default " + value + ")")
            ->expected(1);
    }
}

RunConfig resolve_config(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << content;
    if (!os) throw IoError("write failed: " + path);
}

int cmd_metafam_gen(std::uint64_t seed, const std::string& out_dir, int train_trees, int test_trees) {
    MetafamDataset ds = metafam_generate(seed, train_trees, test_trees);
    save_dataset(ds.data, out_dir);

    const auto& ontology = KinshipOntology::instance();
    std::string names;
    for (const std::string& n : ontology.names()) names += n + "\n";
    write_text_file((fs::path(out_dir) / "ontology.txt").string(), names);

    char buf[160];
    std::string stats = "split\tentities\trelations\tobservable\tmissing\n";
    auto row = [&](const char* name, const DatasetSplit& s) {
        std::snprintf(buf, sizeof(buf), "%s\t%d\t%d\t%zu\t%zu\n", name, s.observable.num_nodes(),
                      s.observable.num_relations(), s.observable.num_triplets(), s.missing.num_triplets());
        stats += buf;
    };
    row("train", ds.data.train);
    row("valid", ds.data.valid);
    row("test", ds.data.test);
    write_text_file((fs::path(out_dir) / "stats.txt").string(), stats);

    std::printf("wrote MetaFam dataset (seed %llu) to %s\n", static_cast<unsigned long long>(seed), out_dir.c_str());
    std::printf("%s", stats.c_str());
    return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::uint64_t seed, const std::string& data_dir, const std::string& out_ckpt,
              const std::string& history_path) {
    if (!fs::exists(data_dir)) throw IoError("data directory does not exist: " + data_dir);
    DatasetSplit train_split = load_split(data_dir, SplitRole::Train);
    DatasetSplit valid_split = load_split(data_dir, SplitRole::Valid);

    ModelConfig mcfg = cfg.model();
    TrainConfig tcfg = cfg.train();
    tcfg.seed = seed;

    TrainResult result = train(train_split, valid_split, tcfg, mcfg);
    checkpoint_save(result.params, out_ckpt);
    if (!history_path.empty()) {
        std::ofstream os(history_path, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + history_path);
        write_history_csv(os, result.history);
    }
    std::printf("best validation dual-MRR: %.6f (epoch %d); checkpoint: %s\n", result.history.best_val_mrr,
                result.history.best_epoch, out_ckpt.c_str());
    return kExitOk;
}

int cmd_adapt_eval(const RunConfig& cfg, std::uint64_t seed, const std::string& ckpt_path,
                   const std::string& data_dir, const std::string& scheme_name, const std::string& report_path,
                   const std::string& alpha_path, bool homogeneous_flag) {
    ModelParams params = checkpoint_load(ckpt_path);
    if (homogeneous_flag && !params.config.homogeneous)
        throw ContractViolation("--homogeneous given but the checkpoint is not a homogeneous model");
    if (!fs::exists(data_dir)) throw IoError("data directory does not exist: " + data_dir);
    DatasetSplit test_split = load_split(data_dir, SplitRole::Test);
    const RankingScheme scheme = RankingScheme::parse(scheme_name);

    TrainConfig tcfg = cfg.train();
    tcfg.seed = seed;

    AttentionWeights aw = adapt(params, test_split.observable, tcfg);
    ModelParams adapted = params;
    adapted.attn_logits = aw.logits;
    adapted.num_relations = aw.logits.rows();

    MetricsReport report = evaluate(make_scorer(adapted, test_split.observable), test_split.observable,
                                    test_split.missing, scheme, seed);
    print_metrics(std::cout, scheme, report);
    if (!report_path.empty()) {
        std::ofstream os(report_path, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + report_path);
        write_metrics_csv(os, scheme, report);
    }
    if (!alpha_path.empty()) {
        std::ofstream os(alpha_path, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + alpha_path);
        Tensor alpha = aw.alpha();
        char buf[64];
        for (int r = 0; r < alpha.rows(); ++r) {
            for (int k = 0; k < alpha.cols(); ++k) {
                std::snprintf(buf, sizeof(buf), "%.17g", alpha.at(r, k));
                os << (k ? "," : "") << buf;
            }
            os << "\n";
        }
    }
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    SuiteResult result;
    if (suite == "gradcheck")
        result = verify_gradcheck(seed);
    else if (suite == "equivariance")
        result = verify_equivariance(seed);
    else if (suite == "exchangeability")
        result = verify_exchangeability(seed);
    else if (suite == "ranking")
        result = verify_ranking(seed);
    else
        throw ContractViolation("unknown suite: " + suite + " (expected gradcheck|equivariance|exchangeability|ranking)");

    std::printf("suite %s (seed %llu)\n", suite.c_str(), static_cast<unsigned long long>(seed));
    for (const std::string& line : result.lines) std::printf("%s\n", line.c_str());
    std::printf("%s\n", result.passed ? "PASS" : "FAIL");
    return result.passed ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task double-equivariant link prediction"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "cap on internal worker threads")->check(CLI::PositiveNumber);

    std::uint64_t seed = default_seed();

    // metafam-gen
    auto* gen = app.add_subcommand("metafam-gen", "generate the synthetic kinship dataset");
    std::string out_dir;
    int train_trees = 50, test_trees = 25;
    gen->add_option("--seed", seed, "generation seed (falls back to MTDEA_SEED)");
    gen->add_option("--out", out_dir, "output split directory")->required();
    gen->add_option("--train-trees", train_trees, "number of training family trees");
    gen->add_option("--test-trees", test_trees, "number of test family trees");

    // train
    auto* tr = app.add_subcommand("train", "train a model on a split directory");
    std::map<std::string, std::string> train_overrides;
    std::string data_dir, out_ckpt, history_path, config_path;
    tr->add_option("--data", data_dir, "split directory")->required();
    tr->add_option("--out", out_ckpt, "output checkpoint path")->required();
    tr->add_option("--config", config_path, "key = value config file");
    tr->add_option("--history", history_path, "per-epoch history CSV");
    tr->add_option("--seed", seed, "training seed (falls back to MTDEA_SEED)");
    add_config_overrides(tr, train_overrides);

    // adapt-eval
    auto* ae = app.add_subcommand("adapt-eval", "adapt attention to a test split and evaluate");
    std::map<std::string, std::string> ae_overrides;
    std::string ckpt_path, scheme_name = "dual", report_path, alpha_path, ae_data_dir, ae_config_path;
    bool homogeneous_flag = false;
    ae->add_option("--ckpt", ckpt_path, "trained checkpoint")->required();
    ae->add_option("--data", ae_data_dir, "split directory with the test split")->required();
    ae->add_option("--scheme", scheme_name, "ranking scheme: dual|entity|relation");
    ae->add_option("--config", ae_config_path, "key = value config file");
    ae->add_option("--seed", seed, "adaptation/evaluation seed (falls back to MTDEA_SEED)");
    ae->add_option("--report", report_path, "metrics CSV output");
    ae->add_option("--alpha", alpha_path, "adapted attention matrix CSV output");
    ae->add_flag("--homogeneous", homogeneous_flag, "assert the checkpoint is the homogeneous baseline");
    add_config_overrides(ae, ae_overrides);

    // verify
    auto* vf = app.add_subcommand("verify", "run a property suite");
    std::string suite;
    vf->add_option("--suite", suite, "gradcheck|equivariance|exchangeability|ranking")->required();
    vf->add_option("--seed", seed, "suite seed (falls back to MTDEA_SEED)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_metafam_gen(seed, out_dir, train_trees, test_trees);
        if (tr->parsed())
            return cmd_train(resolve_config(config_path, train_overrides), seed, data_dir, out_ckpt, history_path);
        if (ae->parsed())
            return cmd_adapt_eval(resolve_config(ae_config_path, ae_overrides), seed, ckpt_path, ae_data_dir,
                                  scheme_name, report_path, alpha_path, homogeneous_flag);
        if (vf->parsed()) return cmd_verify(suite, seed);
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitRuntime;
    } catch (const DegenerateInput& e) {
        std::fprintf(stderr, "degenerate input: %s\n", e.what());
        return kExitRuntime;
    } catch (const GenerationError& e) {
        std::fprintf(stderr, "generation error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
