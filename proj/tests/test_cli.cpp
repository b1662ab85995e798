#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mtdea/checkpoint.hpp"
#include "mtdea/datasets.hpp"

#ifndef MTDEA_CLI_PATH
#error "MTDEA_CLI_PATH must point at the built CLI binary"
#endif

namespace fs = std::filesystem;
using namespace mtdea;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MTDEA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli: metafam-gen") {
    TempDir tmp("mtdea_cli_gen");
    const std::string a = (tmp.path / "a").string(), b = (tmp.path / "b").string();

    SUBCASE("same seed gives byte-identical directories") {
        REQUIRE(run_cli("metafam-gen --seed 5 --out " + a + " --train-trees 6 --test-trees 3") == 0);
        REQUIRE(run_cli("metafam-gen --seed 5 --out " + b + " --train-trees 6 --test-trees 3") == 0);
        for (const char* f : {"train_observable.tsv", "train_missing.tsv", "valid_observable.tsv",
                              "valid_missing.tsv", "test_observable.tsv", "test_missing.tsv", "ontology.txt",
                              "stats.txt"}) {
            CAPTURE(f);
            CHECK(same_bytes(fs::path(a) / f, fs::path(b) / f));
        }
    }

    SUBCASE("stats file reports 29 relations in every split") {
        REQUIRE(run_cli("metafam-gen --seed 6 --out " + a + " --train-trees 6 --test-trees 3") == 0);
        std::istringstream stats(slurp(fs::path(a) / "stats.txt"));
        std::string line;
        std::getline(stats, line);  // header
        int rows = 0;
        while (std::getline(stats, line)) {
            CHECK(line.find("\t29\t") != std::string::npos);
            ++rows;
        }
        CHECK(rows == 3);
        // ontology file lists the 29 names in id order
        std::istringstream names(slurp(fs::path(a) / "ontology.txt"));
        int count = 0;
        while (std::getline(names, line))
            if (!line.empty()) ++count;
        CHECK(count == 29);
    }

    SUBCASE("unwritable output directory exits 2") {
        CHECK(run_cli("metafam-gen --seed 5 --out /proc/definitely/not/writable") == 2);
    }
}

TEST_CASE("cli: train, adapt-eval, verify") {
    TempDir tmp("mtdea_cli_train");
    const std::string data = (tmp.path / "data").string();
    const std::string ckpt = (tmp.path / "model.ckpt").string();
    const std::string hist = (tmp.path / "history.csv").string();
    REQUIRE(run_cli("metafam-gen --seed 11 --out " + data + " --train-trees 5 --test-trees 2") == 0);

    const std::string small =
        " --model.hidden_dim 8 --model.num_gnn_layers 1 --model.num_mlp_layers 1 --model.max_tasks 3"
        " --train.max_epochs 1 --train.patience 1 --train.adapt_epochs 1";

    SUBCASE("train writes a checkpoint whose manifest reflects overrides") {
        REQUIRE(run_cli("train --data " + data + " --out " + ckpt + " --history " + hist + " --seed 3" + small) == 0);
        ModelParams params = checkpoint_load(ckpt);
        CHECK(params.config.max_tasks == 3);
        CHECK(params.config.hidden_dim == 8);
        CHECK(params.num_relations == 29);

        const std::string head = slurp(hist).substr(0, 42);
        CHECK(head.find("epoch,loss,val_mrr,lambda1,lambda2,seconds") == 0);

        SUBCASE("adapt-eval emits deterministic reports and a row-stochastic alpha") {
            const std::string rep1 = (tmp.path / "r1.csv").string(), rep2 = (tmp.path / "r2.csv").string();
            const std::string alpha = (tmp.path / "alpha.csv").string();
            REQUIRE(run_cli("adapt-eval --ckpt " + ckpt + " --data " + data + " --seed 9 --report " + rep1 +
                            " --alpha " + alpha + small) == 0);
            REQUIRE(run_cli("adapt-eval --ckpt " + ckpt + " --data " + data + " --seed 9 --report " + rep2 + small) ==
                    0);
            CHECK(same_bytes(rep1, rep2));
            CHECK(slurp(rep1).find("scheme,metric,value,count") == 0);
            CHECK(slurp(rep1).find("dual,MR,") != std::string::npos);

            std::istringstream rows(slurp(alpha));
            std::string line;
            int nrows = 0;
            while (std::getline(rows, line)) {
                if (line.empty()) continue;
                double sum = 0.0;
                std::istringstream cells(line);
                std::string cell;
                while (std::getline(cells, cell, ',')) sum += std::stod(cell);
                CHECK(std::abs(sum - 1.0) <= 1e-9);
                ++nrows;
            }
            CHECK(nrows == 29);
        }

        SUBCASE("homogeneous flag on a non-homogeneous checkpoint is a usage error") {
            CHECK(run_cli("adapt-eval --ckpt " + ckpt + " --data " + data + " --homogeneous" + small) == 2);
        }
    }

    SUBCASE("missing data directory exits 2") {
        CHECK(run_cli("train --data " + (tmp.path / "nope").string() + " --out " + ckpt + small) == 2);
        CHECK(run_cli("adapt-eval --ckpt /nonexistent.ckpt --data " + data + small) == 2);
    }

    SUBCASE("unknown config key exits 2") {
        CHECK(run_cli("train --data " + data + " --out " + ckpt + " --model.nonsense 1" + small) == 2);
    }

    SUBCASE("verify subcommand exit codes") {
        CHECK(run_cli("verify --suite ranking --seed 1") == 0);
        CHECK(run_cli("verify --suite nonsense") == 2);
    }
}
