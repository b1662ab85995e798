#pragma once

#include <map>
#include <string>

#include "mtdea/model.hpp"
#include "mtdea/train.hpp"

namespace mtdea {

/// Flat key-value run configuration. Every ModelConfig/TrainConfig/LossConfig
/// field is addressable by dotted key; unknown keys are rejected. Defaults
/// match the published hyper-parameters (batch 256, lr 1e-3, weight decay
/// 5e-4, clip 1.0, 10 epochs, patience 5, n = m = 2, lambda = 0.1 annealed by
/// 1.1, hidden 32).
class RunConfig {
public:
    RunConfig();  // defaults

    /// Lines of `key = value`; '#' starts a comment; blank lines ignored.
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    ModelConfig model() const;
    TrainConfig train() const;  // seed excluded; set via TrainConfig::seed

private:
    std::map<std::string, std::string> values_;
};

}  // namespace mtdea
