#include "mtdea/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "json.hpp"
#include "mtdea/errors.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace mtdea {

using nlohmann::json;

void checkpoint_save(const ModelParams& params, const std::string& path) {
    json manifest;
    manifest["config"] = {{"hidden_dim", params.config.hidden_dim},
                          {"num_gnn_layers", params.config.num_gnn_layers},
                          {"num_mlp_layers", params.config.num_mlp_layers},
                          {"max_tasks", params.config.max_tasks},
                          {"homogeneous", params.config.homogeneous}};
    manifest["num_relations"] = params.num_relations;
    json plist = json::array();
    for (const auto& [name, tensor] : params.named()) plist.push_back({{"name", name}, {"shape", tensor->shape()}});
    manifest["params"] = std::move(plist);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("checkpoint_save: cannot open " + path);
    os << kCheckpointHeader << '\n' << manifest.dump() << '\n';
    for (const auto& [name, tensor] : params.named())
        os.write(reinterpret_cast<const char*>(tensor->data()),
                 static_cast<std::streamsize>(tensor->size()) * static_cast<std::streamsize>(sizeof(double)));
    if (!os) throw IoError("checkpoint_save: write failed for " + path);
}

ModelParams checkpoint_load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint_load: cannot open " + path);
    std::string header;
    if (!std::getline(is, header) || header != kCheckpointHeader)
        throw IoError("checkpoint_load: version mismatch (expected " + std::string(kCheckpointHeader) + ")");
    std::string manifest_line;
    if (!std::getline(is, manifest_line)) throw IoError("checkpoint_load: missing manifest");

    json manifest;
    try {
        manifest = json::parse(manifest_line);
    } catch (const json::exception& e) {
        throw IoError(std::string("checkpoint_load: bad manifest: ") + e.what());
    }

    ModelConfig config;
    const json& c = manifest.at("config");
    config.hidden_dim = c.at("hidden_dim").get<int>();
    config.num_gnn_layers = c.at("num_gnn_layers").get<int>();
    config.num_mlp_layers = c.at("num_mlp_layers").get<int>();
    config.max_tasks = c.at("max_tasks").get<int>();
    config.homogeneous = c.at("homogeneous").get<bool>();
    const int num_relations = manifest.at("num_relations").get<int>();

    ModelParams params = ModelParams::init(config, num_relations, 0);
    auto named = params.named();
    const json& plist = manifest.at("params");
    if (plist.size() != named.size()) throw IoError("checkpoint_load: parameter list does not match the config");
    for (std::size_t i = 0; i < named.size(); ++i) {
        const auto& entry = plist.at(i);
        if (entry.at("name").get<std::string>() != named[i].first)
            throw IoError("checkpoint_load: parameter name mismatch at index " + std::to_string(i));
        if (entry.at("shape").get<std::vector<int>>() != named[i].second->shape())
            throw IoError("checkpoint_load: parameter shape mismatch for " + named[i].first);
        is.read(reinterpret_cast<char*>(named[i].second->data()),
                static_cast<std::streamsize>(named[i].second->size()) * static_cast<std::streamsize>(sizeof(double)));
        if (is.gcount() != static_cast<std::streamsize>(named[i].second->size() * sizeof(double)))
            throw IoError("checkpoint_load: truncated file at " + named[i].first);
    }
    return params;
}

}  // namespace mtdea
