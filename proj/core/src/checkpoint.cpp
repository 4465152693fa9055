#include "csent/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

#include "csent/errors.hpp"
#include "csent/util.hpp"

// Tensor blobs are written as raw host floats; the container is defined
// as little-endian, which every target this builds on satisfies.
static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

namespace csent {

namespace {

using nlohmann::json;

constexpr const char* kMagic = "CSENT1";

json regularizers_to_json(const nn::RegularizerConfig& r) {
    return json{{"fc_dropout_p", r.fc_dropout_p},
                {"embedding_dropout_p", r.embedding_dropout_p},
                {"dropblock_size", r.dropblock_size},
                {"dropblock_rate", r.dropblock_rate},
                {"shared_dropblock_mask", r.shared_dropblock_mask}};
}

nn::RegularizerConfig regularizers_from_json(const json& j) {
    nn::RegularizerConfig r;
    r.fc_dropout_p = j.at("fc_dropout_p").get<double>();
    r.embedding_dropout_p = j.at("embedding_dropout_p").get<double>();
    r.dropblock_size = j.at("dropblock_size").get<std::size_t>();
    r.dropblock_rate = j.at("dropblock_rate").get<double>();
    r.shared_dropblock_mask = j.at("shared_dropblock_mask").get<bool>();
    return r;
}

json config_to_json(const HcnnConfig& c) {
    return json{
        {"embedding_dim", c.embedding_dim},
        {"window_sizes", c.window_sizes},
        {"filters_per_window", c.filters_per_window},
        {"commit_level_window", c.commit_level_window},
        {"commit_level_filters", c.commit_level_filters},
        {"hidden_fc_dim", c.hidden_fc_dim},
        {"classes", c.classes},
        {"regularizers", regularizers_to_json(c.regularizers)},
        {"embedding_init",
         c.embedding_init == EmbeddingInit::PreTrained ? "pre-trained"
                                                       : "random"},
        {"batch_size", c.batch_size},
        {"learning_rate", c.learning_rate},
        {"freeze_embeddings", c.freeze_embeddings},
    };
}

HcnnConfig config_from_json(const json& j) {
    HcnnConfig c;
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.window_sizes = j.at("window_sizes").get<std::vector<std::size_t>>();
    c.filters_per_window = j.at("filters_per_window").get<std::size_t>();
    c.commit_level_window = j.at("commit_level_window").get<std::size_t>();
    c.commit_level_filters = j.at("commit_level_filters").get<std::size_t>();
    c.hidden_fc_dim = j.at("hidden_fc_dim").get<std::size_t>();
    c.classes = j.at("classes").get<std::size_t>();
    c.regularizers = regularizers_from_json(j.at("regularizers"));
    const std::string init = j.at("embedding_init").get<std::string>();
    if (init == "random") {
        c.embedding_init = EmbeddingInit::Random;
    } else if (init == "pre-trained") {
        c.embedding_init = EmbeddingInit::PreTrained;
    } else {
        throw FormatError("unknown embedding_init '" + init + "'");
    }
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.freeze_embeddings = j.at("freeze_embeddings").get<bool>();
    return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    json header{
        {"variant", variant_name(ck.variant)},
        {"vocab_fingerprint", ck.vocab_fingerprint},
        {"vocab_size", ck.vocab_size},
        {"metadata",
         {{"epochs_run", ck.metadata.epochs_run},
          {"best_val_f1", ck.metadata.best_val_f1},
          {"seed", ck.metadata.seed}}},
    };
    if (ck.variant == ModelVariant::LrBaseline) {
        header["l2_lambda"] = ck.l2_lambda;
    } else {
        header["config"] = config_to_json(ck.config);
    }
    json manifest = json::array();
    for (const NamedTensor& t : ck.tensors) {
        manifest.push_back({{"name", t.name},
                            {"rows", t.value.rows()},
                            {"cols", t.value.cols()}});
    }
    header["tensors"] = manifest;

    std::string out;
    out += kMagic;
    out += '\n';
    out += header.dump();
    out += '\n';
    for (const NamedTensor& t : ck.tensors) {
        const char* bytes = reinterpret_cast<const char*>(t.value.data());
        out.append(bytes, t.value.size() * sizeof(float));
    }
    write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string content = read_file(path);

    const std::size_t magic_end = content.find('\n');
    if (magic_end == std::string::npos) {
        throw FormatError("checkpoint file has no header");
    }
    const std::string magic = content.substr(0, magic_end);
    if (magic != kMagic) {
        // A recognizable magic with a different digit is a newer/older
        // container; anything else is not a checkpoint at all.
        if (magic.rfind("CSENT", 0) == 0) {
            throw VersionError("unsupported checkpoint container '" + magic +
                               "'");
        }
        throw FormatError("not a checkpoint file");
    }

    const std::size_t header_end = content.find('\n', magic_end + 1);
    if (header_end == std::string::npos) {
        throw FormatError("checkpoint header truncated");
    }
    json header;
    try {
        header = json::parse(
            content.substr(magic_end + 1, header_end - magic_end - 1));
    } catch (const json::exception& e) {
        throw FormatError(std::string("checkpoint header unreadable: ") +
                          e.what());
    }

    Checkpoint ck;
    try {
        ck.variant =
            variant_from_name(header.at("variant").get<std::string>());
        ck.vocab_fingerprint =
            header.at("vocab_fingerprint").get<std::string>();
        ck.vocab_size = header.at("vocab_size").get<std::size_t>();
        const json& md = header.at("metadata");
        ck.metadata.epochs_run = md.at("epochs_run").get<int>();
        ck.metadata.best_val_f1 = md.at("best_val_f1").get<double>();
        ck.metadata.seed = md.at("seed").get<std::uint64_t>();
        if (ck.variant == ModelVariant::LrBaseline) {
            ck.l2_lambda = header.at("l2_lambda").get<double>();
        } else {
            ck.config = config_from_json(header.at("config"));
        }

        std::size_t offset = header_end + 1;
        for (const json& entry : header.at("tensors")) {
            NamedTensor t;
            t.name = entry.at("name").get<std::string>();
            const std::size_t rows = entry.at("rows").get<std::size_t>();
            const std::size_t cols = entry.at("cols").get<std::size_t>();
            const std::size_t bytes = rows * cols * sizeof(float);
            if (offset + bytes > content.size()) {
                throw FormatError("checkpoint tensor '" + t.name +
                                  "' truncated");
            }
            t.value = Matrix<float>(rows, cols);
            std::memcpy(t.value.data(), content.data() + offset, bytes);
            offset += bytes;
            ck.tensors.push_back(std::move(t));
        }
        if (offset != content.size()) {
            throw FormatError("checkpoint has trailing bytes");
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("checkpoint header field: ") + e.what());
    }
    return ck;
}

}  // namespace csent
