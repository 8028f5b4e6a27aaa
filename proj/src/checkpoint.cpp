#include "aose/classifier_trainer.hpp"
#include "aose/error.hpp"

#include "json.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace aose {

namespace {

constexpr const char* kFormat = "aose-checkpoint";
constexpr int kVersion = 1;

std::vector<double> doubles(const nlohmann::json& j, const char* name, std::size_t expected) {
    if (!j.is_array()) throw Error(ErrorCode::Parse, std::string("checkpoint: '") + name + "' must be an array");
    if (j.size() != expected) {
        throw Error(ErrorCode::ShapeMismatch, std::string("checkpoint: '") + name + "' has " +
                                                  std::to_string(j.size()) + " values, expected " +
                                                  std::to_string(expected));
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& x : j) {
        if (!x.is_number()) throw Error(ErrorCode::Parse, std::string("checkpoint: '") + name + "' has a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
    const HeadModel& m = checkpoint.model;
    const TrainConfig& c = checkpoint.config;
    m.validate();

    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["dimension"] = m.dimension();
    j["label_count"] = m.label_count();
    j["config"] = {
        {"learning_rate", c.learning_rate},
        {"batch_size", c.batch_size},
        {"accumulation_steps", c.accumulation_steps},
        {"epochs", c.epochs},
        {"seed", c.seed},
        {"mode", std::string(to_string(c.mode))},
        {"threads", c.threads},
    };
    j["attention"] = {
        {"transform", m.attention.transform.values()},
        {"bias", m.attention.bias.values()},
        {"context", m.attention.context.values()},
    };
    j["classifier"] = {
        {"weights", m.classifier.weights.values()},
        {"bias", m.classifier.bias.values()},
    };
    out << j.dump() << '\n';
}

Checkpoint load_checkpoint(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("checkpoint: ") + e.what());
    }
    try {
        if (j.value("format", std::string()) != kFormat) {
            throw Error(ErrorCode::Parse, "checkpoint: not an aose checkpoint");
        }
        if (j.at("version").get<int>() != kVersion) {
            throw Error(ErrorCode::Parse, "checkpoint: unsupported version");
        }
        const auto d = j.at("dimension").get<std::size_t>();
        const auto k = j.at("label_count").get<std::size_t>();
        if (d == 0 || k < 2) throw Error(ErrorCode::Parse, "checkpoint: invalid dimension or label count");

        Checkpoint ckpt;
        const auto& cfg = j.at("config");
        ckpt.config.learning_rate = cfg.at("learning_rate").get<double>();
        ckpt.config.batch_size = cfg.at("batch_size").get<std::size_t>();
        ckpt.config.accumulation_steps = cfg.at("accumulation_steps").get<std::size_t>();
        ckpt.config.epochs = cfg.at("epochs").get<std::size_t>();
        ckpt.config.seed = cfg.at("seed").get<std::uint64_t>();
        ckpt.config.mode = train_mode_from_string(cfg.at("mode").get<std::string>());
        ckpt.config.threads = cfg.value("threads", std::size_t{1});

        const auto& att = j.at("attention");
        ckpt.model.attention.transform =
            Matrix::checked(d, d, doubles(att.at("transform"), "attention.transform", d * d));
        ckpt.model.attention.bias = Vector::checked(doubles(att.at("bias"), "attention.bias", d));
        ckpt.model.attention.context =
            Vector::checked(doubles(att.at("context"), "attention.context", d));
        const auto& clf = j.at("classifier");
        ckpt.model.classifier.weights =
            Matrix::checked(k, d, doubles(clf.at("weights"), "classifier.weights", k * d));
        ckpt.model.classifier.bias = Vector::checked(doubles(clf.at("bias"), "classifier.bias", k));
        ckpt.model.validate();
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("checkpoint: ") + e.what());
    }
}

} // namespace aose
