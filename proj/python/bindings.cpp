#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "suml/commands.hpp"
#include "suml/cue_stats.hpp"
#include "suml/synthetic.hpp"
#include "suml/text.hpp"

namespace py = pybind11;
using suml::Json;

namespace {

Json to_json(py::handle h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
        Json a = Json::array();
        for (py::handle item : h) a.push_back(to_json(item));
        return a;
    }
    if (py::isinstance<py::dict>(h)) {
        Json o = Json::object();
        for (auto kv : h.cast<py::dict>())
            o[py::str(kv.first).cast<std::string>()] = to_json(kv.second);
        return o;
    }
    throw std::invalid_argument("unsupported value type for a record field");
}

py::object from_json(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null: return py::none();
        case Json::value_t::boolean: return py::bool_(j.get<bool>());
        case Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case Json::value_t::number_float: return py::float_(j.get<double>());
        case Json::value_t::string: return py::str(j.get<std::string>());
        case Json::value_t::array: {
            py::list out;
            for (const Json& item : j) out.append(from_json(item));
            return out;
        }
        case Json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = from_json(it.value());
            return out;
        }
        default: throw std::invalid_argument("unsupported record value");
    }
}

suml::Dataset dataset_from_list(py::list instances, const std::string& name) {
    suml::Dataset dataset;
    dataset.name = name;
    for (py::handle h : instances)
        dataset.instances.push_back(suml::instance_from_json(to_json(h)));
    return dataset;
}

py::list dataset_to_list(const suml::Dataset& dataset) {
    py::list out;
    for (const suml::Instance& instance : dataset.instances)
        out.append(from_json(suml::instance_to_json(instance)));
    return out;
}

py::dict generate(py::dict config) {
    suml::GenConfig cfg = suml::gen_config_from_json(to_json(config));
    suml::SyntheticData data = suml::generate_synthetic(cfg);
    py::dict out;
    out["train"] = dataset_to_list(data.train);
    out["test_easy"] = dataset_to_list(data.test_easy);
    out["test_hard"] = dataset_to_list(data.test_hard);
    py::dict pairing;
    for (std::size_t k = 0; k < data.key_tokens.size(); ++k)
        pairing[py::str(data.key_tokens[k])] = py::str(data.answer_of[k]);
    out["pairing"] = pairing;
    return out;
}

py::object cue_report(py::list instances, std::size_t top_k, std::size_t min_applicability,
                      const std::string& name) {
    suml::Dataset dataset = dataset_from_list(instances, name);
    return from_json(suml::cue_report_to_json(suml::cue_report(dataset, top_k, min_applicability)));
}

py::object train(const std::string& kind, py::list train_instances, py::list val_instances,
                 py::dict config, py::list meta_test_instances) {
    suml::TrainerKind k = suml::trainer_kind_from_name(kind);
    suml::TrainConfig cfg = suml::train_config_from_json(to_json(config));
    suml::Dataset train_set = dataset_from_list(train_instances, "train");
    suml::Dataset val_set = dataset_from_list(val_instances, "val");
    suml::Dataset meta = dataset_from_list(meta_test_instances, "meta-test");
    std::vector<const suml::Dataset*> corpora{&train_set, &val_set};
    if (k == suml::TrainerKind::Suml) corpora.push_back(&meta);
    suml::Vocab vocab = suml::build_vocab(corpora, 1);
    suml::TrainResult result;
    switch (k) {
        case suml::TrainerKind::Erm:
            result = suml::train_erm(train_set, val_set, vocab, cfg);
            break;
        case suml::TrainerKind::Adversarial:
            result = suml::train_adversarial(train_set, val_set, vocab, cfg);
            break;
        case suml::TrainerKind::Suml:
            result = suml::train_suml(train_set, meta, val_set, vocab, cfg);
            break;
    }
    return from_json(suml::checkpoint_to_json(result.checkpoint));
}

py::object evaluate(py::dict checkpoint, py::list instances, const std::string& name) {
    suml::Checkpoint cp = suml::checkpoint_from_json(to_json(checkpoint));
    suml::Dataset dataset = dataset_from_list(instances, name);
    return from_json(suml::eval_report_to_json(suml::evaluate(cp, dataset, cp.config.mode)));
}

py::object split_easy_hard(py::list train_instances, py::list eval_instances,
                           std::vector<std::uint64_t> seeds, py::dict config) {
    suml::Dataset pool = dataset_from_list(train_instances, "pool");
    suml::Dataset eval_set = dataset_from_list(eval_instances, "eval");
    suml::TrainConfig cfg = suml::train_config_from_json(to_json(config));
    auto probes = suml::train_contextless_probe(pool, cfg, seeds);
    return from_json(suml::split_report_to_json(suml::split_easy_hard(eval_set, probes)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "planted-cue robustness laboratory core";
    m.def("tokenize", [](const std::string& text) { return suml::tokenize(text); },
          py::arg("text"), "lowercased word tokens as the scorer sees them");
    m.def("generate", &generate, py::arg("config"),
          "synthesize train/test_easy/test_hard instance lists from a generator config");
    m.def("cue_report", &cue_report, py::arg("instances"), py::arg("top_k") = 15,
          py::arg("min_applicability") = 5, py::arg("name") = "dataset",
          "rank choice-side tokens by productivity");
    m.def("train", &train, py::arg("kind"), py::arg("train"), py::arg("val"),
          py::arg("config") = py::dict(), py::arg("meta_test") = py::list(),
          "run one training job; returns the checkpoint as a dict");
    m.def("evaluate", &evaluate, py::arg("checkpoint"), py::arg("instances"),
          py::arg("name") = "dataset", "accuracy report for a checkpoint on tagged instances");
    m.def("split_easy_hard", &split_easy_hard, py::arg("train"), py::arg("eval"),
          py::arg("seeds"), py::arg("config") = py::dict(),
          "train contextless probes and split instances into easy/hard");
    m.def("gradcheck", &suml::gradcheck_max_rel_error, py::arg("seed") = 0,
          "worst finite-difference relative error across the training objectives");
}
