#include "parcelca/error.hpp"
#include "parcelca/io.hpp"

#include <algorithm>
#include <set>

namespace parcelca::io {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw IoError("config: unknown key '" + key + "' in " + where);
    }
}

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw IoError("config: missing key '" + std::string(key) + "' in " + where);
    return obj[key];
}

double as_double(const json& v, const std::string& what) {
    if (!v.is_number()) throw IoError("config: " + what + " must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw IoError("config: " + what + " must be an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& what) {
    if (!v.is_string()) throw IoError("config: " + what + " must be a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& what) {
    if (!v.is_boolean()) throw IoError("config: " + what + " must be a boolean");
    return v.get<bool>();
}

} // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw IoError("config: document root must be a table");
    reject_unknown(doc,
                   {"format_version", "seed", "workers", "categories", "inputs", "subdivide",
                    "grids", "features", "model", "simulation", "demand", "constraints",
                    "output", "vecli"},
                   "the top level");
    if (as_int(need(doc, "format_version", "the top level"), "format_version") != 1)
        throw IoError("config: unsupported format_version (expected 1)");

    RunConfig cfg;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) throw IoError("config: seed must be an integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("workers")) cfg.workers = as_int(doc["workers"], "workers");

    if (doc.contains("categories")) {
        if (!doc["categories"].is_array()) throw IoError("config: categories must be an array");
        for (const json& c : doc["categories"])
            cfg.categories.push_back(as_string(c, "category name"));
    }

    if (doc.contains("inputs")) {
        const json& in = doc["inputs"];
        reject_unknown(in, {"initial", "actual"}, "[inputs]");
        if (in.contains("initial")) cfg.initial_path = as_string(in["initial"], "inputs.initial");
        if (in.contains("actual")) cfg.actual_path = as_string(in["actual"], "inputs.actual");
    }

    if (doc.contains("subdivide")) {
        const json& s = doc["subdivide"];
        reject_unknown(s, {"enabled", "target_area", "max_depth"}, "[subdivide]");
        if (s.contains("enabled")) cfg.subdivide_enabled = as_bool(s["enabled"], "subdivide.enabled");
        if (s.contains("target_area"))
            cfg.subdivide_target_area = as_double(s["target_area"], "subdivide.target_area");
        if (s.contains("max_depth"))
            cfg.subdivide_max_depth = as_int(s["max_depth"], "subdivide.max_depth");
    }

    if (doc.contains("grids")) {
        if (!doc["grids"].is_array()) throw IoError("config: grids must be an array of tables");
        for (const json& g : doc["grids"]) {
            reject_unknown(g, {"name", "path"}, "[[grids]]");
            cfg.grids.emplace_back(as_string(need(g, "name", "[[grids]]"), "grid name"),
                                   as_string(need(g, "path", "[[grids]]"), "grid path"));
        }
    }

    if (doc.contains("features")) {
        const json& f = doc["features"];
        reject_unknown(f, {"sample_mode"}, "[features]");
        if (f.contains("sample_mode")) {
            const std::string mode = as_string(f["sample_mode"], "features.sample_mode");
            if (mode == "centroid") {
                cfg.sample_mode = SampleMode::Centroid;
            } else if (mode == "areal_mean") {
                cfg.sample_mode = SampleMode::ArealMean;
            } else {
                throw IoError("config: features.sample_mode must be centroid or areal_mean");
            }
        }
    }

    if (doc.contains("model")) {
        const json& m = doc["model"];
        reject_unknown(m, {"kind", "path", "split_fraction", "balanced", "lr", "mlp", "rf"},
                       "[model]");
        if (m.contains("kind")) {
            cfg.model_kind = as_string(m["kind"], "model.kind");
            if (cfg.model_kind != "lr" && cfg.model_kind != "mlp" && cfg.model_kind != "rf")
                throw IoError("config: model.kind must be lr, mlp or rf");
        }
        if (m.contains("path")) cfg.model_path = as_string(m["path"], "model.path");
        if (m.contains("split_fraction"))
            cfg.split_fraction = as_double(m["split_fraction"], "model.split_fraction");
        if (m.contains("balanced")) cfg.balanced = as_bool(m["balanced"], "model.balanced");
        if (m.contains("lr")) {
            const json& h = m["lr"];
            reject_unknown(h, {"learning_rate", "l2", "epochs"}, "[model.lr]");
            if (h.contains("learning_rate"))
                cfg.lr.learning_rate = as_double(h["learning_rate"], "lr.learning_rate");
            if (h.contains("l2")) cfg.lr.l2 = as_double(h["l2"], "lr.l2");
            if (h.contains("epochs")) cfg.lr.epochs = as_int(h["epochs"], "lr.epochs");
        }
        if (m.contains("mlp")) {
            const json& h = m["mlp"];
            reject_unknown(h,
                           {"hidden_layers", "hidden_width", "epochs", "learning_rate",
                            "momentum", "folds", "width_candidates", "checkpoint_every"},
                           "[model.mlp]");
            if (h.contains("hidden_layers"))
                cfg.mlp.hidden_layers = as_int(h["hidden_layers"], "mlp.hidden_layers");
            if (h.contains("hidden_width"))
                cfg.mlp.hidden_width = as_int(h["hidden_width"], "mlp.hidden_width");
            if (h.contains("epochs")) cfg.mlp.epochs = as_int(h["epochs"], "mlp.epochs");
            if (h.contains("learning_rate"))
                cfg.mlp.learning_rate = as_double(h["learning_rate"], "mlp.learning_rate");
            if (h.contains("momentum")) cfg.mlp.momentum = as_double(h["momentum"], "mlp.momentum");
            if (h.contains("folds")) cfg.mlp.folds = as_int(h["folds"], "mlp.folds");
            if (h.contains("checkpoint_every"))
                cfg.mlp.checkpoint_every = as_int(h["checkpoint_every"], "mlp.checkpoint_every");
            if (h.contains("width_candidates"))
                for (const json& w : h["width_candidates"])
                    cfg.mlp.width_candidates.push_back(as_int(w, "mlp.width_candidates"));
        }
        if (m.contains("rf")) {
            const json& h = m["rf"];
            reject_unknown(h, {"trees", "sample_fraction", "bootstrap", "max_depth", "min_leaf"},
                           "[model.rf]");
            if (h.contains("trees")) cfg.rf.trees = as_int(h["trees"], "rf.trees");
            if (h.contains("sample_fraction"))
                cfg.rf.per_tree_sample_fraction =
                    as_double(h["sample_fraction"], "rf.sample_fraction");
            if (h.contains("bootstrap")) cfg.rf.bootstrap = as_bool(h["bootstrap"], "rf.bootstrap");
            if (h.contains("max_depth")) cfg.rf.max_depth = as_int(h["max_depth"], "rf.max_depth");
            if (h.contains("min_leaf")) cfg.rf.min_leaf = as_int(h["min_leaf"], "rf.min_leaf");
        }
    }

    if (doc.contains("simulation")) {
        const json& s = doc["simulation"];
        reject_unknown(s,
                       {"radius", "alpha", "iterations", "initial_threshold", "threshold_decay",
                        "patience", "demand_slack", "all_pairs_candidates"},
                       "[simulation]");
        if (s.contains("radius")) cfg.sim.neighborhood_radius = as_double(s["radius"], "simulation.radius");
        if (s.contains("alpha")) cfg.sim.alpha = as_double(s["alpha"], "simulation.alpha");
        if (s.contains("iterations")) cfg.sim.iterations = as_int(s["iterations"], "simulation.iterations");
        if (s.contains("initial_threshold"))
            cfg.sim.initial_threshold = as_double(s["initial_threshold"], "simulation.initial_threshold");
        if (s.contains("threshold_decay"))
            cfg.sim.threshold_decay = as_double(s["threshold_decay"], "simulation.threshold_decay");
        if (s.contains("patience")) cfg.sim.patience = as_int(s["patience"], "simulation.patience");
        if (s.contains("demand_slack"))
            cfg.sim.demand_slack = as_double(s["demand_slack"], "simulation.demand_slack");
        if (s.contains("all_pairs_candidates"))
            cfg.sim.all_pairs_candidates =
                as_bool(s["all_pairs_candidates"], "simulation.all_pairs_candidates");
    }
    cfg.sim.seed = cfg.seed;

    if (doc.contains("demand")) {
        const json& d = doc["demand"];
        reject_unknown(d, {"mode", "explicit", "markov"}, "[demand]");
        const std::string mode = d.contains("mode") ? as_string(d["mode"], "demand.mode")
                                                    : std::string("current");
        if (mode == "current") {
            cfg.demand.mode = DemandSpec::Mode::CurrentAreas;
        } else if (mode == "explicit") {
            cfg.demand.mode = DemandSpec::Mode::Explicit;
            const json& e = need(d, "explicit", "[demand]");
            for (const auto& [name, v] : e.items())
                cfg.demand.explicit_targets.emplace_back(name,
                                                         as_double(v, "demand target " + name));
            std::sort(cfg.demand.explicit_targets.begin(), cfg.demand.explicit_targets.end());
        } else if (mode == "markov") {
            cfg.demand.mode = DemandSpec::Mode::Markov;
            const json& mk = need(d, "markov", "[demand]");
            reject_unknown(mk, {"t0", "t1", "period_years", "steps", "base_year", "target_year"},
                           "[demand.markov]");
            cfg.demand.markov.t0_path = as_string(need(mk, "t0", "[demand.markov]"), "markov.t0");
            cfg.demand.markov.t1_path = as_string(need(mk, "t1", "[demand.markov]"), "markov.t1");
            cfg.demand.markov.period_years =
                as_double(need(mk, "period_years", "[demand.markov]"), "markov.period_years");
            if (mk.contains("steps")) cfg.demand.markov.steps = as_int(mk["steps"], "markov.steps");
            if (mk.contains("base_year"))
                cfg.demand.markov.base_year = as_int(mk["base_year"], "markov.base_year");
            if (mk.contains("target_year"))
                cfg.demand.markov.target_year = as_int(mk["target_year"], "markov.target_year");
            if (cfg.demand.markov.steps <= 0 &&
                cfg.demand.markov.target_year <= cfg.demand.markov.base_year)
                throw IoError("config: demand.markov needs steps or target_year > base_year");
        } else {
            throw IoError("config: demand.mode must be current, explicit or markov");
        }
    }

    if (doc.contains("constraints")) {
        const json& c = doc["constraints"];
        reject_unknown(c, {"forbidden", "zones"}, "[constraints]");
        if (c.contains("forbidden")) {
            for (const json& pair : c["forbidden"]) {
                if (!pair.is_array() || pair.size() != 2)
                    throw IoError("config: each forbidden entry must be [from, to]");
                cfg.forbidden.emplace_back(as_string(pair[0], "forbidden.from"),
                                           as_string(pair[1], "forbidden.to"));
            }
        }
        if (c.contains("zones")) {
            for (const json& z : c["zones"]) {
                reject_unknown(z, {"path", "overlap_fraction", "blocked"}, "[[constraints.zones]]");
                ZoneSpec spec;
                spec.path = as_string(need(z, "path", "[[constraints.zones]]"), "zone path");
                if (z.contains("overlap_fraction"))
                    spec.overlap_fraction = as_double(z["overlap_fraction"], "zone overlap_fraction");
                if (z.contains("blocked"))
                    for (const json& b : z["blocked"])
                        spec.blocked.push_back(as_string(b, "zone blocked category"));
                cfg.zones.push_back(std::move(spec));
            }
        }
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, {"dir"}, "[output]");
        if (o.contains("dir")) cfg.out_dir = as_string(o["dir"], "output.dir");
    }

    if (doc.contains("vecli")) {
        const json& v = doc["vecli"];
        reject_unknown(v, {"adjacency_tol"}, "[vecli]");
        if (v.contains("adjacency_tol"))
            cfg.adjacency_tol = as_double(v["adjacency_tol"], "vecli.adjacency_tol");
    }

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    const std::string text = read_text_file(path);
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    json doc;
    if (is_json || (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
                    text[text.find_first_not_of(" \t\r\n")] == '{')) {
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw IoError(path + ": invalid JSON: " + e.what());
        }
    } else {
        doc = parse_toml(text);
    }
    try {
        return parse_run_config(doc);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

} // namespace parcelca::io
