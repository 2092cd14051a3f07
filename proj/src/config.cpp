#include "qhc/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <stdexcept>

namespace qhc::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

double want_number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

bool want_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) bad(path, "expected a boolean");
    return j.get<bool>();
}

std::vector<double> want_number_array(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) bad(path, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

bool apply_model_key(model::ModelParams& m, const std::string& key, const json& v,
                     const std::string& path) {
    if (key == "B") m.B = want_number(v, path);
    else if (key == "L") m.L = want_number(v, path);
    else if (key == "V0") m.V0 = want_number(v, path);
    else if (key == "epsilon") m.epsilon = want_number(v, path);
    else if (key == "c1") m.c1 = want_number(v, path);
    else if (key == "c2") m.c2 = want_number(v, path);
    else if (key == "m1") m.m1 = want_number(v, path);
    else if (key == "m2") m.m2 = want_number(v, path);
    else if (key == "cl") m.cl = want_number(v, path);
    else if (key == "ml") m.ml = want_number(v, path);
    else if (key == "cr") m.cr = want_number(v, path);
    else if (key == "mr") m.mr = want_number(v, path);
    else if (key == "W_extra") m.W_extra = want_number(v, path);
    else if (key == "seed_base") m.seed_base = static_cast<std::uint64_t>(want_number(v, path));
    else return false;
    return true;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) bad("$", "top level must be an object");

    RunConfig c;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "model") {
            if (!v.is_object()) bad("$.model", "expected an object");
            for (auto mt = v.begin(); mt != v.end(); ++mt)
                if (!apply_model_key(c.model, mt.key(), mt.value(), "$.model." + mt.key()))
                    bad("$.model." + mt.key(), "unknown key");
        } else if (key == "basis") {
            for (auto bt = v.begin(); bt != v.end(); ++bt) {
                const std::string p = "$.basis." + bt.key();
                if (bt.key() == "resolution") c.basis.resolution = static_cast<int>(want_number(bt.value(), p));
                else if (bt.key() == "dim_cap") c.basis.dim_cap = static_cast<std::int64_t>(want_number(bt.value(), p));
                else if (bt.key() == "dense_cap") c.basis.dense_cap = static_cast<int>(want_number(bt.value(), p));
                else bad(p, "unknown key");
            }
        } else if (key == "solver") {
            for (auto st = v.begin(); st != v.end(); ++st) {
                const std::string p = "$.solver." + st.key();
                if (st.key() == "tol") c.solver.tol = want_number(st.value(), p);
                else if (st.key() == "max_lanczos") c.solver.max_lanczos = static_cast<int>(want_number(st.value(), p));
                else bad(p, "unknown key");
            }
        } else if (key == "classify") {
            for (auto ct = v.begin(); ct != v.end(); ++ct) {
                const std::string p = "$.classify." + ct.key();
                if (ct.key() == "edge_frac") c.classify.edge_frac = want_number(ct.value(), p);
                else if (ct.key() == "bulk_frac") c.classify.bulk_frac = want_number(ct.value(), p);
                else bad(p, "unknown key");
            }
        } else if (key == "experiment") {
            for (auto et = v.begin(); et != v.end(); ++et) {
                const std::string p = "$.experiment." + et.key();
                if (et.key() == "seeds") c.experiment.seeds = static_cast<int>(want_number(et.value(), p));
                else if (et.key() == "L_list") c.experiment.L_list = want_number_array(et.value(), p);
                else if (et.key() == "E") c.experiment.E = want_number(et.value(), p);
                else if (et.key() == "deltas") c.experiment.deltas = want_number_array(et.value(), p);
                else if (et.key() == "mu_l") c.experiment.mu_l = want_number(et.value(), p);
                else if (et.key() == "mu_r") c.experiment.mu_r = want_number(et.value(), p);
                else if (et.key() == "E_F") c.experiment.E_F = want_number(et.value(), p);
                else if (et.key() == "z_floor") c.experiment.z_floor = want_number(et.value(), p);
                else if (et.key() == "layer_scale") c.experiment.layer_scale = want_number(et.value(), p);
                else if (et.key() == "proxy_threshold") c.experiment.proxy_threshold = want_number(et.value(), p);
                else if (et.key() == "ratio_threshold") c.experiment.ratio_threshold = want_number(et.value(), p);
                else if (et.key() == "fast") c.experiment.fast = want_bool(et.value(), p);
                else bad(p, "unknown key");
            }
        } else if (key == "output") {
            for (auto ot = v.begin(); ot != v.end(); ++ot) {
                const std::string p = "$.output." + ot.key();
                if (ot.key() == "dir") {
                    if (!ot.value().is_string()) bad(p, "expected a string");
                    c.out_dir = ot.value().get<std::string>();
                } else bad(p, "unknown key");
            }
        } else if (apply_model_key(c.model, key, v, "$." + key)) {
            // top-level shorthand for model keys
        } else {
            bad("$." + key, "unknown key");
        }
    }
    c.model.validate();
    return c;
}

std::string canonical_json(const RunConfig& c) {
    json j;
    j["model"] = {{"B", c.model.B},       {"L", c.model.L},
                  {"V0", c.model.V0},     {"epsilon", c.model.epsilon},
                  {"c1", c.model.c1},     {"c2", c.model.c2},
                  {"m1", c.model.m1},     {"m2", c.model.m2},
                  {"cl", c.model.cl},     {"ml", c.model.ml},
                  {"cr", c.model.cr},     {"mr", c.model.mr},
                  {"W_extra", c.model.W_extra},
                  {"seed_base", c.model.seed_base}};
    j["basis"] = {{"resolution", c.basis.resolution},
                  {"dim_cap", c.basis.dim_cap},
                  {"dense_cap", c.basis.dense_cap}};
    j["solver"] = {{"tol", c.solver.tol}, {"max_lanczos", c.solver.max_lanczos}};
    j["classify"] = {{"edge_frac", c.classify.edge_frac}, {"bulk_frac", c.classify.bulk_frac}};
    j["experiment"] = {{"seeds", c.experiment.seeds},
                       {"L_list", c.experiment.L_list},
                       {"E", c.experiment.E},
                       {"deltas", c.experiment.deltas},
                       {"mu_l", c.experiment.mu_l},
                       {"mu_r", c.experiment.mu_r},
                       {"E_F", c.experiment.E_F},
                       {"z_floor", c.experiment.z_floor},
                       {"layer_scale", c.experiment.layer_scale},
                       {"proxy_threshold", c.experiment.proxy_threshold},
                       {"ratio_threshold", c.experiment.ratio_threshold},
                       {"fast", c.experiment.fast}};
    j["output"] = {{"dir", c.out_dir}};
    return j.dump(2);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_json(c))));
    return buf;
}

} // namespace qhc::config
