#include "stpca/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stpca/errors.hpp"

namespace stpca {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || item.key() == a;
        if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
}

template <class T>
T get(const json& obj, const char* key, std::string_view where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

template <class T>
void get_optional(const json& obj, const char* key, std::string_view where, T& out) {
    if (obj.contains(key)) out = get<T>(obj, key, where);
}

std::size_t get_count(const json& obj, const char* key, std::string_view where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string(where) + "." + key + " must be a non-negative integer");
    return v.get<std::size_t>();
}

GammaRule parse_gamma(const json& j) {
    GammaRule rule;
    std::string kind;
    if (j.is_string()) {
        kind = j.get<std::string>();
    } else {
        require_keys(j, "gamma_rule", {"kind", "scale", "value"});
        kind = get<std::string>(j, "kind", "gamma_rule");
        get_optional(j, "scale", "gamma_rule", rule.scale);
        get_optional(j, "value", "gamma_rule", rule.value);
    }
    if (kind == "sqrt_log") rule.kind = GammaKind::SqrtLog;
    else if (kind == "log") rule.kind = GammaKind::Log;
    else if (kind == "const") rule.kind = GammaKind::Const;
    else if (kind == "lemma_a") rule.kind = GammaKind::LemmaA;
    else throw ConfigError("unknown gamma rule '" + kind + "'");
    if (rule.kind == GammaKind::Const && !(j.is_object() && j.contains("value")))
        throw ConfigError("gamma_rule const needs a value");
    return rule;
}

InitSpec parse_init_spec(const json& j) {
    InitSpec spec;
    try {
        if (j.is_string()) {
            spec.kind = parse_init(j.get<std::string>());
        } else {
            require_keys(j, "init", {"kind", "values"});
            spec.kind = parse_init(get<std::string>(j, "kind", "init"));
            if (j.contains("values")) {
                for (int v : get<std::vector<int>>(j, "values", "init")) spec.custom.push_back(static_cast<Spin>(v));
            }
        }
    } catch (const InvalidParameters& e) {
        throw ConfigError(e.what());
    }
    if (spec.kind == InitKind::Custom && spec.custom.empty()) throw ConfigError("custom init needs values");
    return spec;
}

AlgorithmSpec parse_algorithm_spec(const json& j) {
    require_keys(j, "algorithm", {"kind", "m", "m1", "m2", "lazy", "norm_cap", "unthresholded"});
    AlgorithmSpec spec;
    try {
        spec.kind = parse_algorithm(get<std::string>(j, "kind", "algorithm"));
    } catch (const InvalidParameters& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("m")) spec.m = get_count(j, "m", "algorithm");
    if (j.contains("m1")) spec.m1 = get_count(j, "m1", "algorithm");
    if (j.contains("m2")) spec.m2 = get_count(j, "m2", "algorithm");
    if (j.contains("norm_cap")) spec.norm_cap = get_count(j, "norm_cap", "algorithm");
    get_optional(j, "lazy", "algorithm", spec.lazy);
    get_optional(j, "unthresholded", "algorithm", spec.unthresholded);
    return spec;
}

}  // namespace

std::string_view to_string(GammaKind kind) {
    switch (kind) {
        case GammaKind::SqrtLog: return "sqrt_log";
        case GammaKind::Log: return "log";
        case GammaKind::Const: return "const";
        case GammaKind::LemmaA: return "lemma_a";
    }
    return "";
}

double GammaRule::evaluate(std::size_t n, std::size_t m2) const {
    const double ln_n = std::log(static_cast<double>(n));
    switch (kind) {
        case GammaKind::SqrtLog: return scale * std::sqrt(ln_n);
        case GammaKind::Log: return scale * ln_n;
        case GammaKind::Const: return value;
        case GammaKind::LemmaA: {
            const double m = static_cast<double>(m2);
            return 2.0 * std::sqrt(m * std::log(m * static_cast<double>(n))) + 1.0;
        }
    }
    return 0.0;
}

std::string_view to_string(TraceMode mode) {
    switch (mode) {
        case TraceMode::Full: return "full";
        case TraceMode::Decimated: return "decimated";
        case TraceMode::Off: return "off";
    }
    return "";
}

TraceMode parse_trace_mode(std::string_view text) {
    if (text == "full") return TraceMode::Full;
    if (text == "decimated") return TraceMode::Decimated;
    if (text == "off") return TraceMode::Off;
    throw ConfigError("unknown trace mode '" + std::string(text) + "'");
}

std::size_t ExperimentConfig::k() const {
    if (!alpha_k) return params.k;
    return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(params.n), *alpha_k) - 1e-9));
}

double ExperimentConfig::lambda_at(std::size_t point) const {
    if (!lambdas.empty()) return lambdas.at(point);
    return lambda_prefactor * std::pow(static_cast<double>(params.n), alphas.at(point));
}

double ExperimentConfig::alpha_at(std::size_t point) const {
    if (lambdas.empty()) return alphas.at(point);
    return std::log(lambdas.at(point)) / std::log(static_cast<double>(params.n));
}

void ExperimentConfig::validate() const {
    const std::size_t n = params.n;
    if (n < 2) throw ConfigError("params.n must be at least 2");
    if (params.r < 2) throw ConfigError("params.r must be at least 2");
    const std::size_t kk = k();
    if (kk < 1 || kk > n) throw ConfigError("sparsity must satisfy 1 <= k <= n");
    if (!alphas.empty() && !lambdas.empty()) throw ConfigError("give either alphas or lambdas, not both");
    if (points() == 0) throw ConfigError("alphas must be nonempty");
    for (double l : lambdas)
        if (!(l > 0.0)) throw ConfigError("lambdas must be positive");
    if (!(lambda_prefactor >= 0.0)) throw ConfigError("lambda_prefactor must be non-negative");
    if (replications < 1) throw ConfigError("replications must be at least 1");

    const AlgorithmKind kind = algorithm.kind;
    switch (kind) {
        case AlgorithmKind::GreedySparse:
        case AlgorithmKind::GreedyPeel: break;
        case AlgorithmKind::TwoStageTrinary:
            if (algorithm.m1 == 0 || algorithm.m2 == 0) throw ConfigError("two_stage_trinary needs m1 and m2");
            break;
        default:
            if (algorithm.m == 0) throw ConfigError(std::string(to_string(kind)) + " needs a positive budget m");
    }
    const bool homotopy = init.kind == InitKind::Homotopy || kind == AlgorithmKind::TwoStageTrinary;
    if (homotopy && params.r % 2 == 0) throw ConfigError("homotopy initialization requires odd r");
    if (init.kind == InitKind::PlantedPair && kk < 2) throw ConfigError("planted_pair init needs k >= 2");
    if (init.kind == InitKind::Custom && init.custom.size() != n) throw ConfigError("custom init must have length n");
    if (kind == AlgorithmKind::GreedyPeel && norm_cap(kk) > n) throw ConfigError("greedy_peel needs ceil(3k/2) <= n");
    if (gamma_rule.kind == GammaKind::LemmaA) {
        const std::size_t m2 = kind == AlgorithmKind::TwoStageTrinary ? algorithm.m2 : algorithm.m;
        if (m2 == 0) throw ConfigError("gamma rule lemma_a needs a second-stage budget");
    }
    if (algorithm.norm_cap && *algorithm.norm_cap == 0) throw ConfigError("norm_cap must be positive");
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    require_keys(root, "config",
                 {"params", "alphas", "lambdas", "lambda_prefactor", "gamma_rule", "algorithm", "init",
                  "replications", "seed", "output_dir", "trace"});
    ExperimentConfig cfg;
    if (!root.contains("params")) throw ConfigError("config needs params");
    if (!root.contains("algorithm")) throw ConfigError("config needs algorithm");
    const json& p = root.at("params");
    require_keys(p, "params", {"n", "k", "alpha_k", "r", "prior", "symmetrize_noise"});
    cfg.params.n = get_count(p, "n", "params");
    if (p.contains("k") == p.contains("alpha_k")) throw ConfigError("params needs exactly one of k and alpha_k");
    if (p.contains("k")) cfg.params.k = get_count(p, "k", "params");
    if (p.contains("alpha_k")) cfg.alpha_k = get<double>(p, "alpha_k", "params");
    cfg.params.r = get<int>(p, "r", "params");
    if (p.contains("prior")) {
        try {
            cfg.params.prior = parse_prior(get<std::string>(p, "prior", "params"));
        } catch (const InvalidParameters& e) {
            throw ConfigError(e.what());
        }
    }
    get_optional(p, "symmetrize_noise", "params", cfg.params.symmetrize_noise);
    cfg.params.k = cfg.k();

    get_optional(root, "alphas", "config", cfg.alphas);
    get_optional(root, "lambdas", "config", cfg.lambdas);
    get_optional(root, "lambda_prefactor", "config", cfg.lambda_prefactor);
    if (root.contains("gamma_rule")) cfg.gamma_rule = parse_gamma(root.at("gamma_rule"));
    cfg.algorithm = parse_algorithm_spec(root.at("algorithm"));
    if (root.contains("init")) cfg.init = parse_init_spec(root.at("init"));
    if (root.contains("replications")) cfg.replications = get_count(root, "replications", "config");
    get_optional(root, "seed", "config", cfg.seed);
    if (root.contains("output_dir")) cfg.output_dir = get<std::string>(root, "output_dir", "config");
    if (root.contains("trace")) cfg.trace = parse_trace_mode(get<std::string>(root, "trace", "config"));
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace stpca
