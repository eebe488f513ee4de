#include "ale/harness/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ale::harness {

using nlohmann::json;

sampling::ModelParams ExperimentConfig::cell_params(double eta, double c,
                                                    std::optional<double> gamma,
                                                    std::optional<double> sigma) const {
    sampling::ModelParams p;
    p.model = sampling::model_from_string(model);
    p.alpha = alpha;
    p.eta = eta;
    p.c = c;
    if (sigma)
        p.sigma = *sigma;
    else if (gamma)
        p.gamma = *gamma;
    p.T = T;
    p.n = n;
    p.capacity_rule = sampling::capacity_rule_from_string(capacity_rule);
    p.sigma_tilde = sigma_tilde;
    p.seed = seed;
    p.pin_theta1 = pin_theta1;
    return p;
}

void ExperimentConfig::validate() const {
    if (eta_values.empty() || c_values.empty())
        throw std::invalid_argument("config: eta and c sweep lists must be non-empty");
    if (gamma_values.empty() == sigma_values.empty())
        throw std::invalid_argument("config: exactly one of gamma/sigma sweep lists");
    if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (T.has_value() == n.has_value())
        throw std::invalid_argument("config: exactly one of T/n");
    (void)sampling::model_from_string(model);
    (void)sampling::capacity_rule_from_string(capacity_rule);
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

template <typename T>
void maybe_get_opt(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

std::vector<double> list_of(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    return {j.get<double>()};
}

}  // namespace

std::string ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["model"] = model;
    j["alpha"] = alpha;
    j["eta"] = eta_values;
    j["c"] = c_values;
    if (!gamma_values.empty()) j["gamma"] = gamma_values;
    if (!sigma_values.empty()) j["sigma"] = sigma_values;
    if (T) j["T"] = *T;
    if (n) j["n"] = *n;
    j["capacity_rule"] = capacity_rule;
    if (sigma_tilde) j["sigma_tilde"] = *sigma_tilde;
    j["replicas"] = replicas;
    j["threads"] = threads;
    j["seed"] = seed;
    j["pin_theta1"] = pin_theta1;
    j["with_parents"] = with_parents;
    j["output_dir"] = output_dir;
    j["radius"] = radius;
    j["rays"] = rays;
    j["cases"] = cases;
    j["estimates_kind"] = estimates_kind;
    if (estimates_T) j["estimates_T"] = *estimates_T;
    j["target_points"] = target_points;
    j["refine_tol"] = refine_tol;
    j["moment_t"] = moment_t;
    j["sigma_min"] = sigma_min;
    j["sigma_max"] = sigma_max;
    j["sigma_steps"] = sigma_steps;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig c;
    maybe_get(j, "experiment", c.experiment);
    maybe_get(j, "model", c.model);
    maybe_get(j, "alpha", c.alpha);
    if (j.contains("eta")) c.eta_values = list_of(j["eta"]);
    if (j.contains("c")) c.c_values = list_of(j["c"]);
    if (j.contains("gamma")) c.gamma_values = list_of(j["gamma"]);
    if (j.contains("sigma")) c.sigma_values = list_of(j["sigma"]);
    maybe_get_opt(j, "T", c.T);
    maybe_get_opt(j, "n", c.n);
    maybe_get(j, "capacity_rule", c.capacity_rule);
    maybe_get_opt(j, "sigma_tilde", c.sigma_tilde);
    maybe_get(j, "replicas", c.replicas);
    maybe_get(j, "threads", c.threads);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "pin_theta1", c.pin_theta1);
    maybe_get(j, "with_parents", c.with_parents);
    maybe_get(j, "output_dir", c.output_dir);
    maybe_get(j, "radius", c.radius);
    maybe_get(j, "rays", c.rays);
    maybe_get(j, "cases", c.cases);
    maybe_get(j, "estimates_kind", c.estimates_kind);
    maybe_get_opt(j, "estimates_T", c.estimates_T);
    maybe_get(j, "target_points", c.target_points);
    maybe_get(j, "refine_tol", c.refine_tol);
    maybe_get(j, "moment_t", c.moment_t);
    maybe_get(j, "sigma_min", c.sigma_min);
    maybe_get(j, "sigma_max", c.sigma_max);
    maybe_get(j, "sigma_steps", c.sigma_steps);
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

double gamma_threshold(double eta, sampling::Model model) {
    if (!(eta > 1.0)) throw std::domain_error("gamma_threshold: requires eta > 1");
    if (model == sampling::Model::markov) return (eta + 1.0) / (2.0 * (eta - 1.0));
    const double lambda = eta < 3.0 ? 1.0 / (eta - 1.0) : 0.5;
    return (2.0 * (lambda + 1.0) * eta + 1.0) / (2.0 * (eta - 1.0));
}

}  // namespace ale::harness
