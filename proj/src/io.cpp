#include "fgamma/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fgamma::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw UserError("config: " + where + ": " + what);
}

// Typed, strict access to one JSON object.
class Obj {
 public:
  Obj(const Json& j, std::string where, std::set<std::string> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail(where_, "expected an object");
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) fail(where_, "unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  const Json& raw(const std::string& key) const {
    if (!has(key)) fail(where_, "missing required key '" + key + "'");
    return j_.at(key);
  }

  double num(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    return v.get<double>();
  }
  double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

  std::size_t count(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(path(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }
  std::size_t count(const std::string& key, std::size_t def) const {
    return has(key) ? count(key) : def;
  }

  std::string str(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& def) const {
    return has(key) ? str(key) : def;
  }

  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_boolean()) fail(path(key), "expected true or false");
    return v.get<bool>();
  }

  Vector nums(const std::string& key) const { return numbers(raw(key), path(key)); }

  std::vector<std::size_t> counts(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) fail(path(key), "expected an array of integers");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long long>() < 0) {
        fail(path(key), "expected an array of non-negative integers");
      }
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

  std::pair<double, double> range(const std::string& key) const {
    const Vector r = nums(key);
    if (r.size() != 2) fail(path(key), "expected [alpha, beta]");
    return {r[0], r[1]};
  }

  static Vector numbers(const Json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    Vector out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(where, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const Json& j_;
  std::string where_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

Json provenance_json(const std::map<std::string, Provenance>& prov) {
  Json out = Json::object();
  for (const auto& [k, v] : prov) out[k] = to_string(v);
  return out;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UserError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

BoundedFunctionClass class_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) fail(where, "expected an object with a 'kind'");
  const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  if (kind == "mlp") {
    Obj o(j, where, {"kind", "widths", "rho", "range"});
    const auto [a, b] = o.range("range");
    return BoundedFunctionClass::mlp(o.counts("widths"), o.num("rho"), a, b);
  }
  if (kind == "linear") {
    Obj o(j, where, {"kind", "input_dim", "features", "rho", "range"});
    const std::string feat = o.str("features", "identity");
    if (feat != "identity" && feat != "affine") {
      fail(o.path("features"), "expected 'identity' or 'affine'");
    }
    const auto [a, b] = o.range("range");
    return BoundedFunctionClass::linear(o.count("input_dim"),
                                        feat == "affine" ? FeatureMap::affine : FeatureMap::identity,
                                        o.num("rho"), a, b);
  }
  if (kind == "dictionary") {
    Obj o(j, where, {"kind", "support", "members", "range"});
    const Json& sup = o.raw("support");
    const Json& mem = o.raw("members");
    if (!sup.is_array() || !mem.is_array()) fail(where, "support and members must be arrays");
    std::vector<Vector> rows;
    for (const auto& r : sup) {
      rows.push_back(r.is_number() ? Vector{r.get<double>()} : Obj::numbers(r, o.path("support")));
    }
    std::vector<Vector> members;
    for (const auto& m : mem) members.push_back(Obj::numbers(m, o.path("members")));
    std::optional<std::pair<double, double>> range;
    if (o.has("range")) range = o.range("range");
    return BoundedFunctionClass::dictionary(Sample::from_rows(rows), std::move(members), range);
  }
  fail(where + ".kind", "expected 'mlp', 'linear' or 'dictionary'");
}

GeneratorMap gmap_from_json(const Json& j, const std::string& where) {
  Obj o(j, where, {"widths", "rho"});
  return GeneratorMap::mlp(o.counts("widths"), o.num("rho"));
}

SyntheticTarget target_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) fail(where, "expected an object with a 'kind'");
  const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  SyntheticTarget t;
  if (kind == "gaussian") {
    Obj o(j, where, {"kind", "mu", "sigma", "dim"});
    t = SyntheticTarget::gaussian(o.num("mu", 0.0), o.num("sigma", 1.0), o.count("dim", 1));
  } else if (kind == "mixture") {
    Obj o(j, where, {"kind", "weights", "mus", "sigmas", "dim"});
    t = SyntheticTarget::mixture(o.nums("weights"), o.nums("mus"), o.nums("sigmas"),
                                 o.count("dim", 1));
  } else if (kind == "student_t") {
    Obj o(j, where, {"kind", "dof", "scale", "dim"});
    t = SyntheticTarget::student_t(o.num("dof", 3.0), o.num("scale", 1.0), o.count("dim", 1));
  } else if (kind == "uniform") {
    Obj o(j, where, {"kind", "lo", "hi", "dim"});
    t = SyntheticTarget::uniform(o.num("lo", 0.0), o.num("hi", 1.0), o.count("dim", 1));
  } else {
    fail(where + ".kind", "expected 'gaussian', 'mixture', 'student_t' or 'uniform'");
  }
  t.validate();
  return t;
}

AscentConfig ascent_from_json(const Json& j, AscentConfig base, const std::string& where) {
  Obj o(j, where,
        {"restarts", "max_iterations", "learning_rate", "init_scale", "tolerance", "patience",
         "include_zero"});
  base.restarts = o.count("restarts", base.restarts);
  base.max_iterations = o.count("max_iterations", base.max_iterations);
  base.learning_rate = o.num("learning_rate", base.learning_rate);
  base.init_scale = o.num("init_scale", base.init_scale);
  base.tolerance = o.num("tolerance", base.tolerance);
  base.patience = o.count("patience", base.patience);
  base.include_zero = o.flag("include_zero", base.include_zero);
  return base;
}

TrainConfig train_config_from_json(const Json& j) {
  Obj o(j, "config",
        {"gen", "target", "disc", "gmap", "eval_class", "eval_ascent", "ordering", "n", "m",
         "inner_steps", "outer_steps", "rounds", "disc_lr", "gen_lr", "gen_lr_final",
         "disc_init_scale", "gen_init_scale", "generator_restarts", "heldout_factor",
         "eval_every", "sweep"});
  TrainConfig cfg;
  if (o.has("gen")) cfg.gen = DivergenceGenerator::parse(o.str("gen"));
  if (o.has("disc")) cfg.disc = class_from_json(o.raw("disc"), "config.disc");
  if (o.has("gmap")) cfg.gmap = gmap_from_json(o.raw("gmap"), "config.gmap");
  if (o.has("eval_class")) cfg.eval_class = class_from_json(o.raw("eval_class"), "config.eval_class");
  if (o.has("eval_ascent")) {
    cfg.eval_ascent = ascent_from_json(o.raw("eval_ascent"), cfg.eval_ascent, "config.eval_ascent");
  }
  if (o.has("ordering")) {
    const std::string ord = o.str("ordering");
    if (ord != "forward" && ord != "reverse") {
      fail("config.ordering", "expected 'forward' or 'reverse'");
    }
    cfg.ordering = ord == "forward" ? Ordering::forward : Ordering::reverse;
  }
  cfg.n = o.count("n", cfg.n);
  cfg.m = o.count("m", cfg.m);
  cfg.inner_steps = o.count("inner_steps", cfg.inner_steps);
  cfg.outer_steps = o.count("outer_steps", cfg.outer_steps);
  cfg.rounds = o.count("rounds", cfg.rounds);
  cfg.disc_lr = o.num("disc_lr", cfg.disc_lr);
  cfg.gen_lr = o.num("gen_lr", cfg.gen_lr);
  cfg.gen_lr_final = o.num("gen_lr_final", cfg.gen_lr_final);
  cfg.disc_init_scale = o.num("disc_init_scale", cfg.disc_init_scale);
  cfg.gen_init_scale = o.num("gen_init_scale", cfg.gen_init_scale);
  cfg.generator_restarts = o.count("generator_restarts", cfg.generator_restarts);
  cfg.heldout_factor = o.count("heldout_factor", cfg.heldout_factor);
  cfg.eval_every = o.count("eval_every", cfg.eval_every);
  if (o.has("sweep")) sweep_from_json(o.raw("sweep"), "config.sweep");
  cfg.validate();
  return cfg;
}

SweepSpec sweep_from_json(const Json& j, const std::string& where) {
  Obj o(j, where, {"ns", "reps"});
  SweepSpec s;
  s.ns = o.counts("ns");
  s.reps = o.count("reps", 1);
  if (s.ns.empty()) fail(o.path("ns"), "needs at least one sample size");
  if (s.reps == 0) fail(o.path("reps"), "must be positive");
  return s;
}

namespace {

SampleJobConfig sample_job(const Json& j, const std::string& base_dir, bool two_sample) {
  const std::set<std::string> keys =
      two_sample ? std::set<std::string>{"gen", "class", "q", "p", "ascent"}
                 : std::set<std::string>{"class", "points", "draws", "ascent"};
  Obj o(j, "config", keys);
  SampleJobConfig c;
  c.cls = o.raw("class");
  if (two_sample) {
    c.gen = o.str("gen", "kl");
    c.q = resolve(base_dir, o.str("q"));
    c.p = resolve(base_dir, o.str("p"));
    c.ascent = AscentConfig{};
  } else {
    c.points = resolve(base_dir, o.str("points"));
    c.draws = o.count("draws", c.draws);
    c.ascent = rademacher_ascent_defaults();
  }
  if (o.has("ascent")) {
    c.ascent = ascent_from_json(o.raw("ascent"), c.ascent, "config.ascent");
    c.has_ascent = true;
  }
  return c;
}

}  // namespace

SampleJobConfig estimate_config_from_json(const Json& j, const std::string& base_dir) {
  return sample_job(j, base_dir, true);
}

SampleJobConfig rademacher_config_from_json(const Json& j, const std::string& base_dir) {
  return sample_job(j, base_dir, false);
}

Json to_json(const BoundReport& r) {
  const auto& in = r.inputs;
  Json inputs = {{"n", in.n},
                 {"m", in.m},
                 {"alpha", in.alpha},
                 {"beta", in.beta},
                 {"gen", in.gen.spec()},
                 {"epsilon", in.epsilon},
                 {"eps_approx", in.eps_approx},
                 {"eps_opt", in.eps_opt},
                 {"r", in.r},
                 {"k", in.k}};
  return {{"setting", to_string(r.setting)},
          {"inputs", inputs},
          {"delta", r.delta},
          {"delta_count", r.delta_count},
          {"denominator", r.denominator},
          {"threshold", r.threshold},
          {"tail", r.tail_probability},
          {"zero_approx_asserted", r.zero_approx_asserted},
          {"provenance", provenance_json(r.provenance)},
          {"label", r.label()}};
}

Json to_json(const EstimateResult& r) {
  Json out = {{"value", r.value},
              {"nu_star", r.nu_star},
              {"exact", r.exact},
              {"member", r.exact ? Json(r.member) : Json(nullptr)},
              {"theta_star", r.theta_star},
              {"restarts_used", r.restarts_used},
              {"restart_values", r.restart_values},
              {"restart_initial_values", r.restart_initial_values},
              {"iterations", r.ascent_trace.size()}};
  return out;
}

Json to_json(const RademacherEstimate& r) {
  return {{"mean", r.mean}, {"stderr", r.std_error}, {"draws", r.draws}, {"mode", r.mode()}};
}

Json to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"suite", c.suite},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"value", std::isnan(c.value) ? Json(nullptr) : Json(c.value)},
                      {"limit", std::isnan(c.limit) ? Json(nullptr) : Json(c.limit)},
                      {"detail", c.detail}});
  }
  return {{"passed", r.passed()}, {"failed", r.failed()}, {"checks", checks}};
}

Json to_json(const std::vector<ConsistencyRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"n", r.n},
                   {"m", r.m},
                   {"mean", r.mean},
                   {"stderr", r.stderr_mean},
                   {"dudley_r_q_n", r.dudley_r_q_n},
                   {"k_m", r.k_m},
                   {"threshold", r.threshold}});
  }
  return out;
}

Json summary_json(const TrainConfig& cfg, const SyntheticTarget& target, const TrainTrace& trace) {
  return {{"gen", cfg.gen.spec()},
          {"target", target.describe()},
          {"ordering", to_string(cfg.ordering)},
          {"n", cfg.n},
          {"m", cfg.noise_count()},
          {"rounds", trace.rounds.size()},
          {"seed", cfg.seed},
          {"initial_heldout", trace.initial_heldout},
          {"final_heldout", trace.final_heldout},
          {"ratio", trace.initial_heldout > 0 ? Json(trace.final_heldout / trace.initial_heldout)
                                              : Json(nullptr)},
          {"all_finite", trace.all_finite()},
          {"eps_opt_proxy", trace.eps_opt_proxy},
          {"restart_objectives", trace.restart_objectives},
          {"best_restart", trace.best_restart},
          {"theta_star", trace.theta_star}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace fgamma::io
