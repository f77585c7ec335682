#include "fgamma/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "fgamma/io.hpp"

namespace fgamma {

namespace {

using io::Json;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out;
  std::string format;
  std::string config;
};

// Inline description of a parameterized class; the input dimension comes
// from the data.
struct InlineClass {
  std::string kind = "mlp";
  std::string hidden = "16,16";
  double rho = 1.0;
  std::string features = "identity";
  double alpha = 0.0;
  double beta = 1.0;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UserError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, what)) {
    if (v < 0 || v != std::floor(v)) throw UserError(what + ": expected non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

BoundedFunctionClass build_inline_class(const InlineClass& c, std::size_t dim) {
  if (c.kind == "mlp") {
    std::vector<std::size_t> widths{dim};
    for (std::size_t w : parse_counts(c.hidden, "--widths")) widths.push_back(w);
    widths.push_back(1);
    return BoundedFunctionClass::mlp(widths, c.rho, c.alpha, c.beta);
  }
  if (c.kind == "linear") {
    if (c.features != "identity" && c.features != "affine") {
      throw UserError("--features must be identity or affine");
    }
    return BoundedFunctionClass::linear(
        dim, c.features == "affine" ? FeatureMap::affine : FeatureMap::identity, c.rho, c.alpha,
        c.beta);
  }
  throw UserError("--kind must be mlp or linear (dictionaries need a config file)");
}

void add_inline_class(CLI::App* cmd, InlineClass& c) {
  cmd->add_option("--kind", c.kind, "Class kind: mlp or linear")->capture_default_str();
  cmd->add_option("--widths", c.hidden, "Hidden widths of the mlp, comma separated")
      ->capture_default_str();
  cmd->add_option("--rho", c.rho, "Parameter ball radius")->capture_default_str();
  cmd->add_option("--features", c.features, "Linear features: identity or affine")
      ->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Lower end of the function range")->capture_default_str();
  cmd->add_option("--beta", c.beta, "Upper end of the function range")->capture_default_str();
}

void forbid_with_config(const Globals& g, const CLI::App* cmd,
                        std::initializer_list<const char*> inline_flags) {
  if (g.config.empty()) return;
  for (const char* n : inline_flags) {
    if (cmd->count(n) > 0) {
      throw UserError(std::string("--config and inline flag ") + n + " are mutually exclusive");
    }
  }
}

std::string config_dir(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

// Writes the primary output to --out or the given stream.
void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw UserError("cannot write output file '" + g.out + "'");
  f << text;
}

std::string format_or(const Globals& g, const std::string& def,
                      std::initializer_list<const char*> allowed) {
  const std::string f = g.format.empty() ? def : g.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw UserError("--format " + f + " is not supported by this subcommand");
}

std::size_t resolve_threads(const Globals& g) {
  if (g.threads > 0) return g.threads;
  if (const char* env = std::getenv("FGAMMA_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UserError(std::string("FGAMMA_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string gen = "kl";
  std::string q;
  std::string p;
  InlineClass cls;
  std::size_t restarts = AscentConfig{}.restarts;
  std::size_t iterations = AscentConfig{}.max_iterations;
  double lr = AscentConfig{}.learning_rate;
};

std::string do_estimate(const Globals& g, const CLI::App* cmd, const EstimateArgs& a) {
  const std::string fmt = format_or(g, "json", {"json", "csv"});
  forbid_with_config(g, cmd,
                     {"--gen", "--q", "--p", "--kind", "--widths", "--rho", "--features",
                      "--alpha", "--beta", "--restarts", "--iterations", "--lr"});
  DivergenceGenerator gen = DivergenceGenerator::kl();
  Sample q;
  Sample p;
  std::optional<BoundedFunctionClass> cls;
  AscentConfig ascent;
  if (!g.config.empty()) {
    const auto c = io::estimate_config_from_json(io::load_json_file(g.config), config_dir(g.config));
    gen = DivergenceGenerator::parse(c.gen);
    cls = io::class_from_json(c.cls, "config.class");
    require_compatible(gen, cls->range_lo(), cls->range_hi());
    q = read_sample_csv(c.q);
    p = read_sample_csv(c.p);
    ascent = c.ascent;
  } else {
    gen = DivergenceGenerator::parse(a.gen);
    require_compatible(gen, a.cls.alpha, a.cls.beta);
    if (a.q.empty() || a.p.empty()) throw UserError("estimate needs --q and --p sample files");
    q = read_sample_csv(a.q);
    p = read_sample_csv(a.p);
    cls = build_inline_class(a.cls, q.dim());
    ascent.restarts = a.restarts;
    ascent.max_iterations = a.iterations;
    ascent.learning_rate = a.lr;
  }
  ascent.seed = g.seed;
  const auto res = estimate_divergence(gen, *cls, q, p, ascent);
  if (fmt == "csv") {
    std::ostringstream os;
    os << "value,nu_star,exact,restarts_used,n,m\n"
       << format_double(res.value) << ',' << format_double(res.nu_star) << ','
       << (res.exact ? "true" : "false") << ',' << res.restarts_used << ',' << q.size() << ','
       << p.size() << '\n';
    return os.str();
  }
  Json j = {{"gen", gen.spec()}, {"class", cls->describe()}, {"n", q.size()}, {"m", p.size()},
            {"seed", g.seed}};
  const Json body = io::to_json(res);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return io::dump(j);
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
  std::string setting;
  std::string gen = "kl";
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  double beta = 1.0;
  double epsilon = 0.0;
  double confidence = 0.0;
  double delta_f = 0.0;
  double r = 0.0;
  double k = 0.0;
  double eps_approx = 0.0;
  double eps_opt = 0.0;
  std::string r_prov = "user-supplied";
  std::string k_prov = "user-supplied";
  bool csv = false;
  std::string sweep = "epsilon";
  std::string grid;
};

std::vector<BoundReport> bound_reports(const std::string& setting, BoundInputs in,
                                       std::optional<double> confidence) {
  const bool estimation = setting == "estimation";
  const BoundSetting base =
      estimation ? BoundSetting::estimation_lower : parse_setting(setting);
  if (confidence) in.epsilon = epsilon_for_confidence(base, in, *confidence);
  if (estimation) {
    const auto [lo, up] = estimation_bounds(in);
    return {lo, up};
  }
  return {compute_bound(base, in)};
}

std::string do_bound(const Globals& g, const CLI::App* cmd, const BoundArgs& a) {
  if (!g.config.empty()) throw UserError("bound takes inline flags only");
  if (cmd->count("--epsilon") && cmd->count("--delta")) {
    throw UserError("give either --epsilon or --delta, not both");
  }
  const bool csv = a.csv || g.format == "csv";
  const bool eps_sweep = csv && a.sweep == "epsilon";
  if (!eps_sweep && !cmd->count("--epsilon") && !cmd->count("--delta")) {
    throw UserError("bound needs --epsilon or --delta");
  }
  BoundInputs in;
  in.n = a.n;
  in.m = a.m;
  in.alpha = a.alpha;
  in.beta = a.beta;
  in.gen = DivergenceGenerator::parse(a.gen);
  in.epsilon = a.epsilon;
  in.r = a.r;
  in.k = a.k;
  in.eps_approx = a.eps_approx;
  in.eps_opt = a.eps_opt;
  in.r_provenance = parse_provenance(a.r_prov);
  in.k_provenance = parse_provenance(a.k_prov);
  if (cmd->count("--delta-f")) in.delta = a.delta_f;
  std::optional<double> confidence;
  if (cmd->count("--delta")) confidence = a.confidence;
  require_compatible(in.gen, in.alpha, in.beta);

  format_or(g, csv ? "csv" : "json", {"json", "csv"});
  if (!csv) {
    const auto reps = bound_reports(a.setting, in, confidence);
    if (reps.size() == 1) return io::dump(io::to_json(reps[0]));
    return io::dump(Json{{"lower", io::to_json(reps[0])}, {"upper", io::to_json(reps[1])}});
  }

  if (a.sweep != "epsilon" && a.sweep != "n") throw UserError("--sweep must be epsilon or n");
  std::vector<double> grid;
  if (!a.grid.empty()) {
    grid = parse_list(a.grid, "--grid");
  } else if (a.sweep == "epsilon") {
    for (int i = 1; i <= 50; ++i) grid.push_back(0.01 * i);
  } else {
    grid = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  }
  if (a.sweep == "epsilon" && confidence) {
    throw UserError("an epsilon sweep cannot be combined with --delta");
  }
  std::ostringstream os;
  os << "setting,n,m,epsilon,delta_f,denominator,threshold,tail,label\n";
  for (double v : grid) {
    BoundInputs row = in;
    if (a.sweep == "epsilon") {
      row.epsilon = v;
    } else {
      if (v < 1 || v != std::floor(v)) throw UserError("--grid for an n sweep needs integers >= 1");
      row.n = static_cast<std::size_t>(v);
    }
    for (const auto& rep : bound_reports(a.setting, row, confidence)) {
      os << to_string(rep.setting) << ',' << rep.inputs.n << ',' << rep.inputs.m << ','
         << format_double(rep.inputs.epsilon) << ',' << format_double(rep.delta) << ','
         << format_double(rep.denominator) << ',' << format_double(rep.threshold) << ','
         << format_double(rep.tail_probability) << ',' << rep.label() << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- rademacher

struct RademacherArgs {
  std::string points;
  std::size_t draws = 200;
  InlineClass cls;
};

std::string do_rademacher(const Globals& g, const CLI::App* cmd, const RademacherArgs& a) {
  format_or(g, "json", {"json"});
  forbid_with_config(g, cmd,
                     {"--points", "--draws", "--kind", "--widths", "--rho", "--features",
                      "--alpha", "--beta"});
  Sample pts;
  std::optional<BoundedFunctionClass> cls;
  std::size_t draws = a.draws;
  AscentConfig ascent = rademacher_ascent_defaults();
  if (!g.config.empty()) {
    const auto c =
        io::rademacher_config_from_json(io::load_json_file(g.config), config_dir(g.config));
    cls = io::class_from_json(c.cls, "config.class");
    pts = read_sample_csv(c.points);
    draws = c.draws;
    ascent = c.ascent;
  } else {
    if (a.points.empty()) throw UserError("rademacher needs --points");
    pts = read_sample_csv(a.points);
    cls = build_inline_class(a.cls, pts.dim());
  }
  if (draws == 0) throw UserError("--draws must be positive");
  const auto est = empirical_rademacher(*cls, pts, draws, g.seed, ascent);
  Json j = {{"class", cls->describe()}, {"n", pts.size()}, {"seed", g.seed}};
  const Json body = io::to_json(est);
  for (const auto& [k, v] : body.items()) j[k] = v;
  if (cls->differentiable()) {
    const std::size_t k = cls->param_dim();
    const double el2 = cls->rho() * estimate_el2_root(cls->lipschitz_profile(), pts);
    j["dudley"] = {{"k", k},
                   {"rho", cls->rho()},
                   {"el2_root", el2},
                   {"ball", dudley_ball_bound(k, pts.size(), el2)},
                   {"integral", dudley_integral_bound(k, pts.size(), el2, 2.0)}};
  } else {
    j["dudley"] = nullptr;
  }
  return io::dump(j);
}

// ---------------------------------------------------------------- gan

struct GanArgs {
  std::string gen = "alpha:2";
  std::string target = "gaussian";
  std::string ordering = "forward";
  std::size_t n = TrainConfig{}.n;
  std::size_t m = 0;
  std::size_t rounds = TrainConfig{}.rounds;
  std::string ns;
  std::size_t reps = 1;
};

SyntheticTarget inline_target(const std::string& kind) {
  if (kind == "gaussian") return SyntheticTarget::gaussian(0.0, 1.0);
  if (kind == "student_t") return SyntheticTarget::student_t(3.0, 1.0);
  if (kind == "uniform") return SyntheticTarget::uniform(-1.0, 1.0);
  if (kind == "mixture") return SyntheticTarget::mixture({0.5, 0.5}, {-2.0, 2.0}, {0.5, 0.5});
  throw UserError("--target must be gaussian, student_t, uniform or mixture");
}

struct GanJob {
  TrainConfig cfg;
  SyntheticTarget target;
  std::optional<io::SweepSpec> sweep;
};

GanJob gan_job(const Globals& g, const CLI::App* cmd, const GanArgs& a) {
  forbid_with_config(g, cmd, {"--gen", "--target", "--ordering", "--n", "--m", "--rounds"});
  GanJob job;
  if (!g.config.empty()) {
    const Json j = io::load_json_file(g.config);
    job.cfg = io::train_config_from_json(j);
    job.target = j.contains("target") ? io::target_from_json(j.at("target"), "config.target")
                                      : SyntheticTarget::gaussian(0.0, 1.0);
    if (j.contains("sweep")) job.sweep = io::sweep_from_json(j.at("sweep"), "config.sweep");
  } else {
    job.cfg.gen = DivergenceGenerator::parse(a.gen);
    if (a.ordering != "forward" && a.ordering != "reverse") {
      throw UserError("--ordering must be forward or reverse");
    }
    job.cfg.ordering = a.ordering == "forward" ? Ordering::forward : Ordering::reverse;
    job.cfg.n = a.n;
    job.cfg.m = a.m;
    job.cfg.rounds = a.rounds;
    job.target = inline_target(a.target);
    job.cfg.validate();
  }
  job.cfg.seed = g.seed;
  if (job.target.dim != job.cfg.gmap.output_dim()) {
    throw UserError("target dimension " + std::to_string(job.target.dim) +
                    " does not match the generator output dimension " +
                    std::to_string(job.cfg.gmap.output_dim()));
  }
  return job;
}

std::string do_gan(const Globals& g, const CLI::App* cmd, const GanArgs& a) {
  const GanJob job = gan_job(g, cmd, a);
  const std::string fmt = format_or(g, "csv", {"json", "csv"});
  const auto trace = train_gan(job.cfg, job.target);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  const std::string summary = io::dump(io::summary_json(job.cfg, job.target, trace));
  if (!g.out.empty()) {
    // --out names a directory receiving both files; the summary is echoed.
    std::filesystem::create_directories(g.out);
    const auto dir = std::filesystem::path(g.out);
    std::ofstream((dir / "trace.csv").string(), std::ios::binary) << csv.str();
    std::ofstream((dir / "summary.json").string(), std::ios::binary) << summary;
    return summary;
  }
  return fmt == "csv" ? csv.str() : summary;
}

std::string do_gan_sweep(const Globals& g, const CLI::App* gan, const CLI::App* cmd,
                         const GanArgs& a) {
  const GanJob job = gan_job(g, gan, a);
  const std::string fmt = format_or(g, "csv", {"json", "csv"});
  io::SweepSpec spec;
  if (cmd->count("--ns")) {
    if (job.sweep) throw UserError("--ns conflicts with the sweep section of the config");
    spec.ns = parse_counts(a.ns, "--ns");
    spec.reps = a.reps;
  } else if (job.sweep) {
    spec = *job.sweep;
  } else {
    throw UserError("gan sweep needs --ns or a sweep section in the config");
  }
  if (spec.ns.empty() || spec.reps == 0) throw UserError("gan sweep needs sample sizes and reps");
  const auto rows = consistency_experiment(job.cfg, job.target, spec.ns, spec.reps, g.seed);
  if (fmt == "json") return io::dump(io::to_json(rows));
  std::ostringstream os;
  write_consistency_csv(os, rows);
  return os.str();
}

// ---------------------------------------------------------------- verify

std::string verify_text(const VerifyReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.checks) {
    os << (c.passed ? "PASS" : "FAIL") << "  [" << c.suite << "] " << c.name;
    if (!std::isnan(c.value) && !std::isnan(c.limit)) {
      os << "  value=" << format_double(c.value) << " limit=" << format_double(c.limit);
    }
    if (!c.detail.empty()) os << "  (" << c.detail << ')';
    os << '\n';
  }
  os << "passed " << rep.passed() << " of " << rep.checks.size() << " checks, " << rep.failed()
     << " failed\n";
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fgamma: (f, Gamma)-divergence estimation, bounds and GAN experiments", "fgamma"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads (default: FGAMMA_THREADS or machine parallelism)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Write the output here instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", g.config, "JSON config file (see docs/config.schema.json)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Lower estimate of the divergence between two samples");
  estimate->add_option("--gen", est.gen, "Generator: kl, js or alpha:<a>")->capture_default_str();
  estimate->add_option("--q", est.q, "CSV sample of Q");
  estimate->add_option("--p", est.p, "CSV sample of P");
  add_inline_class(estimate, est.cls);
  estimate->add_option("--restarts", est.restarts)->capture_default_str();
  estimate->add_option("--iterations", est.iterations)->capture_default_str();
  estimate->add_option("--lr", est.lr)->capture_default_str();

  BoundArgs bd;
  auto* bound = app.add_subcommand("bound", "Concentration bound for one setting");
  bound->add_option("--setting", bd.setting,
                    "gan, gan-zero-approx, reverse, reverse-zero-approx, estimation, "
                    "estimation-lower or estimation-upper")
      ->required();
  bound->add_option("--gen", bd.gen)->capture_default_str();
  bound->add_option("--n", bd.n)->required();
  bound->add_option("--m", bd.m)->required();
  bound->add_option("--alpha", bd.alpha)->capture_default_str();
  bound->add_option("--beta", bd.beta)->capture_default_str();
  bound->add_option("--epsilon", bd.epsilon, "Deviation level");
  bound->add_option("--delta", bd.confidence, "Target tail probability; solves for epsilon");
  bound->add_option("--delta-f", bd.delta_f, "Override the computed Delta_f constant");
  bound->add_option("--r", bd.r, "Rademacher term")->capture_default_str();
  bound->add_option("--k", bd.k, "K term")->capture_default_str();
  bound->add_option("--eps-approx", bd.eps_approx)->capture_default_str();
  bound->add_option("--eps-opt", bd.eps_opt)->capture_default_str();
  bound->add_option("--r-provenance", bd.r_prov)->capture_default_str();
  bound->add_option("--k-provenance", bd.k_prov)->capture_default_str();
  bound->add_flag("--csv", bd.csv, "Emit a sweep table");
  bound->add_option("--sweep", bd.sweep, "Sweep variable for --csv: epsilon or n")
      ->capture_default_str();
  bound->add_option("--grid", bd.grid, "Comma-separated sweep values");

  RademacherArgs rd;
  auto* rademacher = app.add_subcommand("rademacher", "Empirical Rademacher complexity and Dudley bounds");
  rademacher->add_option("--points", rd.points, "CSV sample");
  rademacher->add_option("--draws", rd.draws)->capture_default_str();
  add_inline_class(rademacher, rd.cls);

  GanArgs ga;
  auto* gan = app.add_subcommand("gan", "Train a GAN on a synthetic target");
  gan->require_subcommand(0, 1);
  gan->fallthrough();
  gan->add_option("--gen", ga.gen)->capture_default_str();
  gan->add_option("--target", ga.target, "gaussian, student_t, uniform or mixture")
      ->capture_default_str();
  gan->add_option("--ordering", ga.ordering)->capture_default_str();
  gan->add_option("--n", ga.n)->capture_default_str();
  gan->add_option("--m", ga.m, "Noise samples (0: 10 n)")->capture_default_str();
  gan->add_option("--rounds", ga.rounds)->capture_default_str();
  auto* sweep = gan->add_subcommand("sweep", "Consistency table over sample sizes");
  sweep->fallthrough();
  sweep->add_option("--ns", ga.ns, "Comma-separated training sample sizes");
  sweep->add_option("--reps", ga.reps)->capture_default_str();

  std::string suite = "all";
  std::string budget = "quick";
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
  verify_cmd->add_option("--suite", suite)->capture_default_str();
  verify_cmd->add_option("--budget", budget, "quick or full")->capture_default_str();

  const std::size_t threads_before = thread_count();
  int code = 0;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    set_thread_count(resolve_threads(g));
    if (*estimate) {
      emit(g, out, do_estimate(g, estimate, est));
    } else if (*bound) {
      emit(g, out, do_bound(g, bound, bd));
    } else if (*rademacher) {
      emit(g, out, do_rademacher(g, rademacher, rd));
    } else if (*gan) {
      const std::string text = *sweep ? do_gan_sweep(g, gan, sweep, ga) : do_gan(g, gan, ga);
      if (*sweep || g.out.empty()) {
        emit(g, out, text);
      } else {
        out << text;
      }
    } else if (*verify_cmd) {
      const std::string fmt = format_or(g, "text", {"text", "json"});
      const auto rep = verify(suite, parse_budget(budget), g.seed);
      emit(g, out, fmt == "json" ? io::dump(io::to_json(rep)) : verify_text(rep));
      code = rep.ok() ? 0 : 2;
    }
  } catch (const CLI::ParseError& e) {
    code = e.get_exit_code() == 0 ? app.exit(e, out, err) : (err << "error: " << e.what() << '\n', 1);
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    code = 1;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    code = 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    code = 2;
  }
  set_thread_count(threads_before);
  return code;
}

}  // namespace fgamma
