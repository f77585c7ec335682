// Acceptance runner: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fgamma/cli.hpp"
#include "fgamma/ganlab.hpp"
#include "fgamma/verify.hpp"

namespace fs = std::filesystem;
using namespace fgamma;

namespace {

struct Outcome {
  bool passed = false;
  std::string summary;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

Outcome from_checks(const std::vector<Check>& checks) {
  Outcome o;
  std::size_t ok = 0;
  for (const auto& c : checks) {
    if (c.passed) {
      ++ok;
    } else {
      std::ostringstream os;
      os << "failed: " << c.name << " value=" << c.value << " limit=" << c.limit;
      if (!c.detail.empty()) os << " (" << c.detail << ")";
      o.notes.push_back(os.str());
    }
  }
  o.passed = !checks.empty() && ok == checks.size();
  o.summary = std::to_string(ok) + "/" + std::to_string(checks.size()) + " checks";
  return o;
}

std::string source(const std::string& rel) {
  return (fs::path(FGAMMA_SOURCE_DIR) / rel).string();
}

std::string cli_capture(std::vector<std::string> args, int& code) {
  std::ostringstream out;
  std::ostringstream err;
  code = run(args, out, err);
  return out.str() + "\n--stderr--\n" + err.str();
}

Outcome gan_desk_run() {
  Outcome o;
  TrainConfig cfg;
  cfg.gen = DivergenceGenerator::alpha(2.0);
  cfg.n = 2000;
  cfg.m = 2000;
  cfg.seed = 0;

  auto t0 = std::chrono::steady_clock::now();
  const auto gauss = train_gan(cfg, SyntheticTarget::gaussian(0.0, 1.0));
  const double t_gauss = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ratio = gauss.final_heldout / gauss.initial_heldout;

  t0 = std::chrono::steady_clock::now();
  const auto heavy = train_gan(cfg, SyntheticTarget::student_t(3.0, 1.0));
  const double t_heavy = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool gauss_ok = gauss.initial_heldout > 0 && ratio <= 0.2 && t_gauss < 120.0;
  const bool heavy_ok = heavy.all_finite() && t_heavy < 120.0;
  o.passed = gauss_ok && heavy_ok;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "gaussian held-out %.4g -> %.4g (ratio %.3f, limit 0.2, %.1f s); student-t(3) "
                "trace %s (%.1f s)",
                gauss.initial_heldout, gauss.final_heldout, ratio, t_gauss,
                heavy.all_finite() ? "all finite" : "NOT finite", t_heavy);
  o.summary = buf;
  return o;
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "fgamma_acceptance";
  fs::create_directories(dir);
  const std::string tiny = (dir / "tiny_gan.json").string();
  std::ofstream(tiny) << R"({"n":60,"m":60,"rounds":4,"inner_steps":3,"heldout_factor":2,)"
                         R"("eval_ascent":{"restarts":2,"max_iterations":20},)"
                         R"("sweep":{"ns":[20,40],"reps":3}})";
  const std::vector<std::vector<std::string>> invocations = {
      {"--seed", "3", "--config", source("configs/estimate.json"), "estimate"},
      {"--seed", "3", "--config", source("configs/dictionary.json"), "estimate"},
      {"--seed", "3", "--config", source("configs/rademacher.json"), "rademacher"},
      {"--seed", "3", "rademacher", "--points", source("configs/data/points2d.csv"), "--kind",
       "linear", "--features", "affine", "--draws", "30"},
      {"--seed", "3", "bound", "--setting", "estimation", "--n", "50", "--m", "70", "--delta",
       "0.05", "--r", "0.1", "--k", "0.2"},
      {"--seed", "3", "bound", "--setting", "reverse", "--n", "50", "--m", "70", "--csv"},
      {"--seed", "3", "--config", tiny, "gan"},
      {"--seed", "3", "--config", tiny, "--format", "json", "gan"},
      {"--seed", "3", "--config", tiny, "gan", "sweep"},
      {"--seed", "3", "verify", "--suite", "all", "--budget", "quick"},
      {"--seed", "3", "estimate", "--gen", "js", "--alpha", "0", "--beta", "1"},
  };
  Outcome o;
  std::size_t identical = 0;
  for (const auto& args : invocations) {
    auto one = args;
    one.insert(one.begin(), {"--threads", "1"});
    auto four = args;
    four.insert(four.begin(), {"--threads", "4"});
    int c1 = 0;
    int c4 = 0;
    const std::string a = cli_capture(one, c1);
    const std::string b = cli_capture(four, c4);
    if (a == b && c1 == c4) {
      ++identical;
    } else {
      std::string joined;
      for (const auto& s : args) joined += s + " ";
      o.notes.push_back("differs: fgamma " + joined);
    }
  }
  o.passed = identical == invocations.size();
  o.summary = std::to_string(identical) + "/" + std::to_string(invocations.size()) +
              " invocations byte-identical across --threads 1 and 4";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  set_thread_count(std::max(1u, std::thread::hardware_concurrency()));

  const Budget full = Budget::full;
  const std::vector<Criterion> criteria = {
      {1, "conjugate identities", 5, [&] { return from_checks(check_conjugate_identities(full, 0)); }},
      {2, "KL closed form", 5, [&] { return from_checks(check_kl_closed_form(full, 0)); }},
      {3, "compact-bracket equivalence", 30,
       [&] { return from_checks(check_bracket_equivalence(full, 0)); }},
      {4, "Lipschitz and perturbation bounds", 30,
       [&] { return from_checks(check_lipschitz_perturbation(full, 0)); }},
      {5, "Delta sandwich", 5, [&] { return from_checks(check_delta_sandwich(full, 0)); }},
      {6, "Rademacher exactness", 10,
       [&] { return from_checks(check_rademacher_exactness(full, 0)); }},
      {7, "Dudley bounds", 120, [&] { return from_checks(check_dudley(full, 0)); }},
      {8, "ULLN bound validity", 60, [&] { return from_checks(check_ulln(full, 0)); }},
      {9, "divergence-order inequalities", 30,
       [&] { return from_checks(check_divergence_order(full, 0)); }},
      {10, "empirical concentration validity", 300,
       [&] { return from_checks(check_tail_validity(full, 0)); }},
      {11, "gradients", 30, [&] { return from_checks(check_gradients(full, 0)); }},
      {12, "GAN desk run", 240, gan_desk_run},
      {13, "CLI determinism", 0, cli_determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool ok = o.passed && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s criterion %2d: %s: %s; %.2f s", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.summary.c_str(), secs);
    if (c.limit_seconds > 0) std::printf(" (limit %.0f s)", c.limit_seconds);
    std::printf("\n");
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
