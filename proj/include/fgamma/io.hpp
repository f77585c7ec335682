#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fgamma/bounds.hpp"
#include "fgamma/discriminators.hpp"
#include "fgamma/divergence.hpp"
#include "fgamma/ganlab.hpp"
#include "fgamma/rademacher.hpp"
#include "fgamma/verify.hpp"

namespace fgamma::io {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; UserError on I/O or syntax errors.
Json load_json_file(const std::string& path);

// Loaders are strict: unknown keys, wrong types and missing required keys
// raise UserError naming the offending path, mirroring docs/config.schema.json.

/// {"kind":"mlp","widths":[...],"rho":r,"range":[a,b]}
/// {"kind":"linear","input_dim":d,"features":"identity"|"affine","rho":r,"range":[a,b]}
/// {"kind":"dictionary","support":[[...],...],"members":[[...],...],"range":[a,b]?}
BoundedFunctionClass class_from_json(const Json& j, const std::string& where = "class");

/// {"widths":[...],"rho":r}
GeneratorMap gmap_from_json(const Json& j, const std::string& where = "gmap");

/// {"kind":"gaussian","mu","sigma","dim"} and the mixture, student_t and
/// uniform analogues.
SyntheticTarget target_from_json(const Json& j, const std::string& where = "target");

/// Overrides fields of `base` present in j.
AscentConfig ascent_from_json(const Json& j, AscentConfig base, const std::string& where = "ascent");

/// A whole gan config (the "sweep" key is accepted and ignored here).
TrainConfig train_config_from_json(const Json& j);

struct SweepSpec {
  std::vector<std::size_t> ns;
  std::size_t reps = 1;
};
SweepSpec sweep_from_json(const Json& j, const std::string& where = "sweep");

/// Config for `estimate` and `rademacher`. Sample paths are resolved
/// against `base_dir`.
struct SampleJobConfig {
  std::string gen = "kl";
  Json cls;
  std::string q;
  std::string p;
  std::string points;
  std::size_t draws = 200;
  AscentConfig ascent;
  bool has_ascent = false;
};
SampleJobConfig estimate_config_from_json(const Json& j, const std::string& base_dir);
SampleJobConfig rademacher_config_from_json(const Json& j, const std::string& base_dir);

Json to_json(const BoundReport& r);
Json to_json(const EstimateResult& r);
Json to_json(const RademacherEstimate& r);
Json to_json(const VerifyReport& r);
Json to_json(const std::vector<ConsistencyRow>& rows);
/// Summary of a training run; the per-round trace goes to CSV.
Json summary_json(const TrainConfig& cfg, const SyntheticTarget& target, const TrainTrace& trace);

/// Two-space indented text with a trailing newline.
std::string dump(const Json& j);

}  // namespace fgamma::io
