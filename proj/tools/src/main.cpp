// excerptlab: simulate panels, estimate excerpt effects, and measure
// audio repetition/unpredictability from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// non-convergence, 1 anything else.  Failures print machine-readable
// JSON {"error": {"type", "message"}} on stderr; outputs are written
// atomically so an interrupted run never leaves partial files.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "excerptlab/align.hpp"
#include "excerptlab/audio.hpp"
#include "excerptlab/csv.hpp"
#include "excerptlab/errors.hpp"
#include "excerptlab/estimators.hpp"
#include "excerptlab/panel.hpp"
#include "excerptlab/parallel.hpp"
#include "excerptlab/repetition.hpp"
#include "excerptlab/theory.hpp"
#include "excerptlab/unpredictability.hpp"

#include "support.hpp"

namespace {

using namespace excerptlab;
using excerptlab::cli::emit_json;
using excerptlab::cli::kVersion;
using excerptlab::cli::wav_files_sorted;
using excerptlab::cli::write_json_atomic;
using nlohmann::json;

// --- simulation spec -------------------------------------------------

int require_int(const std::string& key, const json& value) {
  if (!value.is_number_integer())
    throw ConfigError("spec key '" + key + "' must be an integer");
  return value.get<int>();
}

double require_real(const std::string& key, const json& value) {
  if (!value.is_number())
    throw ConfigError("spec key '" + key + "' must be a number");
  return value.get<double>();
}

std::uint64_t require_seed(const std::string& key, const json& value) {
  if (!(value.is_number_unsigned() ||
        (value.is_number_integer() && value.get<std::int64_t>() >= 0)))
    throw ConfigError("spec key '" + key + "' must be a nonnegative integer");
  return value.get<std::uint64_t>();
}

SimPanelSpec parse_sim_spec(const json& j) {
  if (!j.is_object())
    throw ConfigError("simulation spec must be a JSON object");
  SimPanelSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_treated") {
      spec.n_treated = require_int(key, value);
    } else if (key == "n_control") {
      spec.n_control = require_int(key, value);
    } else if (key == "periods") {
      spec.periods = require_int(key, value);
    } else if (key == "policy_period") {
      spec.policy_period = require_int(key, value);
    } else if (key == "alpha") {
      spec.alpha = require_real(key, value);
    } else if (key == "unit_fe_sd") {
      spec.unit_fe_sd = require_real(key, value);
    } else if (key == "period_fe_sd") {
      spec.period_fe_sd = require_real(key, value);
    } else if (key == "noise_sd") {
      spec.noise_sd = require_real(key, value);
    } else if (key == "ar1_rho") {
      spec.ar1_rho = require_real(key, value);
    } else if (key == "beta_true") {
      if (value.is_number()) {
        spec.beta_true = {value.get<double>()};
      } else if (value.is_array()) {
        spec.beta_true.clear();
        for (const auto& v : value)
          spec.beta_true.push_back(require_real(key, v));
      } else {
        throw ConfigError("spec key 'beta_true' must be a number or array");
      }
    } else if (key == "dose_pool") {
      if (!value.is_array())
        throw ConfigError("spec key 'dose_pool' must be an array");
      spec.dose_pool.clear();
      for (const auto& v : value)
        spec.dose_pool.push_back(require_int(key, v));
    } else if (key == "beta_popular") {
      spec.beta_popular = require_real(key, value);
    } else if (key == "popular_share") {
      spec.popular_share = require_real(key, value);
    } else if (key == "decay_rate") {
      spec.decay_rate = require_real(key, value);
    } else if (key == "treated_level_shift") {
      spec.treated_level_shift = require_real(key, value);
    } else if (key == "seed") {
      spec.seed = require_seed(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "' in simulation spec");
    }
  }
  return spec;
}

json sim_spec_json(const SimPanelSpec& s) {
  json j;
  j["n_treated"] = s.n_treated;
  j["n_control"] = s.n_control;
  j["periods"] = s.periods;
  j["policy_period"] = s.policy_period;
  j["alpha"] = s.alpha;
  j["unit_fe_sd"] = s.unit_fe_sd;
  j["period_fe_sd"] = s.period_fe_sd;
  j["noise_sd"] = s.noise_sd;
  j["ar1_rho"] = s.ar1_rho;
  j["beta_true"] = s.beta_true;
  j["dose_pool"] = s.dose_pool;
  j["beta_popular"] = s.beta_popular ? json(*s.beta_popular) : json(nullptr);
  j["popular_share"] = s.popular_share;
  j["decay_rate"] = s.decay_rate;
  j["treated_level_shift"] = s.treated_level_shift;
  j["seed"] = s.seed;
  return j;
}

// --- panel command plumbing ------------------------------------------

struct PanelIo {
  std::string in;
  std::string out;
  int policy_period{0};
  std::string fe{"unit,period"};
  std::string cluster{"cluster"};
  bool allow_unbalanced{false};
};

void add_panel_input_options(CLI::App* cmd, PanelIo& io) {
  cmd->add_option("--in", io.in, "input panel CSV")->required();
  cmd->add_option("--out", io.out, "output path")->required();
  cmd->add_option("--policy-period", io.policy_period,
                  "first post-treatment period")
      ->required();
}

void add_estimator_options(CLI::App* cmd, PanelIo& io) {
  cmd->add_option("--fe", io.fe,
                  "fixed effects, comma-separated from {unit,period,age} "
                  "or 'none'");
  cmd->add_option("--cluster", io.cluster,
                  "cluster variable: 'cluster' (the cluster_id column) or "
                  "'unit'");
  cmd->add_flag("--allow-unbalanced", io.allow_unbalanced,
                "accept units observed in only part of the panel");
}

std::vector<FixedEffect> parse_fixed_effects(const std::string& fe) {
  if (fe == "none") return {};
  std::vector<FixedEffect> out;
  std::size_t start = 0;
  while (start <= fe.size()) {
    const std::size_t comma = fe.find(',', start);
    const std::string part =
        fe.substr(start, comma == std::string::npos ? comma : comma - start);
    if (part == "unit") {
      out.push_back(FixedEffect::Unit);
    } else if (part == "period") {
      out.push_back(FixedEffect::Period);
    } else if (part == "age") {
      out.push_back(FixedEffect::Age);
    } else {
      throw ConfigError("unknown fixed effect '" + part +
                        "', expected unit, period, or age");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

PanelDataset load_panel_for(const PanelIo& io) {
  if (io.cluster != "cluster" && io.cluster != "unit")
    throw ConfigError("--cluster must be 'cluster' or 'unit', got '" +
                      io.cluster + "'");
  PanelDataset ds =
      load_panel_csv(io.in, io.policy_period, io.allow_unbalanced);
  if (io.cluster == "unit")
    for (PanelObservation& obs : ds.observations) obs.cluster_id = obs.unit_id;
  return ds;
}

EstimatorOptions estimator_options(const PanelIo& io) {
  EstimatorOptions opts;
  opts.fixed_effects = parse_fixed_effects(io.fe);
  opts.allow_unbalanced = io.allow_unbalanced;
  return opts;
}

json panel_spec_json(const char* command, const PanelIo& io) {
  json j;
  j["command"] = command;
  j["in"] = io.in;
  j["out"] = io.out;
  j["policy_period"] = io.policy_period;
  j["fe"] = io.fe;
  j["cluster"] = io.cluster;
  j["allow_unbalanced"] = io.allow_unbalanced;
  return j;
}

// --- audio command plumbing ------------------------------------------

std::vector<AudioClip> load_clips(const std::vector<std::string>& paths) {
  std::vector<AudioClip> clips(paths.size());
  parallel_for(paths.size(),
               [&](std::size_t i) { clips[i] = load_wav(paths[i]); });
  return clips;
}

void assign_deciles(std::vector<int>& out, const std::vector<double>& values) {
  // Deciles need at least ten pooled measurements; smaller runs report 0.
  out.assign(values.size(), 0);
  if (values.size() >= 10) {
    const DecileBinning bins = decile_bin(values);
    out = bins.labels;
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "excerptlab: panel simulation, excerpt-effect estimation, and audio "
      "repetition/unpredictability measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // simulate ----------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "simulate", "generate a synthetic panel with known ground truth");
    auto spec_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto truth_path = std::make_shared<std::string>();
    cmd->add_option("--spec", *spec_path, "simulation spec JSON")->required();
    cmd->add_option("--out", *out_path, "output panel CSV")->required();
    cmd->add_option("--truth", *truth_path, "ground-truth JSON");
    cmd->callback([spec_path, out_path, truth_path] {
      std::ifstream in(*spec_path);
      if (!in) throw ConfigError("cannot open spec file '" + *spec_path + "'");
      json parsed;
      try {
        parsed = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("spec file '" + *spec_path + "' is not valid JSON: " +
                          e.what());
      }
      const SimPanelSpec spec = parse_sim_spec(parsed);
      const SimulatedPanel sim = simulate_panel(spec);
      save_panel_csv(*out_path, sim.panel);
      if (!truth_path->empty()) {
        json truth;
        truth["version"] = kVersion;
        json run;
        run["command"] = "simulate";
        run["spec_file"] = *spec_path;
        run["out"] = *out_path;
        run["truth"] = *truth_path;
        run["parameters"] = sim_spec_json(spec);
        truth["spec"] = run;
        truth["beta"] = sim.truth.beta;
        truth["unit_fe"] = sim.truth.unit_fe;
        truth["period_fe"] = sim.truth.period_fe;
        write_json_atomic(*truth_path, truth);
      }
    });
  }

  // estimate ----------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "estimate", "two-way fixed-effects difference-in-differences");
    auto io = std::make_shared<PanelIo>();
    add_panel_input_options(cmd, *io);
    add_estimator_options(cmd, *io);
    cmd->callback([io] {
      const PanelDataset ds = load_panel_for(*io);
      const EstimateResult result = twfe_did(ds, estimator_options(*io));
      write_json_atomic(io->out,
                        excerptlab::cli::result_json(
                            panel_spec_json("estimate", *io), result));
    });
  }

  // event-study -------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "event-study", "dynamic effects by event time, plot-ready CSV");
    auto io = std::make_shared<PanelIo>();
    auto opts = std::make_shared<EventStudyOptions>();
    auto json_path = std::make_shared<std::string>();
    add_panel_input_options(cmd, *io);
    add_estimator_options(cmd, *io);
    cmd->add_option("--reference", opts->reference_k,
                    "omitted event time (default -1)");
    cmd->add_option("--kmin", opts->k_min, "earliest event time");
    cmd->add_option("--kmax", opts->k_max, "latest event time");
    cmd->add_option("--json", *json_path, "also write the full result JSON");
    cmd->callback([io, opts, json_path] {
      const PanelDataset ds = load_panel_for(*io);
      opts->base = estimator_options(*io);
      const EstimateResult result = event_study(ds, *opts);
      write_file_atomic(io->out, excerptlab::cli::bin_table_csv(result, "k="));
      if (!json_path->empty()) {
        json spec = panel_spec_json("event-study", *io);
        spec["reference"] = opts->reference_k;
        spec["kmin"] = opts->k_min;
        spec["kmax"] = opts->k_max;
        spec["json"] = *json_path;
        write_json_atomic(*json_path,
                          excerptlab::cli::result_json(spec, result));
      }
    });
  }

  // dose-response -----------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "dose-response", "per-decile treatment effects, plot-ready CSV");
    auto io = std::make_shared<PanelIo>();
    auto reference = std::make_shared<int>(1);
    auto json_path = std::make_shared<std::string>();
    add_panel_input_options(cmd, *io);
    add_estimator_options(cmd, *io);
    cmd->add_option("--reference", *reference,
                    "omitted dose decile (default 1)");
    cmd->add_option("--json", *json_path, "also write the full result JSON");
    cmd->callback([io, reference, json_path] {
      const PanelDataset ds = load_panel_for(*io);
      const EstimateResult result =
          dose_response(ds, *reference, estimator_options(*io));
      write_file_atomic(io->out,
                        excerptlab::cli::bin_table_csv(result, "decile="));
      if (!json_path->empty()) {
        json spec = panel_spec_json("dose-response", *io);
        spec["reference"] = *reference;
        spec["json"] = *json_path;
        write_json_atomic(*json_path,
                          excerptlab::cli::result_json(spec, result));
      }
    });
  }

  // did-m -------------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "did-m", "heterogeneity-robust switcher contrast at the policy step");
    auto io = std::make_shared<PanelIo>();
    add_panel_input_options(cmd, *io);
    cmd->add_flag("--allow-unbalanced", io->allow_unbalanced,
                  "accept units observed in only part of the panel");
    cmd->callback([io] {
      const PanelDataset ds =
          load_panel_csv(io->in, io->policy_period, io->allow_unbalanced);
      const EstimateResult result = did_m(ds);
      json spec;
      spec["command"] = "did-m";
      spec["in"] = io->in;
      spec["out"] = io->out;
      spec["policy_period"] = io->policy_period;
      spec["allow_unbalanced"] = io->allow_unbalanced;
      write_json_atomic(io->out, excerptlab::cli::result_json(spec, result));
    });
  }

  // sdid --------------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "sdid", "synthetic difference-in-differences with jackknife SE");
    auto io = std::make_shared<PanelIo>();
    auto zeta_scale = std::make_shared<double>(1.0);
    add_panel_input_options(cmd, *io);
    cmd->add_option("--zeta-scale", *zeta_scale,
                    "multiplier on the default unit-weight regularization");
    cmd->callback([io, zeta_scale] {
      const PanelDataset ds = load_panel_csv(io->in, io->policy_period, false);
      SdidOptions opts;
      opts.zeta_scale = *zeta_scale;
      const SdidResult result = synthetic_did(ds, opts);
      json spec;
      spec["command"] = "sdid";
      spec["in"] = io->in;
      spec["out"] = io->out;
      spec["policy_period"] = io->policy_period;
      spec["zeta_scale"] = *zeta_scale;
      json out = excerptlab::cli::result_json(spec, result.estimate);
      json weights;
      weights["zeta"] = result.weights.zeta;
      weights["control_units"] = result.weights.control_units;
      weights["omega"] = std::vector<double>(
          result.weights.omega.data(),
          result.weights.omega.data() + result.weights.omega.size());
      weights["pre_periods"] = result.weights.pre_periods;
      weights["lambda"] = std::vector<double>(
          result.weights.lambda.data(),
          result.weights.lambda.data() + result.weights.lambda.size());
      out["weights"] = weights;
      write_json_atomic(io->out, out);
    });
  }

  // align -------------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "align", "locate an excerpt inside a full recording");
    auto excerpt = std::make_shared<std::string>();
    auto recording = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--excerpt", *excerpt, "excerpt WAV")->required();
    cmd->add_option("--recording", *recording, "full recording WAV")
        ->required();
    cmd->add_option("--out", *out_path, "output JSON (default stdout)");
    cmd->callback([excerpt, recording, out_path] {
      const AudioClip e = load_wav(*excerpt);
      const AudioClip r = load_wav(*recording);
      const AlignmentResult result = cross_correlate(e, r);
      json out;
      out["version"] = kVersion;
      out["spec"] = {{"command", "align"},
                     {"excerpt", *excerpt},
                     {"recording", *recording}};
      out["offset_s"] = result.offset_s;
      out["offset_samples"] = result.offset_samples;
      out["peak_corr"] = result.peak_corr;
      out["runner_up_corr"] = result.runner_up_corr;
      emit_json(*out_path, out);
    });
  }

  // measure-repetition ------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "measure-repetition",
        "encoded length of each WAV under a lossless codec");
    auto in_dir = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto codec_name = std::make_shared<std::string>("lzw");
    auto standard_only = std::make_shared<bool>(false);
    cmd->add_option("--in", *in_dir, "directory of WAV files")->required();
    cmd->add_option("--out", *out_path, "output CSV")->required();
    cmd->add_option("--codec", *codec_name, "codec: lzw or rle");
    cmd->add_flag("--standard-lengths-only", *standard_only,
                  "keep only clips near the 30 s and 90 s standard lengths");
    cmd->callback([in_dir, out_path, codec_name, standard_only] {
      Codec codec;
      if (*codec_name == "lzw") {
        codec = lzw_codec();
      } else if (*codec_name == "rle") {
        codec = rle_binary_codec();
      } else {
        throw ConfigError("--codec must be 'lzw' or 'rle', got '" +
                          *codec_name + "'");
      }
      std::vector<std::string> paths = wav_files_sorted(*in_dir);
      std::vector<AudioClip> clips = load_clips(paths);
      if (*standard_only) {
        std::vector<std::string> kept_paths;
        std::vector<AudioClip> kept_clips;
        for (std::size_t i = 0; i < clips.size(); ++i) {
          if (is_standard_preview_duration(clips[i].duration_s())) {
            kept_paths.push_back(paths[i]);
            kept_clips.push_back(std::move(clips[i]));
          }
        }
        if (kept_paths.empty())
          throw DataError("no clips in '" + *in_dir +
                          "' are near the standard excerpt lengths");
        paths = std::move(kept_paths);
        clips = std::move(kept_clips);
      }
      std::vector<EncodedLengthReport> reports(clips.size());
      parallel_for(clips.size(), [&](std::size_t i) {
        reports[i] = encoded_length(clips[i], codec,
                                    excerptlab::cli::unit_id_from_path(paths[i]));
      });
      std::vector<double> normalized;
      normalized.reserve(reports.size());
      for (const auto& r : reports) normalized.push_back(r.normalized);
      std::vector<int> deciles;
      assign_deciles(deciles, normalized);
      std::string csv = "unit_id,codec,payload_bytes,duration_s,normalized,decile\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        csv += r.unit_id + "," + r.codec + "," +
               std::to_string(r.payload_bytes) + "," +
               format_double(r.duration_s) + "," + format_double(r.normalized) +
               "," + std::to_string(deciles[i]) + "\n";
      }
      write_file_atomic(*out_path, csv);
    });
  }

  // measure-perplexity ------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "measure-perplexity",
        "sequence-model surprise of each WAV under a trained token model");
    auto train_dir = std::make_shared<std::string>();
    auto score_dir = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto model_out = std::make_shared<std::string>();
    auto model_in = std::make_shared<std::string>();
    auto vocab = std::make_shared<int>(64);
    auto order = std::make_shared<int>(3);
    auto alpha = std::make_shared<double>(0.1);
    auto seed = std::make_shared<std::uint64_t>(7);
    cmd->add_option("--train", *train_dir, "training corpus directory");
    cmd->add_option("--score", *score_dir, "directory of WAVs to score")
        ->required();
    cmd->add_option("--out", *out_path, "output CSV")->required();
    cmd->add_option("--vocab", *vocab, "codebook size per stream");
    cmd->add_option("--order", *order, "model context length");
    cmd->add_option("--alpha", *alpha, "add-alpha smoothing");
    cmd->add_option("--seed", *seed, "quantizer training seed");
    cmd->add_option("--model", *model_out, "persist the trained model here");
    cmd->add_option("--load-model", *model_in,
                    "score with a previously saved model instead of training");
    cmd->callback([train_dir, score_dir, out_path, model_out, model_in, vocab,
                   order, alpha, seed] {
      if (train_dir->empty() == model_in->empty())
        throw ConfigError(
            "exactly one of --train and --load-model must be given");
      ArModel model;
      if (!model_in->empty()) {
        model = load_model(*model_in);
      } else {
        const std::vector<std::string> paths = wav_files_sorted(*train_dir);
        const std::vector<AudioClip> corpus = load_clips(paths);
        QuantizerTrainingOptions qopts;
        qopts.vocab_size = *vocab;
        qopts.seed = *seed;
        Quantizer quantizer =
            train_quantizer(std::span<const AudioClip>(corpus), qopts);
        model = train_ar_model(std::move(quantizer),
                               std::span<const AudioClip>(corpus), *order,
                               *alpha);
      }
      if (!model_out->empty()) save_model(model, *model_out);
      const std::vector<std::string> paths = wav_files_sorted(*score_dir);
      const std::vector<AudioClip> clips = load_clips(paths);
      std::vector<PerplexityReport> reports(clips.size());
      parallel_for(clips.size(), [&](std::size_t i) {
        reports[i] = log_perplexity(model, clips[i],
                                    excerptlab::cli::unit_id_from_path(paths[i]));
      });
      std::vector<double> values;
      values.reserve(reports.size());
      for (const auto& r : reports) values.push_back(r.log_perplexity);
      std::vector<int> deciles;
      assign_deciles(deciles, values);
      std::string csv =
          "unit_id,log_perplexity,tokens_scored,per_token_mean,decile\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        csv += r.unit_id + "," + format_double(r.log_perplexity) + "," +
               std::to_string(r.tokens_scored) + "," +
               format_double(r.per_token_mean) + "," +
               std::to_string(deciles[i]) + "\n";
      }
      write_file_atomic(*out_path, csv);
    });
  }

  // demand ------------------------------------------------------------
  {
    auto cmd = app.add_subcommand(
        "demand", "stylized purchase probability and comparative statics");
    auto params = std::make_shared<DemandParams>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--p", params->p, "public signal in (0,1)")->required();
    cmd->add_option("--theta", params->theta, "excerpt share in (0,1]")
        ->required();
    cmd->add_option("--tau", params->tau, "purchase threshold in (0,1)")
        ->required();
    cmd->add_option("--out", *out_path, "output JSON (default stdout)");
    cmd->callback([params, out_path] {
      const double d = demand(*params);
      json out;
      out["version"] = kVersion;
      out["spec"] = {{"command", "demand"},
                     {"p", params->p},
                     {"theta", params->theta},
                     {"tau", params->tau}};
      out["demand"] = d;
      try {
        const DemandComparativeStatics cs = demand_comparative_statics(*params);
        out["comparative_statics"] = {
            {"d_demand_d_theta", cs.d_demand_d_theta},
            {"d2_demand_d_theta_d_p", cs.d2_demand_d_theta_d_p}};
      } catch (const ConfigError&) {
        // Clamped regime: demand is flat here and the interior
        // derivatives do not apply.
        out["comparative_statics"] = nullptr;
      }
      emit_json(*out_path, out);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"type", "config"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", {{"type", "config"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << json{{"error", {{"type", "data"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  }
  return 0;
}
