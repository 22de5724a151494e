// casediar/commands.hpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CASEDIAR_COMMANDS_HPP_
#define CASEDIAR_COMMANDS_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casediar/pipeline.hpp"

namespace casediar {
namespace pipeline {

namespace fs = std::filesystem;

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline void cmd_synth(const RunConfig& rc) {
  fs::create_directories(rc.corpus_dir);
  const synthdata::SynthCorpus corpus =
      synthdata::generate_corpus(rc.synth, rc.heldout_fraction);
  synthdata::write_corpus(corpus, rc.corpus_dir);
  for (const std::string& w : corpus.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << "corpus: " << rc.corpus_dir << " (" << corpus.split.train.size() << " train, "
            << corpus.split.dev.size() << " dev, " << corpus.split.eval.size()
            << " eval meetings)\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

inline std::string checkpoint_path(const std::string& out_dir, const std::string& name) {
  return out_dir + "/checkpoints/" + name + ".ckpt";
}

inline ndiff::ParamStore train_one_embedder(const CorpusReader& reader, const RunConfig& rc,
                                            const std::string& system,
                                            models::TrainReport* report_out = nullptr) {
  const models::EmbedderConfig cfg = system_config(rc, system);
  const TrainingSets sets = build_training_windows(reader, rc, cfg);
  ndiff::ParamStore ps = models::init_embedder_params(
      cfg, sets.n_speakers, sets.n_phones, synthdata::derive_seed(rc.seed, fnv1a(system)));
  const models::TrainReport report = models::train_embedder(
      sets.train, sets.heldout, cfg, ps, rc.embedder_train,
      synthdata::derive_seed(rc.seed, fnv1a(system) ^ 0x7261ull));
  ps.meta["system"] = system;
  ps.meta["epochs"] = std::to_string(rc.embedder_train.epochs);
  if (report_out) *report_out = report;
  return ps;
}

inline void cmd_train(const RunConfig& rc) {
  const CorpusReader reader(rc.corpus_dir, rc.embedder.word_dim);
  fs::create_directories(rc.out_dir + "/checkpoints");
  fs::create_directories(rc.out_dir + "/reports");
  for (const std::string& system : rc.systems) {
    const std::string path = checkpoint_path(rc.out_dir, system);
    if (rc.resume && fs::exists(path)) {
      // continue the epoch count from the stored parameters
      ndiff::ParamStore ps = ndiff::load_checkpoint(path);
      const std::size_t done =
          ps.meta.count("epochs") ? std::stoul(ps.meta.at("epochs")) : 0;
      const models::EmbedderConfig cfg = system_config(rc, system);
      const TrainingSets sets = build_training_windows(reader, rc, cfg);
      const models::TrainReport report = models::train_embedder(
          sets.train, sets.heldout, cfg, ps, rc.embedder_train,
          synthdata::derive_seed(rc.seed, fnv1a(system) ^ 0x7261ull ^ done));
      ps.meta["epochs"] = std::to_string(done + rc.embedder_train.epochs);
      ndiff::save_checkpoint(ps, path);
      write_text_file(rc.out_dir + "/reports/" + system + ".txt", report.to_string());
    } else {
      models::TrainReport report;
      ndiff::ParamStore ps = train_one_embedder(reader, rc, system, &report);
      ndiff::save_checkpoint(ps, path);
      write_text_file(rc.out_dir + "/reports/" + system + ".txt", report.to_string());
    }
    std::cout << "trained " << system << "\n";
  }
  if (rc.with_vad) {
    const auto [rows, labels] = build_vad_data(reader, rc);
    ndiff::ParamStore ps =
        models::init_vad_params(rc.vad, synthdata::derive_seed(rc.seed, fnv1a("vad")));
    const models::TrainReport report = models::train_vad(
        rows, labels, rc.vad, ps, rc.vad_train, synthdata::derive_seed(rc.seed, 0xadull));
    ndiff::save_checkpoint(ps, checkpoint_path(rc.out_dir, "vad"));
    write_text_file(rc.out_dir + "/reports/vad.txt", report.to_string());
    std::cout << "trained vad\n";
  }
  if (rc.with_cpd) {
    const CpdData data = build_cpd_data(reader, rc);
    ndiff::ParamStore ps =
        models::init_cpd_params(rc.cpd, synthdata::derive_seed(rc.seed, fnv1a("cpd")));
    const models::TrainReport report = models::train_cpd(
        data.examples, rc.cpd, ps, rc.cpd_train, synthdata::derive_seed(rc.seed, 0xcdull));
    ndiff::save_checkpoint(ps, checkpoint_path(rc.out_dir, "cpd"));
    write_text_file(rc.out_dir + "/reports/cpd.txt", report.to_string());
    std::cout << "trained cpd\n";
  }
}

// ---------------------------------------------------------------------------
// diarise
// ---------------------------------------------------------------------------

inline ndiff::ParamStore require_checkpoint(const std::string& out_dir,
                                            const std::string& name, Regime regime) {
  const std::string path = checkpoint_path(out_dir, name);
  if (!fs::exists(path)) {
    throw std::runtime_error(std::string(regime_name(regime)) + " regime requires the '" +
                             name + "' checkpoint at " + path);
  }
  return ndiff::load_checkpoint(path);
}

inline std::string diarise_dir(const RunConfig& rc, const std::string& system, Regime regime) {
  return rc.out_dir + "/diarise/" + system + "/" + regime_name(regime);
}

inline void cmd_diarise(const RunConfig& rc) {
  const CorpusReader reader(rc.corpus_dir, rc.embedder.word_dim);
  const models::EmbedderConfig cfg = system_config(rc, rc.system);
  const ndiff::ParamStore system_ps = require_checkpoint(rc.out_dir, rc.system, rc.regime);
  std::optional<ndiff::ParamStore> baseline_ps, vad_ps, cpd_ps;
  Checkpoints ckpt;
  ckpt.system = &system_ps;
  if (rc.regime == Regime::kAutomaticHypothesis) {
    baseline_ps = require_checkpoint(rc.out_dir, "baseline", rc.regime);
    vad_ps = require_checkpoint(rc.out_dir, "vad", rc.regime);
    cpd_ps = require_checkpoint(rc.out_dir, "cpd", rc.regime);
    ckpt.baseline = &*baseline_ps;
    ckpt.vad = &*vad_ps;
    ckpt.cpd = &*cpd_ps;
  }
  const std::string dir = diarise_dir(rc, rc.system, rc.regime);
  fs::create_directories(dir);
  for (const std::string& mid : reader.manifest().meeting_set(rc.meeting_set)) {
    const MeetingDiarisation d =
        diarise_meeting(reader, rc, rc.system, cfg, ckpt, mid, rc.regime, rc.error_rate,
                        rc.cluster_percentile);
    write_text_file(dir + "/" + mid + ".rttm", scoring::emit_rttm(d.final_records));
    if (rc.regime == Regime::kAutomaticHypothesis) {
      write_text_file(dir + "/" + mid + ".pass1.rttm", scoring::emit_rttm(d.pass1));
    }
    std::cout << "diarised " << mid << " -> " << dir << "/" << mid << ".rttm\n";
  }
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOutcome {
  scoring::DerReport aggregate;
  std::map<std::string, scoring::DerReport> per_meeting;
  std::string table;
  std::string kv;
};

inline ScoreOutcome score_directory(const CorpusReader& reader, const std::string& hyp_dir,
                                    const std::string& meeting_set, double collar) {
  ScoreOutcome out;
  const auto meetings = reader.manifest().meeting_set(meeting_set);
  const std::set<std::string> known(meetings.begin(), meetings.end());
  std::vector<scoring::DerReport> reports;
  std::ostringstream table, kv;
  table << "meeting                         MS      FA     SER     DER  scored_s\n";
  for (const std::string& mid : meetings) {
    const std::string path = hyp_dir + "/" + mid + ".rttm";
    if (!fs::exists(path)) {
      throw std::runtime_error("score: missing hypothesis for meeting '" + mid + "' at " +
                               path);
    }
    const auto hyp = scoring::parse_rttm(read_text_file(path));
    for (const auto& r : hyp) {
      if (!known.count(r.meeting)) {
        throw std::runtime_error("score: hypothesis meeting id '" + r.meeting +
                                 "' not present in the reference set");
      }
    }
    const auto ref = reader.reference_rttm(mid, Consumer::kScorer);
    const scoring::DerReport rep = scoring::compute_der(ref, hyp, collar);
    out.per_meeting[mid] = rep;
    reports.push_back(rep);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-28s %6.2f  %6.2f  %6.2f  %6.2f  %8.2f\n", mid.c_str(),
                  rep.ms, rep.fa, rep.ser, rep.der, rep.scored_time);
    table << buf;
    kv << scoring::format_der_kv(rep, mid);
  }
  out.aggregate = scoring::aggregate_reports(reports);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s %6.2f  %6.2f  %6.2f  %6.2f  %8.2f\n", "TOTAL",
                out.aggregate.ms, out.aggregate.fa, out.aggregate.ser, out.aggregate.der,
                out.aggregate.scored_time);
  table << buf;
  kv << scoring::format_der_kv(out.aggregate, "TOTAL");
  out.table = table.str();
  out.kv = kv.str();
  return out;
}

inline ScoreOutcome cmd_score(const RunConfig& rc, const std::string& hyp_dir) {
  const CorpusReader reader(rc.corpus_dir, rc.embedder.word_dim);
  ScoreOutcome out = score_directory(reader, hyp_dir, rc.meeting_set, rc.collar);
  fs::create_directories(rc.out_dir);
  write_text_file(rc.out_dir + "/score_report.txt", out.table + "\n" + out.kv);
  std::cout << out.table;
  return out;
}

// ---------------------------------------------------------------------------
// experiment: the desk-scale comparison protocol
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::map<std::string, double> kv;
  std::string report;
};

namespace detail {

struct SeedContext {
  std::unique_ptr<CorpusReader> reader;
  std::map<std::string, ndiff::ParamStore> embedders;
  std::optional<ndiff::ParamStore> vad, cpd;
  std::map<std::string, features::FrameMatrix> feats;
  std::map<std::string, std::vector<scoring::RttmRecord>> refs;
  std::map<std::string, std::vector<features::FrameSpan>> ref_spans;
  std::map<std::string, content::AlignmentSet> ref_aligns;
  std::map<std::string, std::vector<features::FrameSpan>> auto_spans;
};

inline std::string rate_key(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rate%.2f", rate);
  return buf;
}

inline double aggregate_ser(const std::map<std::string, std::vector<scoring::RttmRecord>>& refs,
                            const std::vector<std::string>& meetings,
                            const std::map<std::string, std::vector<scoring::RttmRecord>>& hyps,
                            double collar, double* ms = nullptr, double* fa = nullptr) {
  std::vector<scoring::DerReport> reports;
  for (const std::string& mid : meetings) {
    reports.push_back(scoring::compute_der(refs.at(mid), hyps.at(mid), collar));
  }
  const scoring::DerReport agg = scoring::aggregate_reports(reports);
  if (ms) *ms = agg.ms;
  if (fa) *fa = agg.fa;
  return agg.ser;
}

}  // namespace detail

/// Runs every configured system across the configured regimes and error
/// rates, tuning the clustering percentile per system on the dev split and
/// reporting dev/eval SER per condition, seed-averaged.
inline ExperimentResult run_experiment(const RunConfig& rc0) {
  ExperimentResult result;
  std::map<std::string, std::vector<double>> collected;  // metric -> per-seed values
  std::ostringstream log;

  const bool wants_automatic =
      std::find(rc0.exp_regimes.begin(), rc0.exp_regimes.end(), "automatic-hypothesis") !=
      rc0.exp_regimes.end();

  for (const std::uint64_t seed : rc0.exp_seeds) {
    RunConfig rc = rc0;
    rc.seed = seed;
    rc.synth.seed = seed;
    const std::string seed_dir = rc0.out_dir + "/exp/seed" + std::to_string(seed);
    rc.corpus_dir = seed_dir + "/corpus";
    rc.out_dir = seed_dir;
    fs::create_directories(rc.corpus_dir);

    const synthdata::SynthCorpus corpus =
        synthdata::generate_corpus(rc.synth, rc.heldout_fraction);
    synthdata::write_corpus(corpus, rc.corpus_dir);

    detail::SeedContext ctx;
    ctx.reader = std::make_unique<CorpusReader>(rc.corpus_dir, rc.embedder.word_dim);
    const synthdata::Manifest& manifest = ctx.reader->manifest();

    std::vector<std::string> systems = rc.exp_systems;
    if (wants_automatic &&
        std::find(systems.begin(), systems.end(), "baseline") == systems.end()) {
      systems.insert(systems.begin(), "baseline");
    }
    for (const std::string& system : systems) {
      ctx.embedders.emplace(system, train_one_embedder(*ctx.reader, rc, system));
    }
    if (wants_automatic) {
      const auto [rows, labels] = build_vad_data(*ctx.reader, rc);
      ndiff::ParamStore vps =
          models::init_vad_params(rc.vad, synthdata::derive_seed(rc.seed, fnv1a("vad")));
      models::train_vad(rows, labels, rc.vad, vps, rc.vad_train,
                        synthdata::derive_seed(rc.seed, 0xadull));
      ctx.vad = std::move(vps);
      const CpdData cdata = build_cpd_data(*ctx.reader, rc);
      ndiff::ParamStore cps =
          models::init_cpd_params(rc.cpd, synthdata::derive_seed(rc.seed, fnv1a("cpd")));
      models::train_cpd(cdata.examples, rc.cpd, cps, rc.cpd_train,
                        synthdata::derive_seed(rc.seed, 0xcdull));
      ctx.cpd = std::move(cps);
    }

    std::vector<std::string> scored_meetings = manifest.dev;
    scored_meetings.insert(scored_meetings.end(), manifest.eval.begin(),
                           manifest.eval.end());
    for (const std::string& mid : scored_meetings) {
      ctx.feats.emplace(mid, ctx.reader->features(mid, Consumer::kPipeline));
      ctx.refs.emplace(mid, ctx.reader->reference_rttm(mid, Consumer::kPipeline));
      std::vector<features::FrameSpan> spans;
      for (const auto& rs : segments_from_rttm(ctx.refs.at(mid), manifest.frame_period)) {
        spans.push_back(rs.span);
      }
      ctx.ref_spans.emplace(mid, std::move(spans));
      ctx.ref_aligns.emplace(mid,
                             ctx.reader->reference_alignments(mid, Consumer::kPipeline));
      if (wants_automatic) {
        ctx.auto_spans.emplace(
            mid, automatic_segments(ctx.feats.at(mid), rc, *ctx.vad, *ctx.cpd));
      }
    }

    for (const std::string& system : rc.exp_systems) {
      const models::EmbedderConfig cfg = system_config(rc, system);
      const ndiff::ParamStore& ps = ctx.embedders.at(system);
      for (const std::string& regime_s : rc.exp_regimes) {
        const Regime regime = parse_regime(regime_s);
        std::vector<double> rates;
        if (regime == Regime::kReference || !cfg.levels.any()) {
          rates = {0.0};
        } else {
          rates = rc.exp_error_rates;
        }
        for (const double rate : rates) {
          // extraction per meeting, reused across the percentile grid
          std::map<std::string, Extraction> extractions;
          for (const std::string& mid : scored_meetings) {
            const auto& segments = regime == Regime::kAutomaticHypothesis
                                       ? ctx.auto_spans.at(mid)
                                       : ctx.ref_spans.at(mid);
            Tensor2 cm;
            const Tensor2* cm_ptr = nullptr;
            if (cfg.levels.any()) {
              const std::uint64_t hyp_seed =
                  synthdata::derive_seed(rc.seed, fnv1a(mid) ^ 0x517eull);
              if (regime == Regime::kReference) {
                cm = content_matrix(ctx.ref_aligns.at(mid),
                                    ctx.feats.at(mid).num_frames(), cfg, *ctx.reader);
              } else if (regime == Regime::kManualHypothesis) {
                const auto& ref_set = ctx.ref_aligns.at(mid);
                const content::AlignmentSet hyp = content::simulate_hypothesis(
                    ref_set.word, &ref_set.phone, &ref_set.character, ctx.reader->lexicon(),
                    segments, rate, hyp_seed, rc.retime);
                cm = content_matrix(hyp, ctx.feats.at(mid).num_frames(), cfg, *ctx.reader);
              } else {
                const content::AlignmentSet hyp = content::simulate_hypothesis(
                    ctx.ref_aligns.at(mid).word, nullptr, nullptr, ctx.reader->lexicon(),
                    segments, rate, hyp_seed, content::HypRetime::kSubdivide);
                cm = content_matrix(hyp, ctx.feats.at(mid).num_frames(), cfg, *ctx.reader);
              }
              cm_ptr = &cm;
            }
            extractions.emplace(mid, extract_meeting(ctx.feats.at(mid), segments, ps, cfg,
                                                     cm_ptr, mid));
          }

          auto ser_at = [&](double p, const std::vector<std::string>& meetings, double* ms,
                            double* fa) {
            std::map<std::string, std::vector<scoring::RttmRecord>> hyps;
            for (const std::string& mid : meetings) {
              hyps[mid] = cluster_and_assign(
                  extractions.at(mid), p, rc.k_max,
                  synthdata::derive_seed(rc.seed, fnv1a(mid) ^ fnv1a(system)), mid,
                  manifest.frame_period);
            }
            return detail::aggregate_ser(ctx.refs, meetings, hyps, rc.collar, ms, fa);
          };

          double best_p = rc.p_grid.empty() ? rc.cluster_percentile : rc.p_grid.front();
          double best_dev = std::numeric_limits<double>::infinity();
          for (const double p : rc.p_grid) {
            const double dev_ser = ser_at(p, manifest.dev, nullptr, nullptr);
            if (dev_ser < best_dev - 1e-12) {
              best_dev = dev_ser;
              best_p = p;
            }
          }
          if (!std::isfinite(best_dev)) best_dev = ser_at(best_p, manifest.dev, nullptr, nullptr);
          double eval_ms = 0.0, eval_fa = 0.0;
          const double eval_ser = ser_at(best_p, manifest.eval, &eval_ms, &eval_fa);

          const std::string base = system + "." + regime_s + "." + detail::rate_key(rate);
          collected[base + ".dev.SER"].push_back(best_dev);
          collected[base + ".eval.SER"].push_back(eval_ser);
          collected[base + ".p"].push_back(best_p);
          result.kv["seed" + std::to_string(seed) + "." + base + ".dev.SER"] = best_dev;
          result.kv["seed" + std::to_string(seed) + "." + base + ".eval.SER"] = eval_ser;
          if (regime == Regime::kAutomaticHypothesis) {
            collected[base + ".eval.MS"].push_back(eval_ms);
            collected[base + ".eval.FA"].push_back(eval_fa);
          }
        }
      }
    }
  }

  for (const auto& [key, values] : collected) {
    double sum = 0.0;
    for (double v : values) sum += v;
    result.kv["mean." + key] = sum / static_cast<double>(values.size());
  }

  // relative SER reductions vs the baseline, per regime and split
  for (const std::string& regime_s : rc0.exp_regimes) {
    const std::string base_key = "mean.baseline." + regime_s + ".rate0.00.";
    if (!result.kv.count(base_key + "dev.SER")) continue;
    for (const std::string& system : rc0.exp_systems) {
      if (system == "baseline") continue;
      for (const char* split : {"dev", "eval"}) {
        for (const double rate : rc0.exp_error_rates) {
          const std::string key = "mean." + system + "." + regime_s + "." +
                                  detail::rate_key(rate) + "." + split + ".SER";
          if (!result.kv.count(key)) continue;
          const double base = result.kv.at(base_key + split + ".SER");
          if (base > 0.0) {
            result.kv["rel." + system + "." + regime_s + "." + detail::rate_key(rate) + "." +
                      split] = 100.0 * (base - result.kv.at(key)) / base;
          }
        }
      }
    }
  }

  // robustness trend over error rates, seed-averaged, per content system
  for (const std::string& system : rc0.exp_systems) {
    for (const std::string& regime_s : rc0.exp_regimes) {
      if (regime_s == "reference") continue;
      std::vector<double> msers;
      for (const double rate : rc0.exp_error_rates) {
        const std::string key =
            "mean." + system + "." + regime_s + "." + detail::rate_key(rate) + ".eval.SER";
        if (result.kv.count(key)) msers.push_back(result.kv.at(key));
      }
      if (msers.size() >= 2) {
        bool ok = true;
        for (std::size_t i = 1; i < msers.size(); ++i) {
          if (msers[i] + 1e-9 < msers[i - 1]) ok = false;
        }
        result.kv["trend." + system + "." + regime_s + ".nondecreasing"] = ok ? 1.0 : 0.0;
      }
    }
  }

  // report text
  std::ostringstream rep;
  rep << "seeds:";
  for (auto s : rc0.exp_seeds) rep << " " << s;
  rep << "\n\n";
  for (const std::string& regime_s : rc0.exp_regimes) {
    rep << "== regime: " << regime_s << " (seed-averaged %SER, dev/eval) ==\n";
    char buf[256];
    rep << "system          ";
    std::vector<double> rates = regime_s == "reference" ? std::vector<double>{0.0}
                                                        : rc0.exp_error_rates;
    for (double r : rates) {
      std::snprintf(buf, sizeof(buf), "  %s-dev %s-eval", detail::rate_key(r).c_str(),
                    detail::rate_key(r).c_str());
      rep << buf;
    }
    rep << "\n";
    for (const std::string& system : rc0.exp_systems) {
      std::snprintf(buf, sizeof(buf), "%-15s ", system.c_str());
      rep << buf;
      for (double r : rates) {
        const std::string key =
            "mean." + system + "." + regime_s + "." + detail::rate_key(r) + ".";
        const std::string dev_key = key + "dev.SER";
        const std::string eval_key = key + "eval.SER";
        const std::string fb = "mean." + system + "." + regime_s + ".rate0.00.";
        const double dev =
            result.kv.count(dev_key) ? result.kv.at(dev_key) : result.kv.at(fb + "dev.SER");
        const double ev =
            result.kv.count(eval_key) ? result.kv.at(eval_key) : result.kv.at(fb + "eval.SER");
        std::snprintf(buf, sizeof(buf), "  %8.2f %9.2f", dev, ev);
        rep << buf;
      }
      rep << "\n";
    }
    rep << "\n";
  }
  rep << "== relative SER reduction vs baseline (percent, positive is better) ==\n";
  for (const auto& [key, value] : result.kv) {
    if (key.rfind("rel.", 0) == 0) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%-60s %8.2f\n", key.c_str(), value);
      rep << buf;
    }
  }
  rep << "\n== metrics ==\n";
  for (const auto& [key, value] : result.kv) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s = %.6f\n", key.c_str(), value);
    rep << buf;
  }
  rep << log.str();
  result.report = rep.str();
  return result;
}

inline ExperimentResult cmd_experiment(const RunConfig& rc) {
  fs::create_directories(rc.out_dir);
  ExperimentResult result = run_experiment(rc);
  write_text_file(rc.out_dir + "/experiment_report.txt", result.report);
  std::cout << result.report;
  return result;
}

}  // namespace pipeline
}  // namespace casediar

#endif  // CASEDIAR_COMMANDS_HPP_
