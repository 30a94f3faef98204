#include "gsi/cli.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gsi/error.hpp"
#include "gsi/evaluation.hpp"
#include "gsi/graph_construction.hpp"
#include "gsi/graph_io.hpp"
#include "gsi/graph_learning.hpp"
#include "gsi/interpolation.hpp"
#include "gsi/pipeline.hpp"
#include "gsi/synth.hpp"
#include "random.hpp"

namespace gsi {
namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GSI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

struct SpectralOptions {
  double band_low = 2.0;
  double band_high = 40.0;
  double segment_s = 1.0;
  double overlap = 0.5;

  SpectralEstimationConfig config(double rate) const {
    SpectralEstimationConfig cfg;
    cfg.band_low = band_low;
    cfg.band_high = band_high;
    cfg.overlap = overlap;
    cfg.segment_length = static_cast<std::size_t>(std::lround(segment_s * rate));
    return cfg;
  }
};

void add_spectral_options(CLI::App* sub, SpectralOptions& o) {
  sub->add_option("--band-low", o.band_low, "Lower band edge for WPLI (Hz)")->capture_default_str();
  sub->add_option("--band-high", o.band_high, "Upper band edge for WPLI (Hz)")->capture_default_str();
  sub->add_option("--segment", o.segment_s, "Cross-spectrum segment length (s)")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--overlap", o.overlap, "Segment overlap fraction")->capture_default_str()->check(CLI::Range(0.0, 0.999));
}

void add_learn_options(CLI::App* sub, LearnConfig& cfg) {
  sub->add_option("--steps", cfg.steps, "Gradient steps")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--step-size", cfg.step_size, "Initial step size")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", cfg.batch_size, "Trials per step")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--mask-fraction", cfg.mask_fraction, "Share of electrodes masked per step")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--val-fraction", cfg.val_fraction, "Share of trials held out for validation")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.99));
  sub->add_option("--ridge", cfg.ridge, "Relative ridge on the missing block")->capture_default_str();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph signal interpolation of missing channels"};
  app.name("gsi");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::string stage = "setup";
  std::function<void()> action;
  std::uint64_t seed = default_seed();
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed (default: $GSI_SEED or 0)")->capture_default_str();
  };

  // graph <spatial|wpli|learn|finetune>
  CLI::App* graph_cmd = app.add_subcommand("graph", "Build or learn a graph");
  graph_cmd->require_subcommand(1);

  std::string montage_path, graph_path, epochs_path, out_path, trace_path;
  double radius = 0.0;
  SpectralOptions spectral;
  LearnConfig learn_cfg;

  CLI::App* spatial_cmd = graph_cmd->add_subcommand("spatial", "Binary radius graph from electrode positions");
  spatial_cmd->add_option("--montage", montage_path, "Montage JSON")->required()->check(CLI::ExistingFile);
  spatial_cmd->add_option("--radius", radius, "Edge radius on the unit sphere")->required()->check(CLI::PositiveNumber);
  spatial_cmd->add_option("--out", out_path, "Output graph JSON")->required();
  add_seed(spatial_cmd);
  spatial_cmd->callback([&] {
    action = [&] {
      stage = "graph spatial: load montage";
      const Montage m = load_montage(montage_path);
      stage = "graph spatial: build";
      save_graph(out_path, spatial_graph(m, radius));
    };
  });

  CLI::App* wpli_cmd = graph_cmd->add_subcommand("wpli", "Spatial graph weighted by WPLI");
  wpli_cmd->add_option("--montage", montage_path, "Montage JSON")->required()->check(CLI::ExistingFile);
  wpli_cmd->add_option("--radius", radius, "Edge radius on the unit sphere")->required()->check(CLI::PositiveNumber);
  wpli_cmd->add_option("--epochs", epochs_path, "EPB1 epochs covering every montage electrode")->required()->check(CLI::ExistingFile);
  wpli_cmd->add_option("--out", out_path, "Output graph JSON")->required();
  add_spectral_options(wpli_cmd, spectral);
  add_seed(wpli_cmd);
  wpli_cmd->callback([&] {
    action = [&] {
      stage = "graph wpli: load inputs";
      const Montage m = load_montage(montage_path);
      const EpochSet data = conform_channels(load_epb1(epochs_path), m);
      stage = "graph wpli: estimate WPLI";
      const Matrix w = wpli_matrix(data, spectral.config(data.rate()));
      save_graph(out_path, wpli_weighted_spatial(spatial_graph(m, radius), w));
    };
  });

  std::string init_graph_path;
  CLI::App* learn_cmd = graph_cmd->add_subcommand("learn", "Learn a graph by gradient descent on masked reconstruction");
  learn_cmd->add_option("--montage", montage_path, "Montage JSON (warm start from its radius graph)")->check(CLI::ExistingFile);
  learn_cmd->add_option("--radius", radius, "Warm-start radius")->check(CLI::PositiveNumber);
  learn_cmd->add_option("--init-graph", init_graph_path, "Warm-start graph JSON instead of a radius graph")->check(CLI::ExistingFile);
  learn_cmd->add_option("--epochs", epochs_path, "Training epochs (EPB1)")->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--out", out_path, "Output graph JSON")->required();
  learn_cmd->add_option("--trace", trace_path, "Loss trace CSV (step,loss,val_r2)");
  add_learn_options(learn_cmd, learn_cfg);
  add_seed(learn_cmd);
  learn_cmd->callback([&] {
    if (init_graph_path.empty() && (montage_path.empty() || radius <= 0.0))
      throw CLI::ValidationError("graph learn", "needs --init-graph, or --montage with --radius");
    action = [&] {
      stage = "graph learn: load inputs";
      const Graph init = init_graph_path.empty() ? spatial_graph(load_montage(montage_path), radius) : load_graph(init_graph_path);
      const EpochSet data = load_epb1(epochs_path);
      stage = "graph learn: descent";
      learn_cfg.seed = seed;
      const LearnResult r = learn_graph(data, init, learn_cfg);
      save_graph(out_path, r.graph);
      if (!trace_path.empty()) write_text_file(trace_path, r.trace.to_csv());
    };
  });

  std::string epochs_b_path;
  CLI::App* finetune_cmd = graph_cmd->add_subcommand("finetune", "Fine-tune a learned graph towards a second dataset");
  finetune_cmd->add_option("--graph", graph_path, "Graph learned on dataset A")->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--epochs-a", epochs_path, "Dataset A epochs (all graph electrodes)")->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--epochs-b", epochs_b_path, "Dataset B epochs (subset of A's electrodes)")->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--alpha", learn_cfg.finetune_weight, "Weight of dataset B's loss")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  finetune_cmd->add_option("--out", out_path, "Output graph JSON")->required();
  finetune_cmd->add_option("--trace", trace_path, "Loss trace CSV (step,loss,val_r2)");
  add_learn_options(finetune_cmd, learn_cfg);
  add_seed(finetune_cmd);
  finetune_cmd->callback([&] {
    action = [&] {
      stage = "graph finetune: load inputs";
      const Graph g = load_graph(graph_path);
      const EpochSet a = load_epb1(epochs_path);
      const EpochSet b = load_epb1(epochs_b_path);
      stage = "graph finetune: descent";
      learn_cfg.seed = seed;
      const LearnResult r = finetune_graph(g, a, b, learn_cfg);
      save_graph(out_path, r.graph);
      if (!trace_path.empty()) write_text_file(trace_path, r.trace.to_csv());
    };
  });

  // interpolate
  std::vector<std::string> mask_names;
  std::string method = "graph";
  CLI::App* interp_cmd = app.add_subcommand("interpolate", "Replace masked channels by interpolation");
  interp_cmd->add_option("--graph", graph_path, "Graph JSON (method graph)")->check(CLI::ExistingFile);
  interp_cmd->add_option("--montage", montage_path, "Montage JSON (method spherical)")->check(CLI::ExistingFile);
  interp_cmd->add_option("--epochs", epochs_path, "Input EPB1")->required()->check(CLI::ExistingFile);
  interp_cmd->add_option("--mask", mask_names, "Channels to reconstruct")->required()->delimiter(',');
  interp_cmd->add_option("--method", method, "graph or spherical")->capture_default_str()->check(CLI::IsMember({"graph", "spherical"}));
  interp_cmd->add_option("--out", out_path, "Output EPB1")->required();
  add_seed(interp_cmd);
  interp_cmd->callback([&] {
    if (method == "graph" && graph_path.empty()) throw CLI::ValidationError("interpolate", "--method graph needs --graph");
    if (method == "spherical" && montage_path.empty() && graph_path.empty())
      throw CLI::ValidationError("interpolate", "--method spherical needs --montage or --graph");
    action = [&] {
      stage = "interpolate: load inputs";
      EpochSet data = load_epb1(epochs_path);
      const auto& names = data.channel_names();
      for (const std::string& m : mask_names)
        if (!data.channel_index(m)) throw invalid_input("mask channel '" + m + "' is not in the input");

      stage = "interpolate: solve";
      if (method == "graph") {
        const Graph g = load_graph(graph_path);
        std::vector<std::size_t> input_of(g.size(), static_cast<std::size_t>(-1));
        for (std::size_t c = 0; c < names.size(); ++c) input_of[g.montage().index_of(names[c])] = c;
        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const bool absent = input_of[i] == static_cast<std::size_t>(-1);
          const bool masked = !absent && std::find(mask_names.begin(), mask_names.end(), names[input_of[i]]) != mask_names.end();
          if (absent || masked) missing.push_back(i);
        }
        const MaskSpec mask(g.size(), missing);
        const InterpolationOperator op(build_laplacian(g), mask);
        Matrix obs(static_cast<Eigen::Index>(mask.observed().size()), static_cast<Eigen::Index>(data.n_samples()));
        for (std::size_t t = 0; t < data.n_trials(); ++t) {
          auto x = data.trial(t);
          for (std::size_t k = 0; k < mask.observed().size(); ++k) obs.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(input_of[mask.observed()[k]]));
          const Matrix rec = op.reconstruct_missing(obs);
          for (std::size_t k = 0; k < mask.missing().size(); ++k) {
            const std::size_t c = input_of[mask.missing()[k]];
            if (c != static_cast<std::size_t>(-1)) x.row(static_cast<Eigen::Index>(c)) = rec.row(static_cast<Eigen::Index>(k));
          }
        }
      } else {
        const Montage full = montage_path.empty() ? load_graph(graph_path).montage() : load_montage(montage_path);
        const Montage m = full.select(names);
        const MaskSpec mask = MaskSpec::from_names(m, mask_names);
        const SphericalSplineOperator op(m, mask);
        Matrix obs(static_cast<Eigen::Index>(mask.observed().size()), static_cast<Eigen::Index>(data.n_samples()));
        for (std::size_t t = 0; t < data.n_trials(); ++t) {
          auto x = data.trial(t);
          for (std::size_t k = 0; k < mask.observed().size(); ++k) obs.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(mask.observed()[k]));
          const Matrix rec = op.reconstruct_missing(obs);
          for (std::size_t k = 0; k < mask.missing().size(); ++k) x.row(static_cast<Eigen::Index>(mask.missing()[k])) = rec.row(static_cast<Eigen::Index>(k));
        }
      }
      stage = "interpolate: write";
      save_epb1(out_path, data);
    };
  });

  // homogenize
  std::vector<std::string> targets;
  std::string targets_from;
  std::optional<double> target_rate, band_low, band_high, window_start, window_duration;
  bool align = false;
  CLI::App* homog_cmd = app.add_subcommand("homogenize", "Preprocess a dataset and map it onto the union montage of a graph");
  homog_cmd->add_option("--graph", graph_path, "Graph over the union montage")->required()->check(CLI::ExistingFile);
  homog_cmd->add_option("--epochs", epochs_path, "Input EPB1")->required()->check(CLI::ExistingFile);
  homog_cmd->add_option("--out", out_path, "Output EPB1")->required();
  homog_cmd->add_option("--targets", targets, "Output electrodes (default: the whole union)")->delimiter(',');
  homog_cmd->add_option("--targets-from", targets_from, "Take output electrodes from this EPB1 file's channels")->check(CLI::ExistingFile);
  homog_cmd->add_option("--rate", target_rate, "Resample to this rate (Hz)")->check(CLI::PositiveNumber);
  homog_cmd->add_option("--band-low", band_low, "Band-pass lower edge (Hz)")->check(CLI::PositiveNumber);
  homog_cmd->add_option("--band-high", band_high, "Band-pass upper edge (Hz)")->check(CLI::PositiveNumber);
  homog_cmd->add_option("--window-start", window_start, "Window start after trial onset (s)")->check(CLI::NonNegativeNumber);
  homog_cmd->add_option("--window-duration", window_duration, "Window length (s)")->check(CLI::PositiveNumber);
  homog_cmd->add_flag("--align", align, "Euclidean alignment of the recorded channels (before mapping)");
  add_seed(homog_cmd);
  homog_cmd->callback([&] {
    if (band_low.has_value() != band_high.has_value())
      throw CLI::ValidationError("homogenize", "--band-low and --band-high go together");
    if (window_duration.has_value() != window_start.has_value() && !window_duration)
      throw CLI::ValidationError("homogenize", "--window-start needs --window-duration");
    if (!targets.empty() && !targets_from.empty())
      throw CLI::ValidationError("homogenize", "use either --targets or --targets-from");
    action = [&] {
      stage = "homogenize: load inputs";
      const Graph g = load_graph(graph_path);
      EpochSet data = load_epb1(epochs_path);
      if (!targets_from.empty()) targets = load_epb1(targets_from).channel_names();
      if (targets.empty()) targets = g.montage().names();
      if (target_rate) {
        stage = "homogenize: resample";
        data = resample(data, *target_rate);
      }
      if (band_low) {
        stage = "homogenize: bandpass";
        data = bandpass(data, *band_low, *band_high);
      }
      if (window_duration) {
        stage = "homogenize: window";
        data = window(data, window_start.value_or(0.0), *window_duration);
      }
      // Interpolated channels are linear in the recorded ones, so alignment
      // has to happen before the union mapping.
      if (align) {
        stage = "homogenize: euclidean alignment";
        data = euclidean_align(data);
      }
      stage = "homogenize: map to union";
      const std::vector<std::vector<std::string>> sets{g.montage().names()};
      const UnionMontage um = make_union_montage(g.montage(), sets);
      data = map_to_union(data, um, g, targets);
      stage = "homogenize: write";
      save_epb1(out_path, data);
    };
  });

  // synth
  std::size_t nodes = 0, trials = 100, samples = 160, neighbors = 8;
  double tau = 1.0, snr_db = std::numeric_limits<double>::infinity(), rate = 160.0;
  std::string graph_out, montage_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate smooth graph signals");
  synth_cmd->add_option("--nodes", nodes, "Generate a hidden graph with this many electrodes")->check(CLI::Range(4, 100000));
  synth_cmd->add_option("--graph", graph_path, "Use this ground-truth graph instead")->check(CLI::ExistingFile);
  synth_cmd->add_option("--neighbors", neighbors, "Neighbours per node of a generated graph")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--trials", trials, "Trials")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--samples", samples, "Samples per trial")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--tau", tau, "Smoothness")->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--snr-db", snr_db, "Signal-to-noise ratio in dB (inf: noiseless)")->capture_default_str();
  synth_cmd->add_option("--rate", rate, "Nominal sampling rate (Hz)")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", out_path, "Output EPB1 (default synth.epb)");
  synth_cmd->add_option("--graph-out", graph_out, "Write the ground-truth graph JSON here");
  synth_cmd->add_option("--montage-out", montage_out, "Write the montage JSON here");
  add_seed(synth_cmd);
  synth_cmd->callback([&] {
    if ((nodes == 0) == graph_path.empty()) throw CLI::ValidationError("synth", "give exactly one of --nodes and --graph");
    if (out_path.empty()) out_path = "synth.epb";
    action = [&] {
      stage = "synth: graph";
      const Graph g = graph_path.empty()
                          ? random_neighbor_graph(hemisphere_montage(nodes), detail::derive_seed(seed, 7), neighbors)
                          : load_graph(graph_path);
      stage = "synth: generate";
      const EpochSet data = synth_generate({g, trials, samples, tau, snr_db, seed, rate});
      stage = "synth: write";
      save_epb1(out_path, data);
      if (!graph_out.empty()) save_graph(graph_out, g);
      if (!montage_out.empty()) save_montage(montage_out, g.montage());
    };
  });

  // eval-recon
  std::vector<std::string> methods{"learned", "spatial", "spherical"};
  std::vector<std::size_t> missing_list;
  std::size_t repetitions = 10;
  double train_fraction = 0.5;
  std::string learned_path;
  std::size_t eval_nodes = 16, eval_trials = 200, eval_samples = 64;
  double eval_snr = 10.0;
  CLI::App* eval_cmd = app.add_subcommand("eval-recon", "Masked-reconstruction benchmark");
  eval_cmd->add_option("--epochs", epochs_path, "Data (EPB1); omitted: synthetic data from a hidden graph")->check(CLI::ExistingFile);
  eval_cmd->add_option("--montage", montage_path, "Montage JSON for the data's channels")->check(CLI::ExistingFile);
  eval_cmd->add_option("--graph", graph_path, "Graph JSON for method 'graph' (synthetic default: the hidden graph)")->check(CLI::ExistingFile);
  eval_cmd->add_option("--learned-graph", learned_path, "Use this graph for 'learned' instead of learning one")->check(CLI::ExistingFile);
  eval_cmd->add_option("--methods", methods, "learned,spatial,wpli,spherical,mean,graph")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"learned", "spatial", "wpli", "spherical", "mean", "graph"}));
  eval_cmd->add_option("--missing", missing_list, "Numbers of missing electrodes")->required()->delimiter(',');
  eval_cmd->add_option("--repetitions", repetitions, "Masks per cell")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--radius", radius, "Radius of the spatial graph (synthetic default: 1.2x the connecting radius)")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--train-fraction", train_fraction, "Leading share of trials used to fit graphs")->capture_default_str()->check(CLI::Range(0.05, 0.95));
  eval_cmd->add_option("--nodes", eval_nodes, "Synthetic: electrodes")->capture_default_str()->check(CLI::Range(4, 100000));
  eval_cmd->add_option("--trials", eval_trials, "Synthetic: trials")->capture_default_str()->check(CLI::Range(2, 100000000));
  eval_cmd->add_option("--samples", eval_samples, "Synthetic: samples per trial")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--neighbors", neighbors, "Synthetic: neighbours per node of the hidden graph")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--tau", tau, "Synthetic: smoothness")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--snr-db", eval_snr, "Synthetic: SNR in dB")->capture_default_str();
  eval_cmd->add_option("--out", out_path, "Report CSV (default: stdout)");
  add_learn_options(eval_cmd, learn_cfg);
  add_spectral_options(eval_cmd, spectral);
  add_seed(eval_cmd);
  eval_cmd->callback([&] {
    action = [&] {
      stage = "eval-recon: data";
      EpochSet data;
      std::optional<Montage> montage;
      std::optional<Graph> hidden_graph;
      if (epochs_path.empty()) {
        const Graph hidden = random_neighbor_graph(hemisphere_montage(eval_nodes), detail::derive_seed(seed, 7), neighbors);
        data = synth_generate({hidden, eval_trials, eval_samples, tau, eval_snr, detail::derive_seed(seed, 8), 160.0});
        montage = hidden.montage();
        hidden_graph = hidden;
        if (radius <= 0.0) radius = 1.2 * connecting_radius(*montage);
      } else {
        data = load_epb1(epochs_path);
        if (!montage_path.empty()) {
          montage = load_montage(montage_path).select(data.channel_names());
        } else if (!graph_path.empty()) {
          montage = load_graph(graph_path).montage().select(data.channel_names());
        }
      }
      auto needs = [&](const char* m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
      if (!montage && (needs("spatial") || needs("wpli") || needs("spherical") || (needs("learned") && learned_path.empty())))
        throw invalid_input("methods need electrode positions: pass --montage or --graph");
      if (radius <= 0.0 && (needs("spatial") || needs("wpli") || (needs("learned") && learned_path.empty())))
        throw invalid_input("--radius is required for the spatial, wpli and learned methods");

      const std::size_t n_train = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(data.n_trials()))), 1,
          data.n_trials() > 1 ? data.n_trials() - 1 : 1);
      std::vector<std::size_t> train_idx, test_idx;
      for (std::size_t t = 0; t < data.n_trials(); ++t) (t < n_train ? train_idx : test_idx).push_back(t);
      if (test_idx.empty()) test_idx = train_idx;
      const EpochSet train = data.select_trials(train_idx);
      const EpochSet test = data.select_trials(test_idx);

      std::vector<Interpolator> interp;
      for (const std::string& m : methods) {
        stage = "eval-recon: prepare " + m;
        if (m == "learned") {
          if (!learned_path.empty()) {
            const Graph g = load_graph(learned_path);
            interp.push_back(graph_interpolator(m, g.subgraph(data.channel_names())));
          } else {
            learn_cfg.seed = seed;
            interp.push_back(graph_interpolator(m, learn_graph(train, spatial_graph(*montage, radius), learn_cfg).graph));
          }
        } else if (m == "spatial") {
          interp.push_back(graph_interpolator(m, spatial_graph(*montage, radius)));
        } else if (m == "wpli") {
          const EpochSet conformed = conform_channels(train, *montage);
          interp.push_back(graph_interpolator(
              m, wpli_weighted_spatial(spatial_graph(*montage, radius), wpli_matrix(conformed, spectral.config(train.rate())))));
        } else if (m == "spherical") {
          interp.push_back(spline_interpolator(m, *montage));
        } else if (m == "mean") {
          interp.push_back(mean_interpolator(m));
        } else if (m == "graph") {
          if (graph_path.empty() && !hidden_graph) throw invalid_input("method 'graph' needs --graph");
          interp.push_back(graph_interpolator(m, graph_path.empty() ? *hidden_graph : load_graph(graph_path).subgraph(data.channel_names())));
        }
      }
      stage = "eval-recon: evaluate";
      const EpochSet eval_data = montage ? conform_channels(test, *montage) : test;
      const ReconReport report = eval_masked_reconstruction(eval_data, interp, missing_list, repetitions, seed);
      for (const ReconCell& c : report.cells)
        if (c.failures) err << "gsi: eval-recon: " << c.method << " failed " << c.failures << "x at n_missing=" << c.n_missing << ": " << c.last_error << "\n";
      if (out_path.empty()) {
        out << report.to_csv();
      } else {
        write_text_file(out_path, report.to_csv());
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }
  if (!action) {
    err << app.help();
    return 1;
  }
  try {
    action();
  } catch (const std::exception& e) {
    err << "gsi: error in " << stage << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace gsi
