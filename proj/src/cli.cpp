#include "infomax/cli.hpp"

#include "infomax/baselines.hpp"
#include "infomax/io.hpp"
#include "infomax/oracle.hpp"
#include "infomax/pipeline.hpp"
#include "infomax/scoring.hpp"
#include "infomax/simgraph.hpp"
#include "infomax/solver.hpp"

#include <charconv>
#include <ostream>

#include "CLI11.hpp"

namespace infomax::cli {

namespace {

using nlohmann::ordered_json;

std::optional<double> parse_temperature(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(value > 0.0))
    throw InputError("--temperature must be 'auto' or a positive number, got '" + text + "'");
  return value;
}

ordered_json temperature_json(const std::optional<double>& t) {
  return t ? ordered_json(*t) : ordered_json("auto");
}

struct BudgetOptions {
  double ratio = 0.0;
  Index budget = 0;
  CLI::Option* ratio_opt = nullptr;
  CLI::Option* budget_opt = nullptr;

  void add(CLI::App& app) {
    ratio_opt = app.add_option("--ratio", ratio, "Fraction of samples to keep, in (0, 1)");
    budget_opt = app.add_option("--budget", budget, "Number of samples to keep");
    ratio_opt->excludes(budget_opt);
  }
  void apply(PipelineConfig& config) const {
    if (*ratio_opt) config.ratio = ratio;
    if (*budget_opt) config.budget = budget;
  }
};

ScoreVector constant_scores(Index n) { return ScoreVector(Eigen::VectorXd::Constant(n, 0.5), true); }

int cmd_knn(const std::string& embeddings_path, const KnnParams& params, const std::string& out_path) {
  const auto embeddings = io::read_embeddings(embeddings_path);
  const auto sim = build_knn_similarity(l2_normalize(embeddings), params);
  io::write_similarity(out_path, sim);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"InfoMax coreset selection"};
  app.require_subcommand(1);

  // knn
  auto* knn_cmd = app.add_subcommand("knn", "Build the symmetric kNN similarity table");
  std::string knn_embeddings, knn_out;
  KnnParams knn_params;
  bool knn_no_clamp = false;
  knn_cmd->add_option("--embeddings", knn_embeddings)->required();
  knn_cmd->add_option("--k", knn_params.k, "Neighbors per sample")->capture_default_str();
  knn_cmd->add_flag("--no-clamp", knn_no_clamp, "Keep negative cosine similarities");
  knn_cmd->add_option("--out", knn_out)->required();

  // score ssp
  auto* score_cmd = app.add_subcommand("score", "Compute intra-sample scores");
  score_cmd->require_subcommand(1);
  auto* ssp_cmd = score_cmd->add_subcommand("ssp", "Distance to k-means centroid");
  std::string ssp_embeddings, ssp_out;
  KMeansParams ssp_params;
  ssp_cmd->add_option("--embeddings", ssp_embeddings)->required();
  ssp_cmd->add_option("--clusters", ssp_params.clusters)->required();
  ssp_cmd->add_option("--seed", ssp_params.seed)->capture_default_str();
  ssp_cmd->add_option("--max-iters", ssp_params.max_iters)->capture_default_str();
  ssp_cmd->add_option("--tol", ssp_params.tol)->capture_default_str();
  ssp_cmd->add_option("--out", ssp_out)->required();

  // select
  auto* select_cmd = app.add_subcommand("select", "Run the InfoMax selection pipeline");
  std::string sel_embeddings, sel_scores, sel_out, sel_temperature = "auto";
  PipelineConfig sel_config;
  BudgetOptions sel_budget;
  std::uint64_t sel_seed = 0;
  Index sel_clusters = 0;
  bool sel_no_clamp = false;
  bool sel_verbose = false;
  select_cmd->add_option("--embeddings", sel_embeddings)->required();
  select_cmd->add_option("--scores", sel_scores, "index,score table; SSP scores are used when absent");
  sel_budget.add(*select_cmd);
  select_cmd->add_option("--alpha", sel_config.solver.alpha)->capture_default_str();
  select_cmd->add_option("--k", sel_config.knn.k)->capture_default_str();
  select_cmd->add_flag("--no-clamp", sel_no_clamp);
  select_cmd->add_option("--iters", sel_config.solver.iters)->capture_default_str();
  select_cmd->add_option("--partitions", sel_config.partitions)->capture_default_str();
  select_cmd->add_option("--temperature", sel_temperature, "'auto' = max(1, p/10), or a positive number")
      ->capture_default_str();
  select_cmd->add_option("--jitter", sel_config.solver.jitter_eps)->capture_default_str();
  select_cmd->add_option("--seed", sel_seed)->capture_default_str();
  select_cmd->add_option("--clusters", sel_clusters, "k-means clusters for SSP scores");
  select_cmd->add_flag("--verbose", sel_verbose, "Log one line per solver iteration");
  select_cmd->add_option("--out", sel_out)->required();

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "Run a reference pruning method");
  std::string base_method, base_embeddings, base_scores, base_similarity, base_out;
  BaselineSpec base_spec;
  BudgetOptions base_budget;
  Index base_k = 5;
  double base_alpha = 0.3;
  base_cmd->add_option("--method", base_method, "random|top_score|k_center|moderate|ccs|d2_greedy")
      ->required();
  base_cmd->add_option("--seed", base_spec.seed)->capture_default_str();
  base_cmd->add_option("--embeddings", base_embeddings);
  base_cmd->add_option("--scores", base_scores);
  base_cmd->add_option("--similarity", base_similarity, "row,col,weight table (else built from embeddings)");
  base_budget.add(*base_cmd);
  base_cmd->add_option("--k", base_k)->capture_default_str();
  base_cmd->add_option("--alpha", base_alpha, "Pairwise weight used to report the objective")
      ->capture_default_str();
  base_cmd->add_option("--bins", base_spec.bins)->capture_default_str();
  base_cmd->add_option("--gamma", base_spec.gamma)->capture_default_str();
  base_cmd->add_option("--out", base_out)->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum on a small instance");
  std::string orc_scores, orc_similarity;
  Index orc_budget = 0;
  double orc_alpha = 0.3;
  OracleLimit orc_limit;
  oracle_cmd->add_option("--scores", orc_scores)->required();
  oracle_cmd->add_option("--similarity", orc_similarity)->required();
  oracle_cmd->add_option("--budget", orc_budget)->required();
  oracle_cmd->add_option("--alpha", orc_alpha)->capture_default_str();
  oracle_cmd->add_option("--max-combinations", orc_limit.max_combinations)->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Metrics for an existing selection");
  std::string ev_selection, ev_embeddings, ev_scores, ev_out;
  Index ev_k = 5;
  double ev_alpha = 0.3;
  eval_cmd->add_option("--selection", ev_selection)->required();
  eval_cmd->add_option("--embeddings", ev_embeddings)->required();
  eval_cmd->add_option("--scores", ev_scores)->required();
  eval_cmd->add_option("--k", ev_k)->capture_default_str();
  eval_cmd->add_option("--alpha", ev_alpha)->capture_default_str();
  eval_cmd->add_option("--out", ev_out)->required();

  auto report = [&](int code, std::string_view kind, std::string_view message) {
    err << ordered_json{{"error", kind}, {"code", code}, {"message", message}}.dump() << "\n";
    return code;
  };

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report(kInvalidArgument, "usage", e.what());
  }

  try {
    if (*knn_cmd) {
      knn_params.clamp_negative = !knn_no_clamp;
      return cmd_knn(knn_embeddings, knn_params, knn_out);
    }

    if (*ssp_cmd) {
      const auto embeddings = io::read_embeddings(ssp_embeddings);
      io::write_scores(ssp_out, ssp_scores(embeddings, ssp_params));
      return kOk;
    }

    if (*select_cmd) {
      sel_budget.apply(sel_config);
      sel_config.knn.clamp_negative = !sel_no_clamp;
      sel_config.solver.temperature = parse_temperature(sel_temperature);
      sel_config.solver.seed = sel_seed;
      sel_config.seed = sel_seed;
      // Validate arguments before touching the (possibly large) inputs.
      sel_config.solver.validate();
      if (sel_config.ratio.has_value() == sel_config.budget.has_value())
        throw InputError("exactly one of --ratio or --budget is required");
      if (sel_config.ratio && !(*sel_config.ratio > 0.0 && *sel_config.ratio < 1.0))
        throw InputError("--ratio must lie in (0, 1)");
      if (sel_config.partitions < 1) throw InputError("--partitions must be >= 1");
      if (sel_config.knn.k < 1) throw InputError("--k must be >= 1");

      const auto embeddings = io::read_embeddings(sel_embeddings);
      std::optional<ScoreVector> scores;
      if (!sel_scores.empty()) {
        scores = io::read_scores(sel_scores);
        sel_config.score_source = ScoreSource::external;
      } else {
        if (sel_clusters < 1) throw InputError("--clusters is required when --scores is absent");
        sel_config.score_source = ScoreSource::ssp;
        sel_config.kmeans.clusters = sel_clusters;
        sel_config.kmeans.seed = sel_seed;
      }
      const PipelineOutput result = run_pipeline(sel_config, embeddings, scores);
      if (sel_verbose)
        for (std::size_t t = 0; t < result.result.trace.size(); ++t)
          err << "iter " << (t + 1) << " l1_diff " << result.result.trace[t] << "\n";

      io::SelectionFile file;
      file.selected = result.result.selected;
      file.objective = result.result.objective;
      file.trace = result.result.trace;
      file.params = {
          {"method", "infomax"},
          {"embeddings", sel_embeddings},
          {"scores", sel_scores.empty() ? ordered_json(nullptr) : ordered_json(sel_scores)},
          {"score_source", sel_config.score_source == ScoreSource::ssp ? "ssp" : "external"},
          {"n", embeddings.n()},
          {"budget", static_cast<Index>(file.selected.size())},
          {"ratio", sel_config.ratio ? ordered_json(*sel_config.ratio) : ordered_json(nullptr)},
          {"alpha", sel_config.solver.alpha},
          {"k", sel_config.knn.k},
          {"clamp_negative", sel_config.knn.clamp_negative},
          {"iters", sel_config.solver.iters},
          {"partitions", sel_config.partitions},
          {"partition_budgets", result.partition_budgets},
          {"temperature", temperature_json(sel_config.solver.temperature)},
          {"jitter", sel_config.solver.jitter_eps},
          {"seed", sel_seed},
          {"clusters", sel_config.score_source == ScoreSource::ssp ? ordered_json(sel_clusters)
                                                                   : ordered_json(nullptr)},
      };
      file.metrics = io::to_json(result.metrics);
      io::write_selection(sel_out, file);
      return kOk;
    }

    if (*base_cmd) {
      base_spec.method = parse_baseline_method(base_method);
      PipelineConfig budget_config;
      base_budget.apply(budget_config);

      std::optional<EmbeddingMatrix> embeddings;
      if (!base_embeddings.empty()) embeddings = io::read_embeddings(base_embeddings);
      std::optional<ScoreVector> raw;
      if (!base_scores.empty()) raw = io::read_scores(base_scores);
      if (!embeddings && !raw) throw InputError("baseline needs --embeddings and/or --scores");
      const Index n = embeddings ? embeddings->n() : raw->n();
      if (embeddings && raw && raw->n() != n) throw InputError("score count does not match embeddings");
      if (!raw && base_spec.method != BaselineMethod::k_center && base_spec.method != BaselineMethod::random)
        throw InputError(std::string(to_string(base_spec.method)) + " requires --scores");
      if (base_spec.method == BaselineMethod::k_center && !embeddings)
        throw InputError("k_center requires --embeddings");

      SparseSimilarity sim = SparseSimilarity::empty(n);
      if (!base_similarity.empty()) {
        sim = io::read_similarity(base_similarity, n);
      } else if (embeddings && n > 1) {
        sim = build_knn_similarity(l2_normalize(*embeddings), KnnParams{std::min(base_k, n - 1), true});
      } else if (base_spec.method == BaselineMethod::d2_greedy) {
        throw InputError("d2_greedy requires --similarity or --embeddings");
      }

      const Index p = budget_config.resolve_budget(n);
      const SelectionProblem problem(raw ? normalize_scores(*raw) : constant_scores(n), std::move(sim), p,
                                     base_alpha);
      const auto result = baseline_select(base_spec, problem, embeddings ? &*embeddings : nullptr);

      io::SelectionFile file;
      file.selected = result.selected;
      file.objective = result.objective;
      file.params = {
          {"method", to_string(base_spec.method)},
          {"embeddings", base_embeddings.empty() ? ordered_json(nullptr) : ordered_json(base_embeddings)},
          {"scores", base_scores.empty() ? ordered_json(nullptr) : ordered_json(base_scores)},
          {"similarity", base_similarity.empty() ? ordered_json(nullptr) : ordered_json(base_similarity)},
          {"n", n},
          {"budget", p},
          {"alpha", base_alpha},
          {"k", base_k},
          {"bins", base_spec.bins},
          {"gamma", base_spec.gamma},
          {"seed", base_spec.seed},
      };
      if (embeddings && raw) file.metrics = io::to_json(selection_metrics(result.selected, *embeddings, *raw, result.objective));
      io::write_selection(base_out, file);
      return kOk;
    }

    if (*oracle_cmd) {
      const auto raw = io::read_scores(orc_scores);
      auto sim = io::read_similarity(orc_similarity, raw.n());
      const SelectionProblem problem(normalize_scores(raw), std::move(sim), orc_budget, orc_alpha);
      const auto best = brute_force_optimum(problem, orc_limit);
      out << ordered_json{{"selected", best.selected},
                          {"objective", best.objective},
                          {"evaluated", best.evaluated}}
                 .dump()
          << "\n";
      return kOk;
    }

    if (*eval_cmd) {
      const auto selection = io::read_selection(ev_selection);
      const auto embeddings = io::read_embeddings(ev_embeddings);
      const auto raw = io::read_scores(ev_scores);
      if (raw.n() != embeddings.n()) throw InputError("score count does not match embeddings");
      const Index n = embeddings.n();
      SparseSimilarity sim = n > 1 ? build_knn_similarity(l2_normalize(embeddings),
                                                          KnnParams{std::min(ev_k, n - 1), true})
                                   : SparseSimilarity::empty(n);
      const SelectionProblem problem(normalize_scores(raw), std::move(sim),
                                     static_cast<Index>(std::max<std::size_t>(selection.selected.size(), 1)),
                                     ev_alpha);
      const auto metrics = evaluate_selection(selection.selected, embeddings, problem, raw);
      io::write_file_atomic(ev_out, io::to_json(metrics).dump(2) + "\n");
      std::filesystem::path hist = ev_out;
      hist.replace_extension(".histogram.csv");
      io::write_file_atomic(hist, io::format_histogram_csv(metrics));
      return kOk;
    }
  } catch (const FormatError& e) {
    return report(kIoError, "io", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report(kIoError, "io", e.what());
  } catch (const CapacityError& e) {
    return report(kCapacity, "capacity", e.what());
  } catch (const InputError& e) {
    return report(kInvalidArgument, "input", e.what());
  } catch (const NumericDomainError& e) {
    return report(kInvalidArgument, "numeric", e.what());
  }
  return report(kInvalidArgument, "usage", "no subcommand given");
}

}  // namespace infomax::cli
