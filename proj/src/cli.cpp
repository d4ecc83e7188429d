#include "rfsel/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "rfsel/bench.hpp"
#include "rfsel/error.hpp"
#include "rfsel/forest.hpp"
#include "rfsel/parallel.hpp"
#include "rfsel/select.hpp"
#include "rfsel/simd/kernels.hpp"

#ifndef RFSEL_VERSION
#define RFSEL_VERSION "dev"
#endif

namespace rfsel::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out_dir = ".";
};

struct SourceOptions {
  std::string gen;
  std::size_t n = 100;
  std::size_t p = 200;
  double noise_sd = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> replicates;
  std::string csv;
  std::string task = "classification";
  std::string response;
};

struct SelectionOptions {
  std::size_t vi_runs = 50;
  std::size_t vi_ntree = 2000;
  std::string vi_mtry = "p/3";
  std::size_t nested_ntree = 500;
  std::string nested_mtry;
  std::size_t nested_repeats = 25;
  double se_multiplier = 1.0;
  std::size_t curve_min_leaf = 5;
};

struct EvalOptions {
  std::size_t ntree = 500;
  std::string mtry;
};

void add_source_options(CLI::App* sub, SourceOptions& o) {
  sub->add_option("--gen", o.gen, "Generator: toys, friedman1, friedman2, friedman3");
  sub->add_option("--n", o.n, "Generated observations")->capture_default_str();
  sub->add_option("--p", o.p, "Generated variables")->capture_default_str();
  sub->add_option("--noise-sd", o.noise_sd, "Friedman noise sd (default depends on the variant)");
  sub->add_option("--replicate", o.replicates,
                  "Correlated copies as VAR:COUNT:RHO, VAR 1-based; repeatable")
      ->take_all();
  sub->add_option("--csv", o.csv, "Input CSV file (header row, comma-separated)");
  sub->add_option("--task", o.task, "CSV task: classification or regression")->capture_default_str();
  sub->add_option("--response", o.response, "CSV response column");
}

void add_selection_options(CLI::App* sub, SelectionOptions& o) {
  sub->add_option("--vi-runs", o.vi_runs, "Forests averaged for the importance step")->capture_default_str();
  sub->add_option("--vi-ntree", o.vi_ntree, "Trees per importance forest")->capture_default_str();
  sub->add_option("--vi-mtry", o.vi_mtry, "mtry of the importance forests")->capture_default_str();
  sub->add_option("--nested-ntree", o.nested_ntree, "Trees per nested-model forest")->capture_default_str();
  sub->add_option("--nested-mtry", o.nested_mtry, "mtry of nested-model forests (default by task)");
  sub->add_option("--nested-repeats", o.nested_repeats, "Forests averaged per nested model")
      ->capture_default_str();
  sub->add_option("--se-mult", o.se_multiplier, "Interpretation rule: sds above the minimum error")
      ->capture_default_str();
  sub->add_option("--curve-min-leaf", o.curve_min_leaf, "Minimum leaf size of the sd curve tree")
      ->capture_default_str();
}

void add_eval_options(CLI::App* sub, EvalOptions& o) {
  sub->add_option("--eval-ntree", o.ntree, "Trees of the test-error forests")->capture_default_str();
  sub->add_option("--eval-mtry", o.mtry, "mtry of the test-error forests (default by task)");
}

Task::Kind parse_task(const std::string& s) {
  if (s == "classification") return Task::Kind::Classification;
  if (s == "regression") return Task::Kind::Regression;
  throw ConfigError(fmt::format("unknown task '{}' (expected classification or regression)", s));
}

ReplicateSpec parse_replicate(const std::string& text) {
  ReplicateSpec r;
  std::size_t var = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> var >> c1 >> r.count >> c2 >> r.correlation) || c1 != ':' || c2 != ':' || var == 0 || !in.eof()) {
    throw ConfigError(fmt::format("bad replicate spec '{}' (expected VAR:COUNT:RHO with VAR 1-based)", text));
  }
  r.source_variable = var - 1;
  return r;
}

GeneratorSpec generator_spec(const SourceOptions& o) {
  GeneratorSpec g;
  g.kind = parse_generator_kind(o.gen);
  g.n = o.n;
  g.p = o.p;
  if (!std::isnan(o.noise_sd)) g.noise_sd = o.noise_sd;
  for (const auto& r : o.replicates) g.replicates.push_back(parse_replicate(r));
  return g;
}

DataSource data_source(const SourceOptions& o) {
  if (!o.gen.empty() && !o.csv.empty()) throw ConfigError("give either --gen or --csv, not both");
  if (!o.gen.empty()) return generator_spec(o);
  if (o.csv.empty()) throw ConfigError("a data source is required: --gen NAME or --csv PATH");
  if (o.response.empty()) throw ConfigError("--csv needs --response");
  if (!o.replicates.empty()) throw ConfigError("--replicate applies to generated data only");
  return CsvSource{o.csv, parse_task(o.task), o.response};
}

std::optional<MtryExpr> optional_mtry(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return MtryExpr::parse(s);
}

json source_json(const DataSource& s) {
  if (const auto* g = std::get_if<GeneratorSpec>(&s)) {
    json reps = json::array();
    for (const auto& r : g->replicates) {
      reps.push_back({{"variable", r.source_variable + 1}, {"count", r.count}, {"correlation", r.correlation}});
    }
    json j{{"generator", to_string(g->kind)}, {"n", g->n}, {"p", g->p}, {"replicates", reps}};
    j["noise_sd"] = g->noise_sd ? json(*g->noise_sd) : json(nullptr);
    return j;
  }
  const auto& c = std::get<CsvSource>(s);
  return {{"csv", c.path.string()},
          {"task", c.task == Task::Kind::Classification ? "classification" : "regression"},
          {"response", c.response_column}};
}

json metadata_json(const CsvMetadata& m) {
  json cats = json::object();
  for (const auto& [k, v] : m.categorical_codes) cats[k] = v;
  return {{"path", m.path},
          {"response_column", m.response_column},
          {"rows_read", m.rows_read},
          {"rows_dropped", m.rows_dropped},
          {"class_labels", m.class_labels},
          {"categorical_codes", cats}};
}

json forest_json(const ForestConfig& c, std::size_t p, const Task& task) {
  json j{{"ntree", c.ntree}, {"mtry", resolve_mtry(c, p, task)}, {"nodesize", resolve_nodesize(c, task)}};
  j["mtry_expr"] = c.mtry ? json(c.mtry->label()) : json("default");
  return j;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + 1;
  return out;
}

std::vector<std::string> names_of(const Dataset& d, const std::vector<std::size_t>& v) {
  std::vector<std::string> out;
  for (std::size_t i : v) out.push_back(d.feature_names()[i]);
  return out;
}

// Collects output files and writes the run manifest.
class Output {
 public:
  Output(const GlobalOptions& g, std::string command) : dir_(g.out_dir), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError(fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
  }

  void text(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    files_.push_back(name);
  }

  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  template <typename Writer>
  void csv(const std::string& name, Writer&& w) {
    std::ostringstream s;
    w(s);
    text(name, s.str());
  }

  void manifest(const GlobalOptions& g, const json& config, const json& source, double seconds) {
    json m{{"tool", "rfsel"},
           {"version", RFSEL_VERSION},
           {"command", command_},
           {"seed", g.seed},
           {"source", source},
           {"config", config},
           {"outputs", files_}};
    // Everything that may differ between identical runs lives here.
    m["runtime"] = {{"wall_clock_seconds", seconds},
                    {"threads", thread_count()},
                    {"simd", simd::isa_name(simd::active_isa())}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
    if (!out) throw DataError("cannot write manifest.json");
  }

 private:
  fs::path dir_;
  std::string command_;
  std::vector<std::string> files_;
};

SelectionConfig selection_config(const SelectionOptions& o, RngSeed seed) {
  SelectionConfig c;
  c.vi_runs = o.vi_runs;
  c.vi_forest.ntree = o.vi_ntree;
  c.vi_forest.mtry = optional_mtry(o.vi_mtry);
  c.nested_forest.ntree = o.nested_ntree;
  c.nested_forest.mtry = optional_mtry(o.nested_mtry);
  c.nested_repeats = o.nested_repeats;
  c.se_multiplier = o.se_multiplier;
  c.curve_min_leaf = o.curve_min_leaf;
  c.seed = seed;
  return c;
}

json selection_config_json(const SelectionConfig& c, const Dataset& d) {
  json nested{{"ntree", c.nested_forest.ntree}};
  nested["mtry_expr"] = c.nested_forest.mtry ? json(c.nested_forest.mtry->label()) : json("default");
  return {{"vi_runs", c.vi_runs},
          {"vi_forest", forest_json(c.vi_forest, d.num_features(), d.task())},
          {"nested_forest", nested},
          {"nested_repeats", c.nested_repeats},
          {"se_multiplier", c.se_multiplier},
          {"curve_min_leaf", c.curve_min_leaf}};
}

ForestConfig eval_forest(const EvalOptions& o) {
  ForestConfig c;
  c.ntree = o.ntree;
  c.mtry = optional_mtry(o.mtry);
  return c;
}

json selection_json(const SelectionResult& r, const Dataset& d) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"candidate", s.candidate + 1},
                     {"name", d.feature_names()[s.candidate]},
                     {"error", s.error},
                     {"error_sd", s.error_sd},
                     {"accepted", s.accepted}});
  }
  return {{"threshold", r.threshold},
          {"kept", one_based(r.kept)},
          {"kept_names", names_of(d, r.kept)},
          {"argmin_size", r.argmin_size},
          {"interpretation_set", one_based(r.interpretation_set)},
          {"interpretation_names", names_of(d, r.interpretation_set)},
          {"prediction_threshold", r.prediction_threshold},
          {"prediction_set", one_based(r.prediction_set)},
          {"prediction_names", names_of(d, r.prediction_set)},
          {"nested_error_mean", r.nested.mean},
          {"nested_error_sd", r.nested.sd},
          {"steps", steps},
          {"vi_oob_errors", r.report.oob_errors}};
}

void write_selection_curves(Output& out, const SelectionResult& r, const Dataset& d) {
  const auto& names = d.feature_names();
  out.csv("curve_vi.csv", [&](std::ostream& s) {
    s << "rank,variable,name,mean_vi\n";
    for (std::size_t k = 0; k < r.report.ranking.size(); ++k) {
      const std::size_t v = r.report.ranking[k];
      s << fmt::format("{},{},{},{}\n", k + 1, v + 1, names[v], r.report.mean_vi[v]);
    }
  });
  out.csv("curve_vi_sd.csv", [&](std::ostream& s) {
    s << "rank,variable,name,sd_vi,fitted_sd,threshold\n";
    for (std::size_t k = 0; k < r.report.ranking.size(); ++k) {
      const std::size_t v = r.report.ranking[k];
      s << fmt::format("{},{},{},{},{},{}\n", k + 1, v + 1, names[v], r.report.sd_vi[v], r.sd_curve_fit[k],
                       r.threshold);
    }
  });
  out.csv("curve_nested.csv", [&](std::ostream& s) {
    s << "k,variable,name,error_mean,error_sd\n";
    for (std::size_t k = 0; k < r.nested.mean.size(); ++k) {
      const std::size_t v = r.kept[k];
      s << fmt::format("{},{},{},{},{}\n", k + 1, v + 1, names[v], r.nested.mean[k], r.nested.sd[k]);
    }
  });
  out.csv("curve_stepwise.csv", [&](std::ostream& s) {
    s << "step,candidate,name,error_mean,error_sd,accepted\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      const auto& st = r.steps[i];
      s << fmt::format("{},{},{},{},{},{}\n", i + 1, st.candidate + 1, names[st.candidate], st.error, st.error_sd,
                       st.accepted ? 1 : 0);
    }
  });
}

void emit_metadata(Output& out, const LoadedSource& src) {
  if (src.metadata) out.json_file("dataset.json", metadata_json(*src.metadata));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Random forest variable importance and selection"};
  app.set_version_flag("--version", RFSEL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "Output directory")->capture_default_str();

  // gen
  SourceOptions gen_src;
  auto* gen = app.add_subcommand("gen", "Write a generated dataset as CSV with a JSON sidecar");
  add_source_options(gen, gen_src);

  // fit
  SourceOptions fit_src;
  std::size_t fit_ntree = 500, fit_repeats = 10, fit_nodesize = 0;
  std::string fit_mtry;
  bool fit_vi = false, fit_trees = false;
  auto* fit = app.add_subcommand("fit", "Fit forests and report OOB error");
  add_source_options(fit, fit_src);
  fit->add_option("--ntree", fit_ntree, "Trees per forest")->capture_default_str();
  fit->add_option("--mtry", fit_mtry, "Variables per node: number, sqrt, p/3, p, ... (default by task)");
  fit->add_option("--nodesize", fit_nodesize, "Minimum node size to split (0 = default by task)");
  fit->add_option("--repeats", fit_repeats, "Forests averaged")->capture_default_str();
  fit->add_flag("--vi", fit_vi, "Also report permutation importance");
  fit->add_flag("--dump-trees", fit_trees, "Write the first forest's trees as JSON");

  // importance
  SourceOptions imp_src;
  std::vector<std::size_t> imp_ntree{500}, imp_grid_n, imp_grid_p;
  std::vector<std::string> imp_mtry;
  std::size_t imp_runs = 50, imp_top = 16;
  auto* imp = app.add_subcommand("importance", "Permutation importance over repeated forests");
  add_source_options(imp, imp_src);
  imp->add_option("--ntree", imp_ntree, "Trees per forest; several values form a grid")->delimiter(',');
  imp->add_option("--mtry", imp_mtry, "mtry expressions; several values form a grid")->delimiter(',');
  imp->add_option("--grid-n", imp_grid_n, "Generated n values of the grid")->delimiter(',');
  imp->add_option("--grid-p", imp_grid_p, "Generated p values of the grid")->delimiter(',');
  imp->add_option("--runs", imp_runs, "Forests per cell")->capture_default_str();
  imp->add_option("--top", imp_top, "Variables kept in the quantile table")->capture_default_str();

  // select
  SourceOptions sel_src;
  SelectionOptions sel_opts;
  auto* sel = app.add_subcommand("select", "Two-step variable selection");
  add_source_options(sel, sel_src);
  add_selection_options(sel, sel_opts);

  // sweep
  SourceOptions sw_src;
  std::vector<std::string> sw_mtry{"1", "sqrt(p)/2", "sqrt(p)", "2sqrt(p)", "4sqrt(p)",
                                   "p/4", "p/3", "p/2", "3p/4", "p"};
  std::vector<std::size_t> sw_ntree{100, 500, 1000};
  std::size_t sw_repeats = 10, sw_nodesize = 0;
  auto* sw = app.add_subcommand("sweep", "OOB error over an mtry x ntree grid");
  add_source_options(sw, sw_src);
  sw->add_option("--mtry-grid", sw_mtry, "mtry expressions")->delimiter(',')->capture_default_str();
  sw->add_option("--ntree-grid", sw_ntree, "ntree values")->delimiter(',')->capture_default_str();
  sw->add_option("--repeats", sw_repeats, "Forests averaged per cell")->capture_default_str();
  sw->add_option("--nodesize", sw_nodesize, "Minimum node size to split (0 = default by task)");

  // cv
  SourceOptions cv_src;
  SelectionOptions cv_sel;
  EvalOptions cv_eval;
  std::size_t cv_folds = 5;
  auto* cv = app.add_subcommand("cv", "Cross-validated error of the selected variable sets");
  add_source_options(cv, cv_src);
  add_selection_options(cv, cv_sel);
  add_eval_options(cv, cv_eval);
  cv->add_option("--folds", cv_folds, "Number of folds")->capture_default_str();

  // eval
  SourceOptions ev_src;
  SelectionOptions ev_sel;
  EvalOptions ev_eval;
  std::string ev_test_csv;
  auto* ev = app.add_subcommand("eval", "Test error of the selected sets on an independent test set");
  add_source_options(ev, ev_src);
  add_selection_options(ev, ev_sel);
  add_eval_options(ev, ev_eval);
  ev->add_option("--test-csv", ev_test_csv, "Test CSV for a CSV source (generators draw a fresh test set)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  try {
    set_thread_count(global.threads);
    const RngSeed seed{global.seed};

    if (*gen) {
      const DataSource source = data_source(gen_src);
      if (!std::holds_alternative<GeneratorSpec>(source)) throw ConfigError("gen needs --gen");
      const LoadedSource src = load_source(source, seed);
      Output out(global, "gen");
      out.csv("data.csv", [&](std::ostream& s) { write_csv(src.data, s); });
      json side = source_json(source);
      side["seed"] = global.seed;
      side["task"] = to_string(src.data.task());
      side["feature_names"] = src.data.feature_names();
      side["true_variables"] = one_based(src.true_variables);
      side["response_column"] = "y";
      out.json_file("data.json", side);
      out.manifest(global, json::object(), source_json(source), elapsed());
      return 0;
    }

    if (*fit) {
      const DataSource source = data_source(fit_src);
      const LoadedSource src = load_source(source, seed);
      const Dataset& d = src.data;
      if (fit_repeats < 1) throw ConfigError("--repeats must be at least 1");
      ForestConfig cfg;
      cfg.ntree = fit_ntree;
      cfg.mtry = optional_mtry(fit_mtry);
      if (fit_nodesize > 0) cfg.nodesize = fit_nodesize;
      cfg.seed = derive_seed(seed, {stream::kRun});

      Output out(global, "fit");
      emit_metadata(out, src);
      std::vector<double> errors;
      std::vector<std::size_t> never;
      std::vector<std::vector<double>> class_errors;
      std::vector<double> vi_sum(d.num_features(), 0.0);
      for (std::size_t r = 0; r < fit_repeats; ++r) {
        ForestConfig c = cfg;
        c.seed = derive_seed(cfg.seed, {stream::kRun, r});
        const Forest f = fit_forest(d, c);
        errors.push_back(f.oob_error);
        never.push_back(f.never_oob);
        class_errors.push_back(f.per_class_error);
        if (fit_vi) {
          const auto vi = permutation_importance(f, d, 1, derive_seed(cfg.seed, {stream::kImportance, r}));
          for (std::size_t v = 0; v < vi.size(); ++v) vi_sum[v] += vi[v];
        }
        if (fit_trees && r == 0) {
          std::string trees = "[";
          for (std::size_t t = 0; t < f.trees.size(); ++t) {
            if (t > 0) trees += ",\n";
            trees += tree_to_json(f.trees[t]);
          }
          out.text("trees.json", trees + "]\n");
        }
      }
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= static_cast<double>(errors.size());

      json result{{"oob_error_mean", mean},
                  {"oob_error_sd", sample_sd(errors)},
                  {"oob_errors", errors},
                  {"never_oob", never},
                  {"forest", forest_json(cfg, d.num_features(), d.task())},
                  {"repeats", fit_repeats}};
      if (d.task().is_classification()) {
        std::vector<double> per_class(d.task().num_classes, 0.0);
        for (const auto& ce : class_errors) {
          for (std::size_t c = 0; c < ce.size(); ++c) per_class[c] += ce[c] / static_cast<double>(fit_repeats);
        }
        result["per_class_errors"] = per_class;
      }
      if (fit_vi) {
        for (double& v : vi_sum) v /= static_cast<double>(fit_repeats);
        result["vi"] = vi_sum;
        out.csv("vi.csv", [&](std::ostream& s) {
          s << "variable,name,vi\n";
          for (std::size_t v = 0; v < vi_sum.size(); ++v) {
            s << fmt::format("{},{},{}\n", v + 1, d.feature_names()[v], vi_sum[v]);
          }
        });
      }
      out.csv("fit_runs.csv", [&](std::ostream& s) {
        s << "run,oob_error,never_oob\n";
        for (std::size_t r = 0; r < errors.size(); ++r) s << fmt::format("{},{},{}\n", r + 1, errors[r], never[r]);
      });
      out.json_file("fit.json", result);
      out.manifest(global, {{"ntree", fit_ntree}, {"mtry", fit_mtry.empty() ? "default" : fit_mtry},
                            {"nodesize", fit_nodesize}, {"repeats", fit_repeats}, {"vi", fit_vi}},
                   source_json(source), elapsed());
      return 0;
    }

    if (*imp) {
      const DataSource source = data_source(imp_src);
      const bool generated = std::holds_alternative<GeneratorSpec>(source);
      if (!generated && (!imp_grid_n.empty() || !imp_grid_p.empty())) {
        throw ConfigError("--grid-n and --grid-p apply to generated data only");
      }
      ViStudySpec spec;
      spec.runs = imp_runs;
      spec.top_count = imp_top;
      spec.seed = seed;

      std::optional<LoadedSource> loaded;
      Task task = Task::classification(2);
      std::vector<std::size_t> ns, ps;
      if (generated) {
        spec.generator = std::get<GeneratorSpec>(source);
        ns = imp_grid_n.empty() ? std::vector<std::size_t>{spec.generator.n} : imp_grid_n;
        ps = imp_grid_p.empty() ? std::vector<std::size_t>{spec.generator.p} : imp_grid_p;
        if (spec.generator.kind != GeneratorSpec::Kind::Toys) task = Task::regression();
      } else {
        loaded = load_source(source, seed);
        task = loaded->data.task();
        ns = {loaded->data.num_rows()};
        ps = {loaded->data.num_features()};
      }
      std::vector<MtryExpr> mtrys;
      for (const auto& m : imp_mtry) mtrys.push_back(MtryExpr::parse(m));
      if (mtrys.empty()) mtrys.push_back(task.is_classification() ? MtryExpr::sqrt_p() : MtryExpr::p_over(3));
      for (std::size_t n : ns) {
        for (std::size_t p : ps) {
          for (const auto& m : mtrys) {
            for (std::size_t nt : imp_ntree) spec.cells.push_back({n, p, m, nt});
          }
        }
      }
      const auto results = loaded ? run_vi_study(loaded->data, spec) : run_vi_study(spec);

      Output out(global, "importance");
      if (loaded) emit_metadata(out, *loaded);
      out.csv("vi_quantiles.csv", [&](std::ostream& s) { write_vi_study_csv(s, results); });
      json cells = json::array();
      out.csv("importance.csv", [&](std::ostream& s) {
        s << "n,p,mtry_expr,mtry_value,ntree,variable,rank,mean,sd\n";
        for (const auto& r : results) {
          std::vector<std::size_t> rank(r.report.ranking.size());
          for (std::size_t k = 0; k < rank.size(); ++k) rank[r.report.ranking[k]] = k + 1;
          for (std::size_t v = 0; v < r.report.mean_vi.size(); ++v) {
            s << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.cell.n, r.cell.p, r.cell.mtry.label(), r.mtry_value,
                             r.cell.ntree, v + 1, rank[v], r.report.mean_vi[v], r.report.sd_vi[v]);
          }
        }
      });
      out.csv("importance_runs.csv", [&](std::ostream& s) {
        s << "n,p,mtry_value,ntree,run,variable,vi\n";
        for (const auto& r : results) {
          for (std::size_t run = 0; run < r.report.per_run.size(); ++run) {
            for (std::size_t v = 0; v < r.report.per_run[run].size(); ++v) {
              s << fmt::format("{},{},{},{},{},{},{}\n", r.cell.n, r.cell.p, r.mtry_value, r.cell.ntree, run + 1,
                               v + 1, r.report.per_run[run][v]);
            }
          }
        }
      });
      for (const auto& r : results) {
        cells.push_back({{"n", r.cell.n},
                         {"p", r.cell.p},
                         {"mtry_expr", r.cell.mtry.label()},
                         {"mtry", r.mtry_value},
                         {"ntree", r.cell.ntree},
                         {"ranking", one_based(r.report.ranking)},
                         {"oob_errors", r.report.oob_errors}});
      }
      out.json_file("importance.json", {{"runs", imp_runs}, {"cells", cells}});
      out.manifest(global, {{"runs", imp_runs}, {"top", imp_top}, {"ntree", imp_ntree}, {"mtry", imp_mtry},
                            {"grid_n", imp_grid_n}, {"grid_p", imp_grid_p}},
                   source_json(source), elapsed());
      return 0;
    }

    if (*sel) {
      const DataSource source = data_source(sel_src);
      const LoadedSource src = load_source(source, seed);
      const SelectionConfig cfg = selection_config(sel_opts, derive_seed(seed, {stream::kRun}));
      const SelectionResult r = select_variables(src.data, cfg);
      Output out(global, "select");
      emit_metadata(out, src);
      write_selection_curves(out, r, src.data);
      json j = selection_json(r, src.data);
      if (!src.true_variables.empty()) j["true_variables"] = one_based(src.true_variables);
      out.json_file("selection.json", j);
      out.manifest(global, selection_config_json(cfg, src.data), source_json(source), elapsed());
      return 0;
    }

    if (*sw) {
      const DataSource source = data_source(sw_src);
      const LoadedSource src = load_source(source, seed);
      SweepSpec spec;
      for (const auto& m : sw_mtry) spec.mtry_grid.push_back(MtryExpr::parse(m));
      spec.ntree_grid = sw_ntree;
      spec.repeats = sw_repeats;
      if (sw_nodesize > 0) spec.nodesize = sw_nodesize;
      spec.seed = derive_seed(seed, {stream::kRun});
      const auto cells = run_sweep(src.data, spec);
      Output out(global, "sweep");
      emit_metadata(out, src);
      out.csv("sweep.csv", [&](std::ostream& s) { write_sweep_csv(s, cells); });
      out.manifest(global, {{"mtry_grid", sw_mtry}, {"ntree_grid", sw_ntree}, {"repeats", sw_repeats},
                            {"nodesize", sw_nodesize}},
                   source_json(source), elapsed());
      return 0;
    }

    if (*cv) {
      const DataSource source = data_source(cv_src);
      const LoadedSource src = load_source(source, seed);
      CvSpec spec;
      spec.folds = cv_folds;
      spec.selection = selection_config(cv_sel, seed);
      spec.eval_forest = eval_forest(cv_eval);
      spec.seed = derive_seed(seed, {stream::kRun});
      const CvReport report = run_cv_selection(src.data, spec);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

      Output out(global, "cv");
      emit_metadata(out, src);
      out.csv("cv.csv", [&](std::ostream& s) { write_cv_csv(s, report); });
      json folds = json::array();
      for (const auto& f : report.folds) {
        folds.push_back({{"fold", f.fold + 1},
                         {"test_size", f.test_size},
                         {"interpretation_set", one_based(f.interpretation_set)},
                         {"prediction_set", one_based(f.prediction_set)},
                         {"error_all", f.test_error.all},
                         {"error_interpretation", f.test_error.interpretation},
                         {"error_prediction", f.test_error.prediction}});
      }
      out.json_file("cv.json", {{"folds", folds},
                                {"error_all", report.error.all},
                                {"error_interpretation", report.error.interpretation},
                                {"error_prediction", report.error.prediction},
                                {"mean_interpretation_size", report.mean_interpretation_size},
                                {"mean_prediction_size", report.mean_prediction_size},
                                {"warnings", report.warnings}});
      json config = selection_config_json(spec.selection, src.data);
      config["folds"] = cv_folds;
      config["eval_forest"] = forest_json(spec.eval_forest, src.data.num_features(), src.data.task());
      out.manifest(global, config, source_json(source), elapsed());
      return 0;
    }

    if (*ev) {
      const DataSource source = data_source(ev_src);
      const SelectionConfig cfg = selection_config(ev_sel, seed);
      const ForestConfig eval_cfg = eval_forest(ev_eval);
      const RngSeed run_seed = derive_seed(seed, {stream::kRun});
      TrainTestResult r;
      Dataset train;
      std::vector<std::size_t> truth;
      std::optional<CsvMetadata> metadata;
      if (const auto* g = std::get_if<GeneratorSpec>(&source)) {
        if (!ev_test_csv.empty()) throw ConfigError("--test-csv applies to CSV sources only");
        LoadedSource drawn = draw_generator(*g, derive_seed(run_seed, {stream::kData}));
        train = std::move(drawn.data);
        truth = std::move(drawn.true_variables);
        r = run_train_test_eval(*g, cfg, eval_cfg, run_seed);
      } else {
        if (ev_test_csv.empty()) throw ConfigError("eval on a CSV source needs --test-csv");
        const auto& csv = std::get<CsvSource>(source);
        LoadedSource src = load_source(source, seed);
        LoadedCsv test = load_csv(ev_test_csv, csv.task, csv.response_column);
        train = src.data;
        metadata = src.metadata;
        r = run_train_test_eval(train, test.dataset, cfg, eval_cfg, run_seed);
      }
      Output out(global, "eval");
      if (metadata) out.json_file("dataset.json", metadata_json(*metadata));
      write_selection_curves(out, r.selection, train);
      json j = selection_json(r.selection, train);
      j["test_error"] = {{"all", r.test_error.all},
                         {"interpretation", r.test_error.interpretation},
                         {"prediction", r.test_error.prediction}};
      if (!truth.empty()) j["true_variables"] = one_based(truth);
      out.json_file("eval.json", j);
      out.csv("eval.csv", [&](std::ostream& s) {
        s << "set,size,test_error\n";
        s << fmt::format("all,{},{}\n", train.num_features(), r.test_error.all);
        s << fmt::format("interpretation,{},{}\n", r.selection.interpretation_set.size(),
                         r.test_error.interpretation);
        s << fmt::format("prediction,{},{}\n", r.selection.prediction_set.size(), r.test_error.prediction);
      });
      json config = selection_config_json(cfg, train);
      config["eval_forest"] = forest_json(eval_cfg, train.num_features(), train.task());
      out.manifest(global, config, source_json(source), elapsed());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rfsel::cli
