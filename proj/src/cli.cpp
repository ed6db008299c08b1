#include "falcon/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "falcon/checkpoint.hpp"
#include "falcon/entailment.hpp"
#include "falcon/evaluation.hpp"
#include "falcon/log.hpp"
#include "falcon/metrics.hpp"
#include "falcon/training.hpp"

namespace falcon {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string builtin, ontology, config, out = "falcon_out";
  std::map<std::string, std::string> settings;  // config key -> flag value
  std::string thresholds;
  int jobs = 1;
  int k = 1;
  std::string models, queries, concept_text, individual, manifest, labels, test;
  std::vector<std::string> query_lines;
  int count = 1;
  std::vector<int> n_inc{0, 10};
  std::vector<int> ks{1, 5, 10};
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, const Options& o, std::ostream& out)
      : o_(o), out_(out), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.argv = std::move(argv);
  }

  bool has_ontology() const { return !o_.builtin.empty() || !o_.ontology.empty(); }

  Ontology ontology() const {
    if (!o_.builtin.empty()) {
      if (o_.builtin != "family") throw ConfigError("unknown builtin '" + o_.builtin + "'");
      return builtin_family();
    }
    if (o_.ontology.empty()) throw ConfigError("need --builtin or --ontology");
    return parse_ontology(read_file(o_.ontology));
  }

  TrainConfig base_config() const {
    TrainConfig cfg = o_.builtin == "family" ? family_config() : TrainConfig{};
    return apply(cfg);
  }

  TrainConfig apply(TrainConfig cfg, bool query_only = false) const {
    if (!o_.config.empty()) cfg = parse_config(read_file(o_.config), cfg);
    for (const auto& [key, value] : o_.settings) {
      const bool query_key = key == "eval_pool_size" || key == "aggregate" || key == "seed";
      if (!value.empty() && (!query_only || query_key)) apply_setting(cfg, key, value);
    }
    if (!o_.thresholds.empty()) {
      const auto comma = o_.thresholds.find(',');
      const std::string first = o_.thresholds.substr(0, comma);
      const std::string second = comma == std::string::npos ? first : o_.thresholds.substr(comma + 1);
      apply_setting(cfg, "entail_threshold", first);
      apply_setting(cfg, "disprove_threshold", second);
    }
    validate(cfg);
    return cfg;
  }

  fs::path output(const std::string& name, const std::string& contents) {
    const fs::path p = fs::path(o_.out) / name;
    write_file(p, contents);
    manifest_.outputs.push_back(p.filename().string());
    return p;
  }

  void set_config(const TrainConfig& cfg) { manifest_.config = render(cfg); }
  void set_ontology(const Ontology& onto) { manifest_.ontology_hash = fingerprint(render(onto)); }
  void add_seed(std::uint64_t s) { manifest_.seeds.push_back(s); }

  void finish() {
    manifest_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(fs::path(o_.out) / "manifest.json", manifest_json(manifest_));
  }

  std::ostream& out() { return out_; }

 private:
  const Options& o_;
  std::ostream& out_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<ModelHandle> require_models(const Options& o) {
  if (o.models.empty()) throw ConfigError("need --models DIR");
  auto models = load_checkpoint_dir(o.models);
  if (models.empty()) throw ConfigError("no checkpoints in " + o.models);
  return models;
}

QueryOptions query_opts(Run& run, const ModelHandle& first) {
  const TrainConfig cfg = run.apply(first.config, true);
  run.set_config(cfg);
  return query_options(cfg);
}

void check_axiom(const Signature& sig, const Axiom& axiom) {
  auto individual = [&](const std::string& id) {
    if (!sig.has(SymbolKind::Individual, id)) throw SymbolError("unknown individual '" + id + "'");
  };
  if (auto* s = std::get_if<Subsumption>(&axiom)) {
    check_resolves(sig, *s->sub);
    check_resolves(sig, *s->sup);
  } else if (auto* a = std::get_if<ConceptAssertion>(&axiom)) {
    check_resolves(sig, *a->description);
    individual(a->individual);
  } else {
    const auto& r = std::get<RoleAssertion>(axiom);
    if (!sig.has(SymbolKind::Relation, r.relation))
      throw SymbolError("unknown relation '" + r.relation + "'");
    individual(r.subject);
    individual(r.object);
  }
}

std::vector<std::string> query_lines(const Options& o) {
  std::vector<std::string> lines = o.query_lines;
  if (!o.queries.empty()) {
    std::istringstream in(read_file(o.queries));
    for (std::string line; std::getline(in, line);) lines.push_back(line);
  }
  std::vector<std::string> out;
  for (auto& line : lines) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line);
  }
  if (out.empty()) throw ConfigError("no queries given (--queries FILE or --query TEXT)");
  return out;
}

int cmd_train(Run& run, const Options& o) {
  const Ontology onto = run.ontology();
  const TrainConfig cfg = run.base_config();
  run.set_config(cfg);
  run.set_ontology(onto);
  const auto ens = train_ensemble(onto, cfg, o.k, o.jobs);
  std::string summary = "model,seed,final_loss\n";
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto& m = ens.models[i];
    run.add_seed(m.seed);
    char tag[16];
    std::snprintf(tag, sizeof tag, "%03zu", i);
    run.output(std::string("model_") + tag + ".json", checkpoint_json(m));
    std::string trace = "step,loss\n";
    for (std::size_t s = 0; s < ens.loss_traces[i].size(); ++s)
      trace += std::to_string(s) + "," + num(ens.loss_traces[i][s]) + "\n";
    run.output(std::string("loss_") + tag + ".csv", trace);
    summary += std::to_string(i) + "," + std::to_string(m.seed) + "," + num(ens.final_losses[i]) + "\n";
    run.out() << "model " << i << " seed " << m.seed << " final loss " << num(ens.final_losses[i]) << "\n";
  }
  run.output("losses.csv", summary);
  return 0;
}

int cmd_entail(Run& run, const Options& o) {
  const auto models = require_models(o);
  const auto opts = query_opts(run, models.front());
  std::string lines;
  for (const auto& text : query_lines(o)) {
    std::string record;
    try {
      const Axiom axiom = parse_axiom(text);
      check_axiom(models.front().signature, axiom);
      record = to_json(query_axiom(models, axiom, opts));
    } catch (const std::exception& e) {
      ordered_json j;
      j["query"] = text;
      j["error"] = e.what();
      record = j.dump();
      log_warn("query '" + text + "': " + e.what());
    }
    run.out() << record << "\n";
    lines += record + "\n";
  }
  run.output("verdicts.jsonl", lines);
  return 0;
}

int cmd_instantiate(Run& run, const Options& o) {
  const auto models = require_models(o);
  const auto opts = query_opts(run, models.front());
  if (o.concept_text.empty()) throw ConfigError("need --concept");
  const ConceptPtr c = parse_concept(o.concept_text);
  const auto& sig = models.front().signature;
  check_resolves(sig, *c);
  std::vector<std::string> individuals =
      o.individual.empty() ? sig.individuals() : std::vector<std::string>{o.individual};
  std::string lines;
  for (const auto& ind : individuals) {
    if (!sig.has(SymbolKind::Individual, ind)) throw SymbolError("unknown individual '" + ind + "'");
    const std::string record = to_json(instantiation_degree(models, *c, ind, opts));
    run.out() << record << "\n";
    lines += record + "\n";
  }
  run.output("instantiation.jsonl", lines);
  return 0;
}

int cmd_consistency(Run& run, const Options& o) {
  const auto models = require_models(o);
  const auto opts = query_opts(run, models.front());
  const Ontology onto = run.ontology();
  run.set_ontology(onto);
  ordered_json j;
  j["per_model"] = consistency_per_model(models, onto, opts);
  j["degree"] = consistency_degree(models, onto, opts);
  run.out() << j.dump() << "\n";
  run.output("consistency.json", j.dump(2));
  return 0;
}

int cmd_inject(Run& run, const Options& o) {
  const Ontology onto = run.ontology();
  const TrainConfig cfg = run.base_config();
  run.set_config(cfg);
  run.set_ontology(onto);
  run.add_seed(cfg.seed);
  std::mt19937_64 rng(cfg.seed);
  const auto inj = inject_inconsistency(onto, o.count, rng);
  ordered_json manifest = ordered_json::array();
  for (const auto& a : inj.manifest) manifest.push_back(render(a));
  run.output("ontology.txt", render(inj.ontology));
  run.output("injection.json", manifest.dump(2));
  run.out() << "injected " << inj.manifest.size() << " assertions\n";
  return 0;
}

LabeledAxioms labels_for(const Options& o) {
  if (o.labels.empty()) {
    if (o.builtin == "family") return family_labeled_axioms();
    throw ConfigError("need --labels FILE outside the built-in Family ontology");
  }
  LabeledAxioms out;
  std::istringstream in(read_file(o.labels));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const char sign = line[first];
    if (sign != '+' && sign != '-') throw ParseError("label lines start with + or -", line_no, first + 1);
    const Axiom axiom = parse_axiom(line.substr(first + 1));
    const auto* s = std::get_if<Subsumption>(&axiom);
    if (!s) throw ParseError("labeled axioms must be subsumptions", line_no, first + 1);
    (sign == '+' ? out.entailed : out.unprovable).push_back(*s);
  }
  return out;
}

int cmd_bench(Run& run, const Options& o) {
  const Ontology onto = run.ontology();
  const TrainConfig cfg = run.base_config();
  run.set_config(cfg);
  run.set_ontology(onto);
  if (o.ks.empty() || o.n_inc.empty()) throw ConfigError("need at least one N_inc and one k");
  const int kmax = *std::max_element(o.ks.begin(), o.ks.end());
  const auto labeled = labels_for(o);
  const auto opts = query_options(cfg);
  std::string csv =
      "n_inc,k,mae_multi,auc_multi,aupr_multi,fmax_multi,mae_avg,auc_avg,aupr_avg,fmax_avg,auc_gain\n";
  for (int n : o.n_inc) {
    std::mt19937_64 rng(cfg.seed);
    const auto inj = inject_inconsistency(onto, n, rng);
    const auto ens = train_ensemble(inj.ontology, cfg, kmax, o.jobs);
    for (const auto& m : ens.models) run.add_seed(m.seed);
    const auto scores = score_axioms(ens.models, labeled, opts);
    for (int k : o.ks) {
      const auto multi = multi_metrics(scores, k, cfg.aggregate);
      const auto avg = avg_metrics(scores, k);
      std::string row = std::to_string(n) + "," + std::to_string(k);
      for (double v : {multi.mae, multi.auc, multi.aupr, multi.fmax, avg.mae, avg.auc, avg.aupr,
                       avg.fmax, multi.auc - avg.auc})
        row += "," + num(v);
      csv += row + "\n";
      run.out() << row << "\n";
    }
  }
  run.output("bench.csv", csv);
  return 0;
}

int cmd_rank(Run& run, const Options& o) {
  Ontology train;
  std::vector<RoleAssertion> test;
  TrainConfig cfg = run.base_config();
  if (!run.has_ontology()) {
    auto kg = synthetic_transitive_kg(cfg.seed);
    train = std::move(kg.train);
    test = std::move(kg.test);
  } else {
    train = run.ontology();
    if (o.test.empty()) throw ConfigError("need --test FILE of role assertions");
    std::istringstream in(read_file(o.test));
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const Axiom a = parse_axiom(line);
      auto* r = std::get_if<RoleAssertion>(&a);
      if (!r) throw ConfigError("test file holds role assertions only");
      check_axiom(train.signature, a);
      test.push_back(*r);
    }
  }
  cfg.mode = TrainMode::Ranking;
  run.set_config(cfg);
  run.set_ontology(train);
  const auto ens = train_ensemble(train, cfg, o.k, o.jobs);
  const auto queries = ranking_queries(train, test);
  ordered_json j;
  std::string csv = "model,mode,mrr,hits3,hits10,hits100,random_mrr\n";
  for (std::size_t i = 0; i < ens.size(); ++i) {
    run.add_seed(ens.models[i].seed);
    const auto scorer = model_scorer(ens.models[i]);
    for (auto mode : {RankMode::Raw, RankMode::Filtered}) {
      const auto m = rank_metrics(queries, scorer, mode);
      const std::string label = mode == RankMode::Raw ? "raw" : "filtered";
      const double baseline = random_mrr(queries, mode);
      j[std::to_string(i)][label] = {{"mrr", m.mrr},         {"hits3", m.hits3},
                                     {"hits10", m.hits10},   {"hits100", m.hits100},
                                     {"random_mrr", baseline}};
      csv += std::to_string(i) + "," + label + "," + num(m.mrr) + "," + num(m.hits3) + "," +
             num(m.hits10) + "," + num(m.hits100) + "," + num(baseline) + "\n";
    }
  }
  run.out() << j.dump() << "\n";
  run.output("rank.json", j.dump(2));
  run.output("rank.csv", csv);
  return 0;
}

int dispatch(const std::string& command, const std::vector<std::string>& args, Options& o,
             std::ostream& out) {
  Run run(command, args, o, out);
  static const std::map<std::string, std::function<int(Run&, const Options&)>> commands = {
      {"train", cmd_train},   {"entail", cmd_entail}, {"instantiate", cmd_instantiate},
      {"consistency", cmd_consistency}, {"inject", cmd_inject}, {"bench", cmd_bench},
      {"rank", cmd_rank}};
  const int code = commands.at(command)(run, o);
  run.finish();
  return code;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--builtin", o.builtin, "Built-in ontology (family)");
  sub->add_option("--ontology", o.ontology, "Ontology file in the native format");
  sub->add_option("--config", o.config, "key = value config file");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--jobs", o.jobs, "Parallel trainers");
  sub->add_option("--thresholds", o.thresholds, "entail[,disprove] classification thresholds");
  const std::vector<std::pair<std::string, std::string>> keyed = {
      {"--tnorm", "tnorm"},   {"--dim", "dim"},   {"--lr", "lr"},
      {"--steps", "steps"},   {"--alpha", "alpha"}, {"--beta", "beta"},
      {"--seed", "seed"},     {"--eval-pool", "eval_pool_size"}, {"--aggregate", "aggregate"}};
  for (const auto& [flag, key] : keyed) sub->add_option(flag, o.settings[key]);
}

int replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out,
           std::ostream& err) {
  const RunManifest m = manifest_from_json(read_file(manifest_path));
  std::vector<std::string> args = m.argv;
  auto set_flag = [&](const std::string& flag, const std::string& value) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == flag) {
        args[i + 1] = value;
        return;
      }
    args.push_back(flag);
    args.push_back(value);
  };
  set_flag("--jobs", "1");
  if (!out_override.empty()) set_flag("--out", out_override);
  return run_cli(args, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"falcon: fuzzy model generation and approximate entailment for ALC ontologies"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Train k models and write checkpoints");
  add_common(train, o);
  train->add_option("-k", o.k, "Number of models");

  auto* entail = app.add_subcommand("entail", "Evaluate axioms against a trained ensemble");
  add_common(entail, o);
  entail->add_option("--models", o.models, "Checkpoint directory")->required();
  entail->add_option("--queries", o.queries, "One axiom per line");
  entail->add_option("--query", o.query_lines, "Axiom text (repeatable)");

  auto* inst = app.add_subcommand("instantiate", "Membership of named individuals in a concept");
  add_common(inst, o);
  inst->add_option("--models", o.models, "Checkpoint directory")->required();
  inst->add_option("--concept", o.concept_text, "Concept description")->required();
  inst->add_option("--individual", o.individual, "Named individual (default: all)");

  auto* cons = app.add_subcommand("consistency", "Degree of consistency of an ABox");
  add_common(cons, o);
  cons->add_option("--models", o.models, "Checkpoint directory")->required();

  auto* inject = app.add_subcommand("inject", "Add individuals asserted into disjoint concepts");
  add_common(inject, o);
  inject->add_option("-n", o.count, "Number of injected individuals");

  auto* bench = app.add_subcommand("bench", "Sweep N_inc and k; Multi versus Avg metrics");
  add_common(bench, o);
  bench->add_option("--n-inc", o.n_inc, "Comma-separated N_inc values")->delimiter(',');
  bench->add_option("-k", o.ks, "Comma-separated ensemble sizes")->delimiter(',');
  bench->add_option("--labels", o.labels, "Lines '+ axiom' (entailed) or '- axiom' (unprovable)");

  auto* rank = app.add_subcommand("rank", "BPR training and filtered ranking on role assertions");
  add_common(rank, o);
  rank->add_option("-k", o.k, "Number of models");
  rank->add_option("--test", o.test, "Held-out role assertions");

  auto* rep = app.add_subcommand("replay", "Re-run a command from its manifest with --jobs 1");
  rep->add_option("--manifest", o.manifest, "manifest.json")->required();
  std::string replay_out;
  rep->add_option("--out", replay_out, "Output directory override");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (rep->parsed()) return replay(o.manifest, replay_out, out, err);
    for (auto* sub : app.get_subcommands()) return dispatch(sub->get_name(), args, o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SymbolError& e) {
    err << "symbol error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const TrainingError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace falcon
