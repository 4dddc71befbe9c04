#include "copycat/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "copycat/baselines.hpp"
#include "copycat/checkpoint.hpp"
#include "copycat/config.hpp"
#include "copycat/corpus.hpp"
#include "copycat/generate.hpp"
#include "copycat/grad_check.hpp"
#include "copycat/metrics.hpp"
#include "copycat/objective.hpp"
#include "copycat/synthetic.hpp"

namespace copycat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for argument combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity() {
  const char* v = std::getenv("COPYCAT_LOG");
  if (v == nullptr) return Verbosity::Info;
  const std::string s(v);
  if (s == "quiet") return Verbosity::Quiet;
  if (s == "debug") return Verbosity::Debug;
  return Verbosity::Info;
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const fs::path& path, const Manifest& m, std::chrono::steady_clock::time_point started) {
  json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["checkpoint_version"] = Checkpoint::kVersion;
  j["inputs"] = m.inputs;
  std::vector<std::string> outputs = m.outputs;
  outputs.push_back(path.string());
  j["outputs"] = outputs;
  j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  j["precision"] = "float64";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

fs::path manifest_beside(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

// group_id -> reference texts, from {"group_id", "references": [...]} lines.
std::map<std::string, std::vector<std::string>> read_references(const fs::path& path) {
  std::map<std::string, std::vector<std::string>> refs;
  for (const auto& row : read_jsonl(path))
    refs[row.at("group_id").get<std::string>()] = row.at("references").get<std::vector<std::string>>();
  return refs;
}

Vocabulary load_vocabulary(const fs::path& path, std::size_t max_extended) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  return Vocabulary::load(in, max_extended);
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// ---- subcommands ------------------------------------------------------------

struct PrepareArgs {
  std::string input, output;
  FilterOptions filter;
  std::size_t vocab_size = Vocabulary::kDefaultSize;
};

void cmd_prepare(const PrepareArgs& a, Manifest& m, std::ostream& out) {
  auto groups = read_groups_jsonl_file(a.input);
  const std::size_t before = groups.size();
  groups = filter_groups(std::move(groups), a.filter);
  if (groups.empty()) throw std::runtime_error("no group survives filtering");
  const Vocabulary vocab = build_vocabulary(std::span<const ReviewGroup>(groups), a.vocab_size);

  const fs::path dir(a.output);
  fs::create_directories(dir);
  {
    std::ofstream g(dir / "groups.jsonl");
    write_groups_jsonl(g, groups);
    std::ofstream v(dir / "vocab.txt");
    vocab.save(v);
    if (!g || !v) throw std::runtime_error("cannot write prepared data under " + dir.string());
  }
  m.config = {{"min_reviews", a.filter.min_reviews}, {"min_len", a.filter.min_len},
              {"max_len", a.filter.max_len},         {"pop_pct", a.filter.popularity_pct},
              {"vocab_size", a.vocab_size}};
  m.inputs = {a.input};
  m.outputs = {(dir / "groups.jsonl").string(), (dir / "vocab.txt").string()};
  out << "groups " << groups.size() << " of " << before << ", vocabulary " << vocab.size() << '\n';
}

struct TrainArgs {
  std::string config, data, vocab, out, variant;
  std::optional<std::uint64_t> seed;
};

void cmd_train(const TrainArgs& a, Manifest& m, std::ostream& out) {
  TrainConfig config;
  {
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("cannot open config " + a.config);
    const bool seed_in_file = read_config(in, config);
    if (a.seed) config.seed = *a.seed;
    if (!seed_in_file && !a.seed) throw UsageError("training needs a seed (config key `seed` or --seed)");
  }
  if (!a.variant.empty()) config = apply_ablation(config, a.variant);

  auto groups = read_groups_jsonl_file(a.data);
  fs::path vocab_path = a.vocab.empty() ? fs::path(a.data).parent_path() / "vocab.txt" : fs::path(a.vocab);
  Vocabulary vocab;
  if (fs::exists(vocab_path)) {
    vocab = load_vocabulary(vocab_path, config.max_extended);
    m.inputs.push_back(vocab_path.string());
  } else if (!a.vocab.empty()) {
    throw std::runtime_error("cannot open vocabulary " + a.vocab);
  } else {
    vocab = build_vocabulary(std::span<const ReviewGroup>(groups), config.model.vocab_size, config.max_extended);
  }
  config.model.vocab_size = vocab.size();

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const fs::path log_path = dir / "train_log.csv";
  std::ofstream log(log_path);
  if (!log) throw std::runtime_error("cannot write " + log_path.string());
  log << "step,beta_z,beta_c,reconstruction,kl_z,kl_c,total\n";
  log << std::setprecision(17);

  const Verbosity verbose = verbosity();
  const std::size_t report_every = std::max<std::size_t>(1, config.steps / 20);
  std::vector<std::string> outputs;
  TrainHooks hooks;
  hooks.on_step = [&](const StepLog& s) {
    const auto& l = s.loss;
    log << s.step << ',' << l.beta_z << ',' << l.beta_c << ',' << l.reconstruction << ',' << l.kl_z << ','
        << l.kl_c << ',' << l.total << '\n';
    if (verbose == Verbosity::Debug || (verbose == Verbosity::Info && s.step % report_every == 0)) {
      std::cerr << "step " << s.step << " total " << fixed(l.total, 4) << " nll/token "
                << fixed(-l.reconstruction / static_cast<double>(std::max<std::size_t>(1, l.tokens)), 4) << '\n';
    }
  };
  hooks.on_checkpoint = [&](std::size_t step, const Model& model) {
    const fs::path p = dir / ("checkpoint_" + std::to_string(step) + ".ckpt");
    save_checkpoint_file(p.string(), model, config, vocab, step);
    outputs.push_back(p.string());
  };

  TrainResult result = train(std::move(groups), vocab, config, hooks);
  const fs::path model_path = dir / "model.ckpt";
  save_checkpoint_file(model_path.string(), result.model, config, vocab, config.steps);

  m.config = to_json(config);
  m.config["schedule_cycle_length_resolved"] = result.schedule.cycle_length;
  m.seed = config.seed;
  m.inputs.insert(m.inputs.begin(), {a.config, a.data});
  outputs.insert(outputs.begin(), {model_path.string(), log_path.string()});
  m.outputs = outputs;
  out << "trained " << config.steps << " steps, checkpoint " << model_path.string() << '\n';
}

struct SummarizeArgs {
  std::string model, input, mode = "mean", out;
  std::size_t beam = 5;
  std::optional<std::size_t> max_len;
  std::optional<std::uint64_t> seed;
};

void cmd_summarize(const SummarizeArgs& a, Manifest& m, std::ostream& out) {
  SummarizeOptions options;
  options.mode = parse_generation_mode(a.mode);
  if (options.mode == GenerationMode::Sample && !a.seed) throw UsageError("--mode sample requires --seed");
  options.seed = a.seed.value_or(0);
  options.beam_width = a.beam;

  Checkpoint ckpt = load_checkpoint_file(a.model);
  options.max_len = a.max_len.value_or(ckpt.config.max_summary_len);
  const auto groups = read_groups_jsonl_file(a.input);

  const fs::path out_path(a.out);
  std::ofstream file = open_output(out_path);
  for (const auto& g : groups) {
    const SummaryResult r = summarize(ckpt.model, ckpt.vocab, g, options);
    json copied = json::array();
    for (const auto& c : r.copied)
      copied.push_back({{"token", c.token}, {"review", c.review}, {"position", c.position},
                        {"output_position", c.output_position}});
    json row = {{"group_id", r.group_id}, {"summary", r.text}, {"copied", copied}, {"mode", to_string(r.mode)}};
    file << row.dump() << '\n';
  }
  if (!file) throw std::runtime_error("cannot write " + out_path.string());

  m.config = {{"mode", a.mode}, {"beam", a.beam}, {"max_len", options.max_len}};
  if (a.seed) m.seed = *a.seed;
  m.inputs = {a.model, a.input};
  m.outputs = {out_path.string()};
  out << "summarized " << groups.size() << " groups\n";
}

struct BaselineArgs {
  std::string method, input, refs, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
};

void cmd_baseline(const BaselineArgs& a, Manifest& m, std::ostream& out) {
  if (a.method == "random" && !a.seed) throw UsageError("--method random requires --seed");
  if (a.method == "oracle" && a.refs.empty()) throw UsageError("--method oracle requires --refs");
  const auto groups = read_groups_jsonl_file(a.input);
  std::map<std::string, std::vector<std::string>> refs;
  if (!a.refs.empty()) refs = read_references(a.refs);

  const fs::path out_path(a.out);
  std::ofstream file = open_output(out_path);
  for (const auto& g : groups) {
    std::string summary;
    if (a.method == "clustroid") {
      summary = clustroid(g).surface_text;
    } else if (a.method == "lead") {
      summary = lead(g);
    } else if (a.method == "random") {
      summary = random_review(g, *a.seed).surface_text;
    } else if (a.method == "oracle") {
      auto it = refs.find(g.group_id);
      if (it == refs.end()) throw std::runtime_error("no references for group " + g.group_id);
      summary = oracle(g, it->second).surface_text;
    } else {
      LexRankOptions opts;
      opts.budget_tokens = a.budget;
      summary = lexrank(g, opts);
    }
    file << json{{"group_id", g.group_id}, {"summary", summary}, {"system", a.method}}.dump() << '\n';
  }
  if (!file) throw std::runtime_error("cannot write " + out_path.string());

  m.config = {{"method", a.method}};
  if (a.budget) m.config["budget"] = *a.budget;
  if (a.seed) m.seed = *a.seed;
  m.inputs = {a.input};
  if (!a.refs.empty()) m.inputs.push_back(a.refs);
  m.outputs = {out_path.string()};
  out << a.method << " summaries for " << groups.size() << " groups\n";
}

struct EvaluateArgs {
  std::vector<std::string> candidates;
  std::string references, out;
};

void cmd_evaluate(const EvaluateArgs& a, Manifest& m, std::ostream& out) {
  const auto refs = read_references(a.references);
  std::ostringstream table;
  table << "system,R1,R2,RL\n";
  for (const auto& path : a.candidates) {
    const auto rows = read_jsonl(path);
    if (rows.empty()) throw std::runtime_error(path + " has no candidates");
    std::string system = rows.front().value("system", fs::path(path).stem().string());
    std::vector<std::string> texts;
    std::vector<std::vector<std::string>> matched;
    for (const auto& row : rows) {
      const auto id = row.at("group_id").get<std::string>();
      auto it = refs.find(id);
      if (it == refs.end()) throw std::runtime_error("no references for group " + id);
      texts.push_back(row.at("summary").get<std::string>());
      matched.push_back(it->second);
    }
    const RougeTriple s = score_system(texts, matched);
    table << csv_field(system) << ',' << fixed(s.r1, 4) << ',' << fixed(s.r2, 4) << ',' << fixed(s.rl, 4) << '\n';
  }
  std::ofstream file = open_output(a.out);
  file << table.str();
  if (!file) throw std::runtime_error("cannot write " + a.out);
  out << table.str();

  m.inputs = a.candidates;
  m.inputs.push_back(a.references);
  m.outputs = {a.out};
}

struct TableArgs {
  std::string input, out;
};

void emit_table(const std::string& text, const TableArgs& a, Manifest& m, std::ostream& out) {
  out << text;
  m.inputs = {a.input};
  if (!a.out.empty()) {
    std::ofstream file = open_output(a.out);
    file << text;
    if (!file) throw std::runtime_error("cannot write " + a.out);
    m.outputs = {a.out};
  }
}

void cmd_evaluate_bws(const TableArgs& a, Manifest& m, std::ostream& out) {
  std::vector<BwsJudgment> judgments;
  for (const auto& row : read_jsonl(a.input)) {
    judgments.push_back({row.value("item_id", std::string()), row.at("systems").get<std::vector<std::string>>(),
                         row.at("best").get<std::string>(), row.at("worst").get<std::string>()});
  }
  std::ostringstream table;
  table << "system,bws\n";
  for (const auto& [system, score] : bws_scores(judgments))
    table << csv_field(system) << ',' << fixed(score, 4) << '\n';
  emit_table(table.str(), a, m, out);
}

void cmd_evaluate_support(const TableArgs& a, Manifest& m, std::ostream& out) {
  std::map<std::string, std::vector<SupportLabel>> by_system;
  for (const auto& row : read_jsonl(a.input))
    by_system[row.value("system", std::string("all"))].push_back(
        parse_support_label(row.at("label").get<std::string>()));
  if (by_system.empty()) throw std::runtime_error("no support labels in " + a.input);
  std::ostringstream table;
  table << "system,full,partial,no\n";
  for (const auto& [system, labels] : by_system) {
    const SupportPercentages p = content_support_aggregate(labels);
    table << csv_field(system) << ',' << fixed(p.full, 2) << ',' << fixed(p.partial, 2) << ',' << fixed(p.no, 2)
          << '\n';
  }
  emit_table(table.str(), a, m, out);
}

struct GradCheckArgs {
  bool tiny = false;
  std::uint64_t seed = 7;
  std::string variant = "full";
};

int cmd_grad_check(const GradCheckArgs& a, Manifest& m, std::ostream& out) {
  if (!a.tiny) throw UsageError("grad-check currently supports only --tiny");
  TinySetup s = make_tiny_setup(parse_ablation(a.variant));
  Model model(s.config);
  model.initialize(a.seed);
  std::mt19937_64 rng(a.seed + 1);
  const ElboNoise noise = ElboNoise::draw(rng, s.config, s.group.size());
  const nd::GradCheckReport r = nd::grad_check(
      [&](nd::Tape& t, nd::ParameterStore&) {
        Weights w = Weights::bind(t, model);
        return elbo(w, s.group, noise, 0.7, 0.4).total;
      },
      model.params());
  out << "max_relative_error " << std::setprecision(6) << r.max_relative_error << " parameter "
      << r.worst_parameter << '[' << r.worst_index << "] coordinates " << r.coordinates << '\n';
  m.config = {{"tiny", true}, {"variant", a.variant}};
  m.seed = a.seed;
  return r.finite && r.max_relative_error < 1e-4 ? kExitOk : kExitRuntime;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised opinion summarizer: data preparation, training, summarization, baselines and "
               "evaluation.",
               "copycat"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Filter review groups and build the vocabulary");
  prepare->add_option("--input", prep.input, "Groups as JSON Lines")->required();
  prepare->add_option("--output", prep.output, "Output directory")->required();
  prepare->add_option("--min-reviews", prep.filter.min_reviews, "Minimum reviews per group")->capture_default_str();
  prepare->add_option("--min-len", prep.filter.min_len, "Minimum review length in tokens")->capture_default_str();
  prepare->add_option("--max-len", prep.filter.max_len, "Maximum review length in tokens")->capture_default_str();
  prepare->add_option("--pop-pct", prep.filter.popularity_pct, "Popularity percentile cap")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  prepare->add_option("--vocab-size", prep.vocab_size, "Vocabulary size including specials")
      ->check(CLI::Range(static_cast<std::size_t>(kSpecialCount), std::size_t{1} << 40))
      ->capture_default_str();

  TrainArgs train_args;
  auto add_train_options = [&](CLI::App* sub) {
    sub->add_option("--config", train_args.config, "Key-value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--data", train_args.data, "Prepared groups (JSON Lines)")->required()->check(CLI::ExistingFile);
    sub->add_option("--vocab", train_args.vocab, "Vocabulary file (default: vocab.txt beside --data)");
    sub->add_option("--out", train_args.out, "Output directory")->required();
    sub->add_option("--seed", train_args.seed, "Overrides the config seed");
  };
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_train_options(train_cmd);
  auto* ablate = app.add_subcommand("ablate", "Train an ablated model");
  add_train_options(ablate);
  ablate->add_option("--variant", train_args.variant, "Ablation")
      ->required()
      ->check(CLI::IsMember({"full", "no_attention", "no_c", "no_z"}));

  SummarizeArgs sum;
  auto* summarize_cmd = app.add_subcommand("summarize", "Generate summaries");
  summarize_cmd->add_option("--model", sum.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  summarize_cmd->add_option("--input", sum.input, "Groups (JSON Lines)")->required()->check(CLI::ExistingFile);
  summarize_cmd->add_option("--mode", sum.mode, "mean or sample")
      ->check(CLI::IsMember({"mean", "sample"}))
      ->capture_default_str();
  summarize_cmd->add_option("--beam", sum.beam, "Beam width")->check(CLI::PositiveNumber)->capture_default_str();
  summarize_cmd->add_option("--max-len", sum.max_len, "Maximum summary length")->check(CLI::PositiveNumber);
  summarize_cmd->add_option("--seed", sum.seed, "Seed for sample mode");
  summarize_cmd->add_option("--out", sum.out, "Output JSON Lines")->required();

  BaselineArgs base;
  auto* baseline = app.add_subcommand("baseline", "Extractive baselines");
  baseline->add_option("--method", base.method, "clustroid|lead|random|oracle|lexrank")
      ->required()
      ->check(CLI::IsMember({"clustroid", "lead", "random", "oracle", "lexrank"}));
  baseline->add_option("--input", base.input, "Groups (JSON Lines)")->required()->check(CLI::ExistingFile);
  baseline->add_option("--refs", base.refs, "References (JSON Lines)")->check(CLI::ExistingFile);
  baseline->add_option("--seed", base.seed, "Seed for the random baseline");
  baseline->add_option("--budget", base.budget, "LexRank token budget")->check(CLI::PositiveNumber);
  baseline->add_option("--out", base.out, "Output JSON Lines")->required();

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "ROUGE F1 table");
  evaluate->add_option("--candidates", eval.candidates, "Candidate summaries (JSON Lines), repeatable")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--references", eval.references, "References (JSON Lines)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval.out, "Output CSV")->required();

  TableArgs bws;
  auto* evaluate_bws = app.add_subcommand("evaluate-bws", "Best-Worst Scaling scores");
  evaluate_bws->add_option("--judgments", bws.input, "Judgments (JSON Lines)")->required()->check(CLI::ExistingFile);
  evaluate_bws->add_option("--out", bws.out, "Output CSV");

  TableArgs support;
  auto* evaluate_support = app.add_subcommand("evaluate-support", "Content support percentages");
  evaluate_support->add_option("--labels", support.input, "Labels (JSON Lines)")->required()->check(CLI::ExistingFile);
  evaluate_support->add_option("--out", support.out, "Output CSV");

  GradCheckArgs gc;
  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient check");
  grad->add_flag("--tiny", gc.tiny, "Tiny model on a three-review group");
  grad->add_option("--seed", gc.seed, "Initialization seed")->capture_default_str();
  grad->add_option("--variant", gc.variant, "Ablation")
      ->check(CLI::IsMember({"full", "no_attention", "no_c", "no_z"}))
      ->capture_default_str();

  if (args.size() > 1 && !args[1].empty() && args[1].front() != '-') {
    const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == args[1]; });
    if (!known) {
      err << "error: usage: unknown subcommand " << args[1] << '\n' << app.help();
      return kExitUsage;
    }
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "error: usage: " << what << '\n' << app.help();
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  Manifest manifest;
  manifest.command = app.get_subcommands().front()->get_name();
  manifest.argv = args;
  fs::path manifest_path;
  int code = kExitOk;
  try {
    if (prepare->parsed()) {
      cmd_prepare(prep, manifest, out);
      manifest_path = fs::path(prep.output) / "manifest.json";
    } else if (train_cmd->parsed() || ablate->parsed()) {
      cmd_train(train_args, manifest, out);
      manifest_path = fs::path(train_args.out) / "manifest.json";
    } else if (summarize_cmd->parsed()) {
      cmd_summarize(sum, manifest, out);
      manifest_path = manifest_beside(sum.out);
    } else if (baseline->parsed()) {
      cmd_baseline(base, manifest, out);
      manifest_path = manifest_beside(base.out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(eval, manifest, out);
      manifest_path = manifest_beside(eval.out);
    } else if (evaluate_bws->parsed()) {
      cmd_evaluate_bws(bws, manifest, out);
      if (!bws.out.empty()) manifest_path = manifest_beside(bws.out);
    } else if (evaluate_support->parsed()) {
      cmd_evaluate_support(support, manifest, out);
      if (!support.out.empty()) manifest_path = manifest_beside(support.out);
    } else if (grad->parsed()) {
      code = cmd_grad_check(gc, manifest, out);
    }
    if (!manifest_path.empty()) write_manifest(manifest_path, manifest, started);
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "error: training: group " << e.group_id() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "error: runtime: " << what << '\n';
    return kExitRuntime;
  }
  return code;
}

}  // namespace copycat
