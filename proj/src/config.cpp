#include "falcon/config.hpp"

#include <charconv>
#include <sstream>

namespace falcon {

std::string_view to_string(TrainMode m) {
  return m == TrainMode::Entailment ? "entailment" : "ranking";
}
std::string_view to_string(Aggregate a) { return a == Aggregate::Min ? "min" : "mean"; }

TrainMode parse_mode(std::string_view s) {
  if (s == "entailment") return TrainMode::Entailment;
  if (s == "ranking") return TrainMode::Ranking;
  throw ConfigError("mode must be entailment|ranking, got '" + std::string(s) + "'");
}

Aggregate parse_aggregate(std::string_view s) {
  if (s == "min") return Aggregate::Min;
  if (s == "mean") return Aggregate::Mean;
  throw ConfigError("aggregate must be min|mean, got '" + std::string(s) + "'");
}

TrainConfig family_config() {
  TrainConfig c;
  c.alpha = 0.75;
  c.beta = 0.15;
  c.emb_init = 1.0;
  c.mlp_input_gain = 30.0;
  return c;
}

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.dim < 2) fail("dim must be >= 2");
  if (!(c.lr > 0)) fail("lr must be positive");
  if (c.steps < 0) fail("steps must be >= 0");
  if (!(c.alpha >= 0 && c.alpha <= 1) || !(c.beta >= 0 && c.beta <= 1))
    fail("alpha and beta must lie in [0,1]");
  if (!(c.alpha + c.beta < 1)) fail("alpha + beta must be < 1");
  if (c.n_gauss < 0 || c.n_uniform < 0) fail("sample counts must be >= 0");
  if (!(c.gauss_std >= 0)) fail("gauss_std must be >= 0");
  if (c.negatives < 1) fail("negatives must be >= 1");
  if (c.batch_tbox < 1 || c.batch_concept < 1 || c.batch_role < 1) fail("batch sizes must be >= 1");
  for (int h : c.hidden)
    if (h < 1) fail("hidden widths must be >= 1");
  if (!(c.emb_init >= 0)) fail("emb_init must be >= 0");
  if (!(c.mlp_input_gain > 0)) fail("mlp_input_gain must be positive");
  if (c.eval_pool_size < 0) fail("eval_pool_size must be >= 0");
  if (!(c.entail_threshold >= 0 && c.entail_threshold <= 1) ||
      !(c.disprove_threshold >= 0 && c.disprove_threshold <= 1))
    fail("thresholds must lie in [0,1]");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

template <class T>
T number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("bad value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

}  // namespace

void apply_setting(TrainConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  const std::string k(trim(key));
  if (k == "dim") c.dim = number<int>(k, v);
  else if (k == "lr") c.lr = number<double>(k, v);
  else if (k == "steps") c.steps = number<int>(k, v);
  else if (k == "tnorm") {
    try {
      c.tnorm = parse_tnorm(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (k == "alpha") c.alpha = number<double>(k, v);
  else if (k == "beta") c.beta = number<double>(k, v);
  else if (k == "n_gauss") c.n_gauss = number<int>(k, v);
  else if (k == "n_uniform") c.n_uniform = number<int>(k, v);
  else if (k == "gauss_std") c.gauss_std = number<double>(k, v);
  else if (k == "seed") c.seed = number<std::uint64_t>(k, v);
  else if (k == "mode") c.mode = parse_mode(v);
  else if (k == "negatives") c.negatives = number<int>(k, v);
  else if (k == "batch_tbox") c.batch_tbox = number<int>(k, v);
  else if (k == "batch_concept") c.batch_concept = number<int>(k, v);
  else if (k == "batch_role") c.batch_role = number<int>(k, v);
  else if (k == "hidden") {
    c.hidden.clear();
    std::string_view rest = v;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      c.hidden.push_back(number<int>(k, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (k == "emb_init") c.emb_init = number<double>(k, v);
  else if (k == "mlp_input_gain") c.mlp_input_gain = number<double>(k, v);
  else if (k == "eval_pool_size") c.eval_pool_size = number<int>(k, v);
  else if (k == "entail_threshold") c.entail_threshold = number<double>(k, v);
  else if (k == "disprove_threshold") c.disprove_threshold = number<double>(k, v);
  else if (k == "aggregate") c.aggregate = parse_aggregate(v);
  else throw ConfigError("unknown config key '" + k + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

std::string render(const TrainConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "dim = " << c.dim << "\n"
      << "lr = " << c.lr << "\n"
      << "steps = " << c.steps << "\n"
      << "tnorm = " << to_string(c.tnorm) << "\n"
      << "alpha = " << c.alpha << "\n"
      << "beta = " << c.beta << "\n"
      << "n_gauss = " << c.n_gauss << "\n"
      << "n_uniform = " << c.n_uniform << "\n"
      << "gauss_std = " << c.gauss_std << "\n"
      << "seed = " << c.seed << "\n"
      << "mode = " << to_string(c.mode) << "\n"
      << "negatives = " << c.negatives << "\n"
      << "batch_tbox = " << c.batch_tbox << "\n"
      << "batch_concept = " << c.batch_concept << "\n"
      << "batch_role = " << c.batch_role << "\n";
  if (!c.hidden.empty()) {
    out << "hidden = ";
    for (std::size_t i = 0; i < c.hidden.size(); ++i) out << (i ? "," : "") << c.hidden[i];
    out << "\n";
  }
  out << "emb_init = " << c.emb_init << "\n"
      << "mlp_input_gain = " << c.mlp_input_gain << "\n"
      << "eval_pool_size = " << c.eval_pool_size << "\n"
      << "entail_threshold = " << c.entail_threshold << "\n"
      << "disprove_threshold = " << c.disprove_threshold << "\n"
      << "aggregate = " << to_string(c.aggregate) << "\n";
  return out.str();
}

}  // namespace falcon
