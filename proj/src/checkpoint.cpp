#include "falcon/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace falcon {

using nlohmann::ordered_json;

std::string checkpoint_json(const ModelHandle& model) {
  ordered_json j;
  j["version"] = kCheckpointVersion;
  j["config"] = render(model.config);
  j["seed"] = model.seed;
  j["signature"] = {{"concepts", model.signature.concepts()},
                    {"relations", model.signature.relations()},
                    {"individuals", model.signature.individuals()}};
  j["signature_hash"] = signature_hash(model.signature);
  ordered_json params = ordered_json::array();
  for (std::size_t s = 0; s < model.params.size(); ++s) {
    const Matrix& m = model.params[s];
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
    params.push_back({{"name", model.params.name(s)}, {"rows", m.rows()}, {"cols", m.cols()},
                      {"values", std::move(values)}});
  }
  j["params"] = std::move(params);
  return j.dump();
}

ModelHandle model_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version");
  Signature sig;
  for (const auto& c : j.at("signature").at("concepts")) sig.add_concept(c.get<std::string>());
  for (const auto& r : j.at("signature").at("relations")) sig.add_relation(r.get<std::string>());
  for (const auto& i : j.at("signature").at("individuals")) sig.add_individual(i.get<std::string>());
  if (signature_hash(sig) != j.at("signature_hash").get<std::uint64_t>())
    throw std::runtime_error("checkpoint signature hash mismatch");
  const TrainConfig cfg = parse_config(j.at("config").get<std::string>());
  ModelHandle m = init_model(sig, cfg, j.at("seed").get<std::uint64_t>());
  std::vector<bool> filled(m.params.size(), false);
  for (const auto& p : j.at("params")) {
    const auto pname = p.at("name").get<std::string>();
    if (!m.params.contains(pname)) throw std::runtime_error("unexpected parameter '" + pname + "'");
    const std::size_t slot = m.params.slot(pname);
    Matrix& dst = m.params.at(slot);
    const auto values = p.at("values").get<std::vector<double>>();
    if (p.at("rows").get<Eigen::Index>() != dst.rows() || p.at("cols").get<Eigen::Index>() != dst.cols() ||
        static_cast<Eigen::Index>(values.size()) != dst.size())
      throw std::runtime_error("parameter '" + pname + "' has the wrong shape");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < dst.rows(); ++r)
      for (Eigen::Index c = 0; c < dst.cols(); ++c) dst(r, c) = values[k++];
    filled[slot] = true;
  }
  if (std::find(filled.begin(), filled.end(), false) != filled.end())
    throw std::runtime_error("checkpoint is missing parameters");
  m.params.check_finite();
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_checkpoint(const ModelHandle& model, const std::filesystem::path& path) {
  write_file(path, checkpoint_json(model));
}

ModelHandle load_checkpoint(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::vector<ModelHandle> load_checkpoint_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto fname = e.path().filename().string();
    if (e.is_regular_file() && fname.starts_with("model_") && fname.ends_with(".json"))
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ModelHandle> out;
  for (const auto& f : files) out.push_back(load_checkpoint(f));
  return out;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["ontology_hash"] = m.ontology_hash;
  j["seeds"] = m.seeds;
  j["outputs"] = m.outputs;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.config = j.at("config").get<std::string>();
  m.ontology_hash = j.at("ontology_hash").get<std::uint64_t>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return m;
}

}  // namespace falcon
