#include "molkd/io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload I/O assumes a little-endian host");

namespace molkd::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[6] = {'M', 'O', 'L', 'K', 'D', '1'};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

std::string strip(const std::string& text) {
  std::size_t a = 0;
  std::size_t b = text.size();
  while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  return text.substr(a, b - a);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(const std::string& text, const char* what) {
  const std::string t = strip(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(Errc::bad_config, std::string(what) + " is not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<ReactionRecord> load_reactions_tsv(const std::string& path) {
  std::vector<ReactionRecord> records;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    records.push_back(parse_reaction_line(line));
  }
  if (records.empty()) {
    throw Error(Errc::empty_dataset, "no reactions in " + path);
  }
  return records;
}

PropertyDataset load_property_csv(const std::string& path, TaskKind kind) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw Error(Errc::empty_dataset, "property CSV is empty: " + path);
  }
  const std::vector<std::string> header = split(lines[0], ',');
  if (header.size() < 2 || strip(header[0]) != "smiles") {
    throw Error(Errc::bad_config, "property CSV header must be smiles,label[,label2,...]");
  }

  PropertyDataset data;
  data.task = kind;
  for (std::size_t t = 1; t < header.size(); ++t) data.task_names.push_back(strip(header[t]));

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    const std::vector<std::string> cells = split(lines[i], ',');
    if (cells.size() != header.size()) {
      throw Error(Errc::bad_column_count,
                  "row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    PropertyRecord record;
    record.molecule = explicit_hydrogens(parse_smiles(strip(cells[0])));
    for (std::size_t t = 1; t < cells.size(); ++t) {
      const std::string cell = strip(cells[t]);
      if (cell.empty()) {
        record.labels.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const double value = parse_double(cell, "label");
      if (kind == TaskKind::binary_classification && value != 0.0 && value != 1.0) {
        throw Error(Errc::label_out_of_domain,
                    "classification label must be 0 or 1, got '" + cell + "'");
      }
      record.labels.push_back(value);
    }
    data.records.push_back(std::move(record));
  }
  if (data.records.empty()) {
    throw Error(Errc::empty_dataset, "no molecules in " + path);
  }
  return data;
}

std::vector<std::size_t> load_split_indices(const std::string& path, std::size_t max) {
  std::vector<std::size_t> indices;
  for (const std::string& line : read_lines(path)) {
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw Error(Errc::bad_config, "split file line is not an index: '" + line + "'");
    }
    if (value >= max) {
      throw Error(Errc::bad_config, "split index " + t + " out of range (dataset has " +
                                        std::to_string(max) + " rows)");
    }
    indices.push_back(value);
  }
  return indices;
}

PerturbationSet load_perturbation_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw Error(Errc::empty_dataset, "perturbation CSV is empty: " + path);
  }
  const std::string expected = "smiles,property,perturbed_smiles,perturbed_property,level";
  if (strip(lines[0]) != expected) {
    throw Error(Errc::bad_config, "perturbation CSV header must be: " + expected);
  }
  PerturbationSet pset;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    const std::vector<std::string> cells = split(lines[i], ',');
    if (cells.size() != 5) {
      throw Error(Errc::bad_column_count,
                  "perturbation row " + std::to_string(i + 1) + " needs 5 cells");
    }
    PerturbationPair pair;
    pair.molecule = explicit_hydrogens(parse_smiles(strip(cells[0])));
    pair.property = parse_double(cells[1], "property");
    pair.perturbed = explicit_hydrogens(parse_smiles(strip(cells[2])));
    pair.perturbed_property = parse_double(cells[3], "perturbed property");
    const double level = parse_double(cells[4], "level");
    if (level != 1.0 && level != 2.0 && level != 3.0) {
      throw Error(Errc::bad_config, "perturbation level must be 1, 2, or 3");
    }
    pair.level = static_cast<int>(level);
    pset.pairs.push_back(std::move(pair));
  }
  return pset;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::map<std::string, std::string> config;
  for (const std::string& line : read_lines(path)) {
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::bad_config, "config line is not 'key = value': '" + line + "'");
    }
    config[strip(t.substr(0, eq))] = strip(t.substr(eq + 1));
  }
  return config;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open file: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void atomic_write(const std::string& path, const std::string& bytes) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::io_error, "cannot open file for writing: " + temp.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(temp);
      throw Error(Errc::io_error, "short write to " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw Error(Errc::io_error, "cannot rename " + temp.string() + " to " + path);
  }
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

json encoder_manifest(const EncoderParams& params) {
  json j;
  j["arch"] = arch_name(params.arch);
  j["layers"] = params.layers;
  j["hops"] = params.hops;
  j["dims"] = params.dims;
  return j;
}

void read_encoder_manifest(const json& j, EncoderParams& params) {
  params.arch = arch_from_name(j.at("arch").get<std::string>());
  params.layers = j.at("layers").get<int>();
  params.hops = j.at("hops").get<int>();
  params.dims = j.at("dims").get<std::vector<int>>();
}

std::string pack(json manifest, const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  json tensor_list = json::array();
  std::size_t payload_doubles = 0;
  for (const auto& [name, tensor] : tensors) {
    json t;
    t["name"] = name;
    t["shape"] = tensor->shape();
    tensor_list.push_back(std::move(t));
    payload_doubles += tensor->size();
  }
  manifest["tensors"] = std::move(tensor_list);
  manifest["meta"] = json{{"tool", "molkd"}, {"version", "0.1.0"}};

  const std::string manifest_bytes = manifest.dump();
  if (manifest_bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::io_error, "manifest too large");
  }

  std::string out;
  out.reserve(sizeof(kMagic) + 4 + manifest_bytes.size() + payload_doubles * 8);
  out.append(kMagic, sizeof(kMagic));
  const auto len = static_cast<std::uint32_t>(manifest_bytes.size());
  char len_bytes[4];
  std::memcpy(len_bytes, &len, 4);
  out.append(len_bytes, 4);
  out.append(manifest_bytes);
  for (const auto& [name, tensor] : tensors) {
    const auto* raw = reinterpret_cast<const char*>(tensor->data().data());
    out.append(raw, tensor->size() * 8);
  }
  return out;
}

struct Unpacked {
  json manifest;
  std::map<std::string, Tensor> tensors;
};

Unpacked unpack(const std::string& bytes, bool payload_needed) {
  if (bytes.size() < sizeof(kMagic) + 4) {
    throw Error(Errc::truncated_payload, "checkpoint shorter than its header");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::bad_magic, "not a checkpoint file (bad magic bytes)");
  }
  std::uint32_t manifest_len = 0;
  std::memcpy(&manifest_len, bytes.data() + sizeof(kMagic), 4);
  const std::size_t manifest_at = sizeof(kMagic) + 4;
  if (bytes.size() < manifest_at + manifest_len) {
    throw Error(Errc::truncated_payload, "checkpoint manifest is truncated");
  }

  Unpacked result;
  result.manifest =
      json::parse(bytes.begin() + static_cast<long>(manifest_at),
                  bytes.begin() + static_cast<long>(manifest_at + manifest_len), nullptr,
                  /*allow_exceptions=*/false);
  if (result.manifest.is_discarded()) {
    throw Error(Errc::truncated_payload, "checkpoint manifest is not valid JSON");
  }
  if (!payload_needed) return result;

  std::size_t payload_doubles = 0;
  for (const json& t : result.manifest.at("tensors")) {
    std::size_t n = 1;
    for (const auto& e : t.at("shape")) n *= e.get<std::size_t>();
    payload_doubles += n;
  }
  const std::size_t payload_at = manifest_at + manifest_len;
  if (bytes.size() != payload_at + payload_doubles * 8) {
    throw Error(Errc::truncated_payload,
                "payload length does not match the manifest-declared tensor sizes");
  }

  std::size_t at = payload_at;
  for (const json& t : result.manifest.at("tensors")) {
    std::vector<std::size_t> shape = t.at("shape").get<std::vector<std::size_t>>();
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    std::vector<double> data(n);
    std::memcpy(data.data(), bytes.data() + at, n * 8);
    at += n * 8;
    result.tensors.emplace(t.at("name").get<std::string>(),
                           Tensor(std::move(shape), std::move(data)));
  }
  return result;
}

Tensor take_tensor(std::map<std::string, Tensor>& tensors, const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) {
    throw Error(Errc::truncated_payload, "checkpoint is missing tensor '" + name + "'");
  }
  Tensor t = std::move(it->second);
  tensors.erase(it);
  return t;
}

}  // namespace

void save_teacher(const std::string& path, const TeacherModel& model) {
  json manifest;
  manifest["format"] = 1;
  manifest["kind"] = "teacher";
  manifest["encoder"] = encoder_manifest(model.params);
  manifest["vocab"] = json::parse(model.vocab.to_json());
  manifest["config"] = model.config_echo;

  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (std::size_t i = 0; i < model.params.weights.size(); ++i) {
    tensors.emplace_back("encoder.w" + std::to_string(i), &model.params.weights[i]);
  }
  atomic_write(path, pack(std::move(manifest), tensors));
}

TeacherModel load_teacher(const std::string& path) {
  Unpacked u = unpack(read_file(path), /*payload_needed=*/true);
  if (u.manifest.at("kind").get<std::string>() != "teacher") {
    throw Error(Errc::bad_config, path + " is not a teacher checkpoint");
  }
  TeacherModel model;
  read_encoder_manifest(u.manifest.at("encoder"), model.params);
  model.vocab = FeatureVocab::from_json(u.manifest.at("vocab").dump());
  if (u.manifest.contains("config")) {
    model.config_echo =
        u.manifest.at("config").get<std::map<std::string, std::string>>();
  }
  const int count = weights_per_layer(model.params.arch, model.params.hops) * model.params.layers;
  for (int i = 0; i < count; ++i) {
    model.params.weights.push_back(take_tensor(u.tensors, "encoder.w" + std::to_string(i)));
  }
  return model;
}

void save_predictor(const std::string& path, const PredictorModel& model) {
  const Predictor& p = model.predictor;
  json manifest;
  manifest["format"] = 1;
  manifest["kind"] = "predictor";
  manifest["student"] = encoder_manifest(p.student);
  manifest["task"] = task_name(p.task);
  manifest["task_names"] = p.task_names;
  manifest["vocab"] = json::parse(p.vocab.to_json());
  manifest["config"] = model.config_echo;

  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (std::size_t i = 0; i < p.student.weights.size(); ++i) {
    tensors.emplace_back("student.w" + std::to_string(i), &p.student.weights[i]);
  }
  tensors.emplace_back("head.w1", &p.head_w1);
  tensors.emplace_back("head.b1", &p.head_b1);
  tensors.emplace_back("head.w2", &p.head_w2);
  tensors.emplace_back("head.b2", &p.head_b2);
  tensors.emplace_back("phi.w", &p.projection.weight);
  tensors.emplace_back("phi.b", &p.projection.bias);
  atomic_write(path, pack(std::move(manifest), tensors));
}

PredictorModel load_predictor(const std::string& path) {
  Unpacked u = unpack(read_file(path), /*payload_needed=*/true);
  if (u.manifest.at("kind").get<std::string>() != "predictor") {
    throw Error(Errc::bad_config, path + " is not a predictor checkpoint");
  }
  PredictorModel model;
  Predictor& p = model.predictor;
  read_encoder_manifest(u.manifest.at("student"), p.student);
  p.task = task_from_name(u.manifest.at("task").get<std::string>());
  p.task_names = u.manifest.at("task_names").get<std::vector<std::string>>();
  p.vocab = FeatureVocab::from_json(u.manifest.at("vocab").dump());
  if (u.manifest.contains("config")) {
    model.config_echo =
        u.manifest.at("config").get<std::map<std::string, std::string>>();
  }
  const int count = weights_per_layer(p.student.arch, p.student.hops) * p.student.layers;
  for (int i = 0; i < count; ++i) {
    p.student.weights.push_back(take_tensor(u.tensors, "student.w" + std::to_string(i)));
  }
  p.head_w1 = take_tensor(u.tensors, "head.w1");
  p.head_b1 = take_tensor(u.tensors, "head.b1");
  p.head_w2 = take_tensor(u.tensors, "head.w2");
  p.head_b2 = take_tensor(u.tensors, "head.b2");
  p.projection.weight = take_tensor(u.tensors, "phi.w");
  p.projection.bias = take_tensor(u.tensors, "phi.b");
  return model;
}

std::string checkpoint_kind(const std::string& path) {
  Unpacked u = unpack(read_file(path), /*payload_needed=*/false);
  return u.manifest.at("kind").get<std::string>();
}

}  // namespace molkd::io
