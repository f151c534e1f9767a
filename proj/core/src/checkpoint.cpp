#include "qcse/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qcse {

namespace {

constexpr std::uint32_t kMagic = 0x504b4351u;  // "QCKP" little-endian
constexpr std::uint32_t kVersion = 1;

nlohmann::json spec_to_json(const MlpSpec& s) {
  return {
      {"input_dim", s.input_dim},
      {"hidden", s.hidden},
      {"output_dim", s.output_dim},
      {"activation", s.activation == Activation::tanh ? "tanh" : "relu"},
      {"head", s.head == HeadKind::linear ? "linear" : "gaussian"},
      {"log_std_min", s.log_std_min},
      {"log_std_max", s.log_std_max},
  };
}

MlpSpec spec_from_json(const nlohmann::json& j) {
  MlpSpec s;
  s.input_dim = j.at("input_dim").get<int>();
  s.hidden = j.at("hidden").get<std::vector<int>>();
  s.output_dim = j.at("output_dim").get<int>();
  const std::string act = j.at("activation").get<std::string>();
  if (act == "tanh") s.activation = Activation::tanh;
  else if (act == "relu") s.activation = Activation::relu;
  else throw std::runtime_error("checkpoint: unknown activation '" + act + "'");
  const std::string head = j.at("head").get<std::string>();
  if (head == "linear") s.head = HeadKind::linear;
  else if (head == "gaussian") s.head = HeadKind::gaussian;
  else throw std::runtime_error("checkpoint: unknown head '" + head + "'");
  s.log_std_min = j.at("log_std_min").get<double>();
  s.log_std_max = j.at("log_std_max").get<double>();
  return s;
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void Checkpoint::put(const std::string& name, const Mlp& net) {
  sections[name] = Section{net.spec(), net.flatten()};
}

Mlp Checkpoint::get(const std::string& name) const {
  auto it = sections.find(name);
  if (it == sections.end()) {
    throw std::runtime_error("checkpoint: missing section '" + name + "'");
  }
  Mlp net = Mlp::zeros(it->second.spec);
  net.unflatten(it->second.params);
  return net;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  nlohmann::json header;
  header["meta"] = nlohmann::json::parse(ck.meta_json);
  header["sections"] = nlohmann::json::array();
  for (const auto& [name, sec] : ck.sections) {
    header["sections"].push_back({{"name", name},
                                  {"spec", spec_to_json(sec.spec)},
                                  {"count", sec.params.size()}});
  }
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint64_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, sec] : ck.sections) {
    os.write(reinterpret_cast<const char*>(sec.params.data()),
             static_cast<std::streamsize>(sec.params.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  if (read_pod<std::uint32_t>(is) != kMagic) throw std::runtime_error("checkpoint: bad magic");
  if (read_pod<std::uint32_t>(is) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  const auto hlen = read_pod<std::uint64_t>(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw std::runtime_error("checkpoint: truncated header");
  nlohmann::json header = nlohmann::json::parse(hs, nullptr, false);
  if (header.is_discarded()) throw std::runtime_error("checkpoint: corrupt header JSON");

  Checkpoint ck;
  ck.meta_json = header.at("meta").dump();
  for (const auto& js : header.at("sections")) {
    Checkpoint::Section sec;
    sec.spec = spec_from_json(js.at("spec"));
    const auto count = js.at("count").get<std::int64_t>();
    sec.params.resize(count);
    is.read(reinterpret_cast<char*>(sec.params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated parameter array");
    ck.sections[js.at("name").get<std::string>()] = std::move(sec);
  }
  return ck;
}

}  // namespace qcse
