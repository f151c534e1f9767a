#include "qcse/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace qcse {

namespace {

constexpr std::uint32_t kMagic = 0x46534451u;  // "QDSF"
constexpr std::uint32_t kFileVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DatasetSchemaError("dataset: truncated file");
  return v;
}

void write_vec(std::string& buf, const Eigen::VectorXd& v) {
  const auto* p = reinterpret_cast<const char*>(v.data());
  buf.append(p, v.size() * sizeof(double));
}

Eigen::VectorXd read_vec(const char*& p, const char* end, int n) {
  if (p + n * sizeof(double) > end) throw DatasetSchemaError("dataset: truncated record");
  Eigen::VectorXd v(n);
  std::memcpy(v.data(), p, n * sizeof(double));
  p += n * sizeof(double);
  return v;
}

bool same_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

void Dataset::validate() const {
  if (transitions.empty()) throw DatasetSchemaError("dataset: must be nonempty");
  if (meta.state_dim < 1) throw DatasetSchemaError("dataset: state_dim must be >= 1");
  for (const auto& t : transitions) {
    if (t.state.size() != meta.state_dim || t.next_state.size() != meta.state_dim) {
      throw DatasetSchemaError("dataset: transition state dimension mismatch");
    }
    if (!std::isfinite(t.reward)) throw DatasetSchemaError("dataset: non-finite reward");
    if (meta.action_kind == ActionKind::discrete) {
      if (t.action_index < 0 || t.action_index >= meta.action_dim) {
        throw DatasetSchemaError("dataset: action index out of range");
      }
    } else if (t.action.size() != meta.action_dim) {
      throw DatasetSchemaError("dataset: action dimension mismatch");
    }
  }
}

bool Dataset::operator==(const Dataset& other) const {
  if (meta.schema_version != other.meta.schema_version || meta.env_id != other.meta.env_id ||
      meta.behavior_id != other.meta.behavior_id || meta.seed != other.meta.seed ||
      meta.action_kind != other.meta.action_kind || meta.state_dim != other.meta.state_dim ||
      meta.action_dim != other.meta.action_dim ||
      transitions.size() != other.transitions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& a = transitions[i];
    const Transition& b = other.transitions[i];
    if (a.action_index != b.action_index || a.done != b.done) return false;
    if (std::memcmp(&a.reward, &b.reward, sizeof(double)) != 0) return false;
    if (!same_vec(a.state, b.state) || !same_vec(a.action, b.action) ||
        !same_vec(a.next_state, b.next_state)) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> Dataset::episode_starts() const {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (i == 0 || transitions[i - 1].done ||
        !same_vec(transitions[i - 1].next_state, transitions[i].state)) {
      starts.push_back(i);
    }
  }
  return starts;
}

double Dataset::average_episode_return() const {
  const auto starts = episode_starts();
  double total = 0.0;
  for (const auto& t : transitions) total += t.reward;
  return total / static_cast<double>(starts.size());
}

void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  nlohmann::json header = {
      {"schema_version", ds.meta.schema_version},
      {"env_id", ds.meta.env_id},
      {"behavior_id", ds.meta.behavior_id},
      {"seed", ds.meta.seed},
      {"action_kind", ds.meta.action_kind == ActionKind::discrete ? "discrete" : "box"},
      {"state_dim", ds.meta.state_dim},
      {"action_dim", ds.meta.action_dim},
      {"size", ds.transitions.size()},
  };
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dataset: cannot open '" + path + "' for writing");
  write_pod(os, kMagic);
  write_pod(os, kFileVersion);
  write_pod(os, static_cast<std::uint64_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  std::string rec;
  for (const auto& t : ds.transitions) {
    rec.clear();
    write_vec(rec, t.state);
    if (ds.meta.action_kind == ActionKind::discrete) {
      const auto idx = static_cast<std::int32_t>(t.action_index);
      rec.append(reinterpret_cast<const char*>(&idx), sizeof(idx));
    } else {
      write_vec(rec, t.action);
    }
    rec.append(reinterpret_cast<const char*>(&t.reward), sizeof(double));
    write_vec(rec, t.next_state);
    rec.push_back(t.done ? 1 : 0);
    write_pod(os, static_cast<std::uint32_t>(rec.size()));
    os.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  }
  if (!os) throw std::runtime_error("dataset: write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset: cannot open '" + path + "'");
  if (read_pod<std::uint32_t>(is) != kMagic) throw DatasetSchemaError("dataset: bad magic");
  if (read_pod<std::uint32_t>(is) != kFileVersion) {
    throw DatasetSchemaError("dataset: unsupported file version");
  }
  const auto hlen = read_pod<std::uint64_t>(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw DatasetSchemaError("dataset: truncated header");
  nlohmann::json header = nlohmann::json::parse(hs, nullptr, false);
  if (header.is_discarded()) throw DatasetSchemaError("dataset: corrupt header JSON");

  Dataset ds;
  try {
    ds.meta.schema_version = header.at("schema_version").get<int>();
    ds.meta.env_id = header.at("env_id").get<std::string>();
    ds.meta.behavior_id = header.at("behavior_id").get<std::string>();
    ds.meta.seed = header.at("seed").get<std::uint64_t>();
    const std::string kind = header.at("action_kind").get<std::string>();
    if (kind == "discrete") ds.meta.action_kind = ActionKind::discrete;
    else if (kind == "box") ds.meta.action_kind = ActionKind::box;
    else throw DatasetSchemaError("dataset: unknown action kind '" + kind + "'");
    ds.meta.state_dim = header.at("state_dim").get<int>();
    ds.meta.action_dim = header.at("action_dim").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetSchemaError(std::string("dataset: header field error: ") + e.what());
  }
  if (ds.meta.schema_version != 1) throw DatasetSchemaError("dataset: unsupported schema version");
  const auto size = header.at("size").get<std::uint64_t>();

  ds.transitions.reserve(size);
  std::string rec;
  for (std::uint64_t i = 0; i < size; ++i) {
    const auto len = read_pod<std::uint32_t>(is);
    rec.resize(len);
    is.read(rec.data(), static_cast<std::streamsize>(len));
    if (!is) throw DatasetSchemaError("dataset: truncated record");
    const char* p = rec.data();
    const char* end = rec.data() + rec.size();

    Transition t;
    t.state = read_vec(p, end, ds.meta.state_dim);
    if (ds.meta.action_kind == ActionKind::discrete) {
      if (p + sizeof(std::int32_t) > end) throw DatasetSchemaError("dataset: truncated record");
      std::int32_t idx;
      std::memcpy(&idx, p, sizeof(idx));
      p += sizeof(idx);
      t.action_index = idx;
    } else {
      t.action = read_vec(p, end, ds.meta.action_dim);
    }
    if (p + sizeof(double) > end) throw DatasetSchemaError("dataset: truncated record");
    std::memcpy(&t.reward, p, sizeof(double));
    p += sizeof(double);
    t.next_state = read_vec(p, end, ds.meta.state_dim);
    if (p + 1 > end) throw DatasetSchemaError("dataset: truncated record");
    t.done = (*p != 0);
    ++p;
    if (p != end) throw DatasetSchemaError("dataset: record length mismatch");
    ds.transitions.push_back(std::move(t));
  }
  ds.validate();
  return ds;
}

}  // namespace qcse
