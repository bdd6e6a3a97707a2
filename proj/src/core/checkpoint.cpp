#include "rahp/core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rahp::core {

namespace {

constexpr const char* kMagic = "RAHP-CHECKPOINT";

void put_le32(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xffu));
}

float get_le32(const char* in) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  nlohmann::json manifest;
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["metadata"] = checkpoint.metadata;
  manifest["tensors"] = nlohmann::json::array();
  std::string blob;
  for (const auto& t : checkpoint.tensors) {
    if (numel(t.shape) != t.values.size()) {
      throw std::invalid_argument("checkpoint tensor '" + t.name + "' has inconsistent shape");
    }
    nlohmann::json entry;
    entry["name"] = t.name;
    entry["shape"] = t.shape;
    entry["offset"] = blob.size();
    entry["bytes"] = t.values.size() * 4;
    manifest["tensors"].push_back(entry);
    blob.reserve(blob.size() + t.values.size() * 4);
    for (float v : t.values) put_le32(blob, v);
  }
  manifest["blob_bytes"] = blob.size();
  const std::string manifest_text = manifest.dump(2) + "\n";

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    out << kMagic << '\n' << "manifest_bytes " << manifest_text.size() << '\n' << manifest_text;
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) throw std::runtime_error(path.string() + " is not a checkpoint (bad magic)");
  std::string size_line;
  std::getline(in, size_line);
  std::istringstream size_stream(size_line);
  std::string key;
  std::size_t manifest_size = 0;
  if (!(size_stream >> key >> manifest_size) || key != "manifest_bytes") {
    throw std::runtime_error(path.string() + ": malformed manifest header");
  }
  std::string manifest_text(manifest_size, '\0');
  in.read(manifest_text.data(), static_cast<std::streamsize>(manifest_size));
  if (static_cast<std::size_t>(in.gcount()) != manifest_size) throw std::runtime_error(path.string() + ": truncated manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": unreadable manifest: " + e.what());
  }
  if (!manifest.contains("format_version")) throw std::runtime_error(path.string() + ": manifest lacks format_version");
  const int version = manifest.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint format version " + std::to_string(version) +
                             " (expected " + std::to_string(kCheckpointFormatVersion) + ")");
  }
  const std::size_t blob_size = manifest.at("blob_bytes").get<std::size_t>();
  std::string blob(blob_size, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(blob_size));
  if (static_cast<std::size_t>(in.gcount()) != blob_size) {
    throw std::runtime_error(path.string() + ": truncated tensor data (expected " + std::to_string(blob_size) +
                             " bytes, found " + std::to_string(in.gcount()) + ")");
  }

  Checkpoint checkpoint;
  checkpoint.metadata = manifest.value("metadata", nlohmann::json::object());
  for (const auto& entry : manifest.at("tensors")) {
    CheckpointTensor t;
    t.name = entry.at("name").get<std::string>();
    t.shape = entry.at("shape").get<Shape>();
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    const std::size_t bytes = entry.at("bytes").get<std::size_t>();
    if (bytes != numel(t.shape) * 4 || offset + bytes > blob_size) {
      throw std::runtime_error(path.string() + ": tensor '" + t.name + "' has an inconsistent manifest entry");
    }
    t.values.resize(numel(t.shape));
    for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = get_le32(blob.data() + offset + 4 * i);
    checkpoint.tensors.push_back(std::move(t));
  }
  return checkpoint;
}

template <typename T>
Checkpoint checkpoint_from_params(const ParamStore<T>& params, nlohmann::json metadata,
                                  const std::vector<std::string>& prefixes) {
  Checkpoint checkpoint;
  checkpoint.metadata = std::move(metadata);
  for (const auto& [name, tensor] : params) {
    bool selected = prefixes.empty();
    for (const auto& prefix : prefixes) selected = selected || name.rfind(prefix, 0) == 0;
    if (!selected) continue;
    checkpoint.tensors.push_back(
        CheckpointTensor{name, tensor.shape(), std::vector<float>(tensor.data().begin(), tensor.data().end())});
  }
  return checkpoint;
}

template <typename T>
void load_params_from_checkpoint(const Checkpoint& checkpoint, ParamStore<T>& params, bool require_all) {
  std::vector<std::string> problems;
  for (const auto& t : checkpoint.tensors) {
    if (!params.contains(t.name)) {
      problems.push_back("unexpected tensor '" + t.name + "'");
    } else if (params.get(t.name).shape() != t.shape) {
      problems.push_back("'" + t.name + "' has shape " + shape_to_string(t.shape) + ", model expects " +
                         shape_to_string(params.get(t.name).shape()));
    }
  }
  if (require_all) {
    for (const auto& name : params.names()) {
      if (!checkpoint.find(name)) problems.push_back("missing tensor '" + name + "'");
    }
  }
  if (!problems.empty()) {
    std::string message = "checkpoint does not match model:";
    for (const auto& p : problems) message += "\n  " + p;
    throw std::runtime_error(message);
  }
  for (const auto& t : checkpoint.tensors) {
    auto dst = params.get(t.name).mutable_data();
    for (std::size_t i = 0; i < t.values.size(); ++i) dst[i] = static_cast<T>(t.values[i]);
  }
}

template Checkpoint checkpoint_from_params<float>(const ParamStore<float>&, nlohmann::json,
                                                  const std::vector<std::string>&);
template Checkpoint checkpoint_from_params<double>(const ParamStore<double>&, nlohmann::json,
                                                   const std::vector<std::string>&);
template void load_params_from_checkpoint<float>(const Checkpoint&, ParamStore<float>&, bool);
template void load_params_from_checkpoint<double>(const Checkpoint&, ParamStore<double>&, bool);

}  // namespace rahp::core
