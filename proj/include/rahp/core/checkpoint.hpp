#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rahp/core/params.hpp"

namespace rahp::core {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

/// In-memory checkpoint: free-form metadata plus named float32 tensors.
///
/// On disk:
///   line 1  "RAHP-CHECKPOINT"
///   line 2  "manifest_bytes <n>"
///   <n bytes of JSON manifest: format_version, metadata, tensors[{name, shape, offset, bytes}], blob_bytes>
///   blob: little-endian float32 values of each tensor, in manifest order,
///         offsets relative to the start of the blob.
struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<CheckpointTensor> tensors;

  const CheckpointTensor* find(const std::string& name) const;
};

/// Writes to a temporary sibling file, then renames over `path`.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws std::runtime_error on bad magic, version mismatch, or truncation.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Snapshot of every parameter whose name starts with one of `prefixes`
/// (all parameters when `prefixes` is empty).
template <typename T>
Checkpoint checkpoint_from_params(const ParamStore<T>& params, nlohmann::json metadata,
                                  const std::vector<std::string>& prefixes = {});

/// Copies checkpoint values into existing parameters with identical names and
/// shapes. Everything is validated before anything is written, so a failed
/// call leaves `params` untouched. With `require_all`, every parameter must
/// be present in the checkpoint.
template <typename T>
void load_params_from_checkpoint(const Checkpoint& checkpoint, ParamStore<T>& params, bool require_all = true);

}  // namespace rahp::core
