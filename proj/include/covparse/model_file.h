#ifndef COVPARSE_MODEL_FILE_H_
#define COVPARSE_MODEL_FILE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "covparse/scorer.h"

namespace covparse {

// Layout, all integers little-endian:
//   "COVPARSE" | u32 version | u64 length | metadata JSON (sorted keys)
//   u64 tensor count | per tensor: u32 name length, name, u32 rank,
//   u64 dims..., u8 trainable, f32 values...
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const Model& model, std::ostream& out);
void save_model_file(const Model& model, const std::string& path);
// Throws ModelError for a bad magic string, an unsupported version or a
// truncated or inconsistent file.
Model load_model(std::istream& in);
Model load_model_file(const std::string& path);

// Canonical JSON with the field names of Hyperparams.
std::string hyperparams_to_json(const Hyperparams& hp);
// Overrides the fields of `base` named in `text`. Throws InvalidArgument on
// unknown keys or wrongly typed values.
Hyperparams hyperparams_from_json(std::string_view text, Hyperparams base = {});

}  // namespace covparse

#endif  // COVPARSE_MODEL_FILE_H_
