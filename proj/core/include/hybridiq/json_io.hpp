#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridiq/classical_space.hpp"
#include "hybridiq/correlations.hpp"
#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "hybridiq/locc.hpp"

// JSON encodings of every value type. Matrices are row-major (re, im) pairs:
// {"dim": d, "re": [...], "im": [...]} for square matrices and
// {"rows": r, "cols": c, "re": [...], "im": [...]} otherwise. Decoders throw
// Error(ParseError) on malformed input; library validation errors propagate
// unchanged.
namespace hybridiq::io {

using nlohmann::json;

json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json to_json(const ClassicalSpace& space);
ClassicalSpace space_from_json(const json& j);

json to_json(const MarkovKernel& kernel);
// Spaces default to counting measure sized from the matrix.
MarkovKernel kernel_from_json(const json& j, const ClassicalSpace* src = nullptr,
                              const ClassicalSpace* dst = nullptr);

json to_json(const HybridState& w);
HybridState state_from_json(const json& j);

// Decoded without validation, for reporting.
struct RawState {
  ClassicalSpace space;
  int qdim;
  std::vector<CMatrix> masses;
};
RawState raw_state_from_json(const json& j);

json to_json(const HybridChannel& channel);
// Accepts explicit blocks as well as {"type": "non_interacting", ...} and
// {"type": "coeff_kernel", ...} constructor specs, which are lowered.
HybridChannel channel_from_json(const json& j);

struct RawChannel {
  ClassicalSpace src;
  ClassicalSpace dst;
  int qdim_src;
  int qdim_dst;
  std::vector<BlockEntry> blocks;
};
RawChannel raw_channel_from_json(const json& j);

json to_json(const LoccProtocol& protocol);
LoccProtocol protocol_from_json(const json& j);

json to_json(const MonotonicityReport& report);

json read_file(const std::filesystem::path& path);
// Pretty-printed JSON followed by a newline. Throws IoError.
void write_file(const std::filesystem::path& path, const json& j);

}  // namespace hybridiq::io
