#pragma once

#include <string>

#include "brw/model.hpp"
#include "brw/oracle.hpp"
#include "brw/simulate.hpp"

namespace brw {

/// Shortest round-trip decimal representation (deterministic formatting).
std::string format_double(double v);

/// Run CSV: `# key=value` comment header (version, kind, model-hash, seed,
/// rng, exact-threshold) then `n,k,count` rows, snapshots in time order.
void write_run_csv(const RunRecord& rec, const std::string& path);

/// Reads a run CSV back; verifies the recorded model hash against `model`
/// (mismatch_error on disagreement).
RunRecord read_run_csv(const std::string& path, const ModelSpec& model);

/// Expected-profile CSV: `n,k,value` with value an exact `p/q` string in
/// rational mode, a decimal otherwise.
void write_expected_csv(const ExpectedProfile& ep, const ModelSpec& model, const std::string& path);
ExpectedProfile read_expected_csv(const std::string& path, const ModelSpec& model);

}  // namespace brw
