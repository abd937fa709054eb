#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "musobench/corpus.hpp"
#include "musobench/model.hpp"

// JSON (de)serialization for corpus files and the pieces they embed.
// Schema identifiers are embedded in every top-level document so later
// readers can refuse drifted files instead of misreading them.

namespace musobench {

using json = nlohmann::json;

inline constexpr const char* kCorpusSchema = "musobench.corpus/1";
inline constexpr const char* kGenConfigSchema = "musobench.genconfig/1";

json to_json(const TimeTablingInstance& inst);
json to_json(const SubsetSumInstance& inst);
TimeTablingInstance timetabling_from_json(const json& j);
SubsetSumInstance subsetsum_from_json(const json& j);

json to_json(const SolutionSet& set);
SolutionSet solution_set_from_json(TaskKind kind, const json& j);

json to_json(const StrataConfig& strata);
StrataConfig strata_from_json(const json& j);

json to_json(const TimeTablingParams& params);
json to_json(const SubsetSumParams& params);
TimeTablingParams timetabling_params_from_json(const json& j);
SubsetSumParams subsetsum_params_from_json(const json& j);

json to_json(const BuildConfig& config);
BuildConfig build_config_from_json(const json& j);

json to_json(const BenchmarkItem& item);
BenchmarkItem item_from_json(const json& j);

json to_json(const Corpus& corpus);
Corpus corpus_from_json(const json& j);

// File IO. Writes go through a temp file + rename so partial output is
// never left behind under the final name.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& bytes);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

/// Digest of the exact corpus file bytes, recorded by runs and re-checked
/// by scoring.
std::string corpus_file_digest(const std::string& path);

/// Parse with a DataError instead of nlohmann's exception on bad input.
json parse_json(const std::string& text, const std::string& what);

}  // namespace musobench
