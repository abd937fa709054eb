#pragma once

#include <optional>
#include <string>
#include <vector>

#include "musobench/model.hpp"

namespace musobench {

enum class Paradigm { ShortCoT, LongCoT };

std::string to_string(Paradigm p);
Paradigm paradigm_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Prompt templates. The built-in texts are embedded resources; every one
// can be overridden by dropping a file with the matching name into a
// template directory (see load_prompts), which is how prompt-ablation
// experiments swap wording without rebuilding.

struct PromptLibrary {
  std::string answer_timetabling;  // answer.timetabling.txt
  std::string answer_subsetsum;    // answer.subsetsum.txt
  std::string short_cot_suffix;    // short_cot_suffix.txt
  std::string confidence;          // confidence.txt
  std::string recheck;             // recheck.txt
  std::string explore;             // explore.txt
};

const PromptLibrary& builtin_prompts();

/// Built-ins with any file present in `dir` replacing its template.
PromptLibrary load_prompts(const std::string& dir);

/// Answer-round instruction with the rendered question substituted at the
/// <<QUESTION>> slot. Short-CoT appends the guiding phrase on its own line.
std::string build_answer_prompt(const BenchmarkItem& item, Paradigm paradigm,
                                const PromptLibrary& prompts = builtin_prompts());

std::string build_confidence_prompt(const PromptLibrary& prompts = builtin_prompts());
std::string build_recheck_prompt(const PromptLibrary& prompts = builtin_prompts());
std::string build_explore_prompt(const PromptLibrary& prompts = builtin_prompts());

// ---------------------------------------------------------------------------
// Reply parsing. Parsing is purely syntactic: solutions that violate the
// instance's constraints are kept so they can count against precision.

enum class ChangeFlag { Unchange, Change };

struct ParseOutcome {
  SolutionSet solutions;
  std::optional<int> confidence;  // verbal 0-100 scale
  std::optional<ChangeFlag> change;
  std::vector<std::string> diagnostics;
};

/// Strips reasoning-trace regions: <think>...</think> spans, plus any
/// prefix ending at a stray </think> (the shape Long-CoT replies take).
std::string strip_reasoning(const std::string& text);

/// Extracts every "Solution k" block. TimeTabling rows come from the
/// 4-column table form with tolerant cell tokens ("T3" or "3"); SubsetSum
/// from brace/bracket integer lists. Malformed blocks are skipped with a
/// diagnostic; the result is canonical and duplicate-free. Zero parseable
/// blocks is not an error: it yields an empty set plus a diagnostic.
ParseOutcome parse_solutions(const std::string& text, TaskKind kind);

/// Integer inside [[CONFIDENCE: \boxed{..}]]; falls back to "CONFIDENCE"
/// followed by an integer within 40 characters, then to a bare \boxed{..}.
/// The last match wins. Values outside 0-100 are rejected as missing with
/// a diagnostic.
std::optional<int> parse_confidence(const std::string& text,
                                    std::vector<std::string>* diagnostics = nullptr);

/// [[UNCHANGE]] keeps the previous set; [[CHANGE]] re-parses the full
/// restated answer. With neither marker the flag is inferred from whether
/// any solutions parse, with a diagnostic.
ParseOutcome parse_recheck(const std::string& text,
                           const SolutionSet& previous, TaskKind kind);

/// Renders a solution set in the answer format the templates ask for,
/// including the trailing total line. Used by the scripted mock and the
/// round-trip tests.
std::string format_answer(const SolutionSet& set);

}  // namespace musobench
