#include "musobench/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace musobench {

std::string to_string(Paradigm p) {
  return p == Paradigm::ShortCoT ? "short" : "long";
}

Paradigm paradigm_from_string(const std::string& name) {
  if (name == "short" || name == "short-cot") return Paradigm::ShortCoT;
  if (name == "long" || name == "long-cot") return Paradigm::LongCoT;
  throw ConfigError("unknown paradigm: '" + name + "' (expected short or long)");
}

namespace {

constexpr const char* kAnswerTimeTabling =
    R"(You are asked to perform a timetabling task.
Please find ALL FEASIBLE SCHEDULES that satisfies all constraints one by
one and output the number of feasible schedules.
Output format example:
Solution 1:
| Course  | Time  | Room  | Teacher  |
|---------|-------|-------|----------|
| Course0 | T2    | R0    | P0       |
| Course1 | T3    | R2    | P2       |
| Course2 | T0    | R2    | P1       |
Solution 2:
| Course  | Time  | Room  | Teacher  |
|---------|-------|-------|----------|
| Course0 | T2    | R0    | P0       |
| Course1 | T3    | R2    | P2       |
| Course2 | T1    | R2    | P1       |
...

Total xxx feasible solutions shown above.

The question is <<QUESTION>>
You must output all feasible solutions without using ellipsis, etc.
The most important thing is to FIND THE SPECIFIC CONTENT OF EACH SOLUTION,
rather than just counting the number of solutions.
Please note that the examples I gave you are just to show the format, the
actual answer may be different from the examples shown.)";

constexpr const char* kAnswerSubsetSum =
    R"(You are asked to perform a subset-sum
task.
Please find ALL FEASIBLE SUBSETS that meet the requirements one by
one and output the number of feasible subsets.
Output format example:
Solution 1: {1, 3, 5}
Solution 2: {1, 4, 4}
...

Total xxx feasible solutions shown above.

The question is <<QUESTION>>
You must output all feasible solutions without using ellipsis, etc.
The most important thing is to FIND THE SPECIFIC CONTENT OF EACH SOLUTION,
rather than just counting the number of solutions.
Please note that the examples I gave you are just to show the format, the
actual answer may be different from the examples shown.)";

constexpr const char* kShortCotSuffix = "Think step by step before answering.";

constexpr const char* kConfidence =
    R"(Please rate your confidence in the proposed answer on a scale of 0-100.
Put your confidence score within [[CONFIDENCE: \boxed{}]])";

constexpr const char* kRecheck =
    R"(Recheck all your answers. You can now supplement and correct your answers.
If you think your answer does not need to be changed, please output
[[UNCHANGE]].
If you need to supplement or correct your answer, please input [[CHANGE]]
and re-output your new answer IN FULL, NOT JUST THE PART YOU CHANGED.)";

constexpr const char* kExplore = "Wait, there may be other solutions.";

}  // namespace

const PromptLibrary& builtin_prompts() {
  static const PromptLibrary lib = {kAnswerTimeTabling, kAnswerSubsetSum,
                                    kShortCotSuffix,    kConfidence,
                                    kRecheck,           kExplore};
  return lib;
}

PromptLibrary load_prompts(const std::string& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("prompt override directory not found: " + dir);
  PromptLibrary lib = builtin_prompts();
  auto load = [&dir](const char* name, std::string& slot) {
    const auto path = std::filesystem::path(dir) / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' ||
                             text.back() == ' ' || text.back() == '\t'))
      text.pop_back();
    slot = text;
  };
  load("answer.timetabling.txt", lib.answer_timetabling);
  load("answer.subsetsum.txt", lib.answer_subsetsum);
  load("short_cot_suffix.txt", lib.short_cot_suffix);
  load("confidence.txt", lib.confidence);
  load("recheck.txt", lib.recheck);
  load("explore.txt", lib.explore);
  return lib;
}

std::string build_answer_prompt(const BenchmarkItem& item, Paradigm paradigm,
                                const PromptLibrary& prompts) {
  const std::string& base = item.task_kind == TaskKind::TimeTabling
                                ? prompts.answer_timetabling
                                : prompts.answer_subsetsum;
  std::string text = base;
  const std::string slot = "<<QUESTION>>";
  const auto pos = text.find(slot);
  if (pos == std::string::npos)
    throw ConfigError("answer template lacks the <<QUESTION>> slot");
  text.replace(pos, slot.size(), item.question_text);
  if (paradigm == Paradigm::ShortCoT) {
    text += "\n";
    text += prompts.short_cot_suffix;
  }
  return text;
}

std::string build_confidence_prompt(const PromptLibrary& prompts) {
  return prompts.confidence;
}

std::string build_recheck_prompt(const PromptLibrary& prompts) {
  return prompts.recheck;
}

std::string build_explore_prompt(const PromptLibrary& prompts) {
  return prompts.explore;
}

// ---------------------------------------------------------------------------
// Parsing

std::string strip_reasoning(const std::string& text) {
  std::string out = text;
  std::size_t open;
  while ((open = out.find("<think>")) != std::string::npos) {
    const auto close = out.find("</think>", open + 7);
    if (close == std::string::npos) {
      out.erase(open);  // unterminated trace runs to the end
      break;
    }
    out.erase(open, close + 8 - open);
  }
  const auto stray = out.find("</think>");
  if (stray != std::string::npos) out.erase(0, stray + 8);
  return out;
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

/// "T3" / "Course0" / "12" -> index; nullopt for anything else.
std::optional<int> parse_cell_index(std::string cell,
                                    std::initializer_list<const char*> prefixes) {
  cell = trim(cell);
  for (const char* prefix : prefixes) {
    const std::size_t len = std::string(prefix).size();
    if (cell.size() > len && cell.compare(0, len, prefix) == 0) {
      cell = trim(cell.substr(len));
      break;
    }
  }
  if (!all_digits(cell)) return std::nullopt;
  try {
    return std::stoi(cell);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> split_table_row(const std::string& line) {
  // "| a | b |" -> {"a", "b"}
  std::vector<std::string> cells;
  std::size_t pos = line.find('|');
  while (pos != std::string::npos) {
    const auto next = line.find('|', pos + 1);
    if (next == std::string::npos) break;
    cells.push_back(trim(line.substr(pos + 1, next - pos - 1)));
    pos = next;
  }
  return cells;
}

bool is_separator_row(const std::vector<std::string>& cells) {
  return !cells.empty() &&
         std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
           return !c.empty() && c.find_first_not_of("-: ") == std::string::npos;
         });
}

bool is_header_row(const std::vector<std::string>& cells) {
  return !cells.empty() && (cells[0] == "Course" || cells[0] == "course");
}

struct SolutionBlock {
  std::size_t ordinal = 0;
  std::string body;
};

std::vector<SolutionBlock> find_blocks(const std::string& text) {
  // Occurrences of "Solution <digits> :" introduce blocks; each body runs
  // to the next header or the end.
  std::vector<std::pair<std::size_t, std::size_t>> headers;  // (pos, body_start)
  std::size_t pos = 0;
  while ((pos = text.find("Solution", pos)) != std::string::npos) {
    std::size_t p = pos + 8;
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    const std::size_t digits_begin = p;
    while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p])))
      ++p;
    if (p == digits_begin) {
      pos += 8;
      continue;
    }
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    if (p >= text.size() || text[p] != ':') {
      pos += 8;
      continue;
    }
    headers.emplace_back(pos, p + 1);
    pos = p + 1;
  }
  std::vector<SolutionBlock> blocks;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t body_start = headers[i].second;
    const std::size_t body_end =
        i + 1 < headers.size() ? headers[i + 1].first : text.size();
    blocks.push_back({i + 1, text.substr(body_start, body_end - body_start)});
  }
  return blocks;
}

std::optional<ScheduleSolution> parse_schedule_block(
    const SolutionBlock& block, std::vector<std::string>& diagnostics) {
  ScheduleSolution sol;
  std::istringstream lines(block.body);
  std::string line;
  while (std::getline(lines, line)) {
    const auto stripped = trim(line);
    if (stripped.empty() || stripped[0] != '|') continue;
    const auto cells = split_table_row(stripped);
    if (is_header_row(cells) || is_separator_row(cells)) continue;
    if (cells.size() != 4) {
      diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                            ": table row does not have 4 columns");
      return std::nullopt;
    }
    const auto course = parse_cell_index(cells[0], {"Course", "C"});
    const auto time = parse_cell_index(cells[1], {"T"});
    const auto room = parse_cell_index(cells[2], {"R"});
    const auto teacher = parse_cell_index(cells[3], {"P"});
    if (!course || !time || !room || !teacher) {
      diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                            ": unrecognized cell token in row '" + stripped +
                            "'");
      return std::nullopt;
    }
    sol.entries.push_back({*course, *time, *room, *teacher});
  }
  if (sol.entries.empty()) {
    diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                          ": no table rows found");
    return std::nullopt;
  }
  std::sort(sol.entries.begin(), sol.entries.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) {
              return a.course_id < b.course_id;
            });
  for (std::size_t i = 1; i < sol.entries.size(); ++i) {
    if (sol.entries[i].course_id == sol.entries[i - 1].course_id) {
      diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                            ": course listed twice");
      return std::nullopt;
    }
  }
  return sol;
}

std::optional<SubsetSolution> parse_subset_block(
    const SolutionBlock& block, std::vector<std::string>& diagnostics) {
  const auto open = block.body.find_first_of("{[");
  if (open == std::string::npos) {
    diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                          ": no {..} or [..] list found");
    return std::nullopt;
  }
  const char closer = block.body[open] == '{' ? '}' : ']';
  const auto close = block.body.find(closer, open + 1);
  if (close == std::string::npos) {
    diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                          ": unterminated list");
    return std::nullopt;
  }
  SubsetSolution sol;
  std::string content = block.body.substr(open + 1, close - open - 1);
  std::istringstream tokens(content);
  std::string token;
  while (std::getline(tokens, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    std::string digits = token;
    const bool negative = !digits.empty() && digits[0] == '-';
    if (negative) digits = digits.substr(1);
    if (!all_digits(digits)) {
      diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                            ": non-integer member '" + token + "'");
      return std::nullopt;
    }
    try {
      sol.members.push_back(std::stoll(token));
    } catch (const std::exception&) {
      diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                            ": member out of range '" + token + "'");
      return std::nullopt;
    }
  }
  if (sol.members.empty()) {
    diagnostics.push_back("solution " + std::to_string(block.ordinal) +
                          ": empty member list");
    return std::nullopt;
  }
  std::sort(sol.members.begin(), sol.members.end());
  sol.members.erase(std::unique(sol.members.begin(), sol.members.end()),
                    sol.members.end());
  return sol;
}

}  // namespace

ParseOutcome parse_solutions(const std::string& text, TaskKind kind) {
  ParseOutcome outcome;
  outcome.solutions = SolutionSet::empty(kind);
  const std::string stripped = strip_reasoning(text);
  const auto blocks = find_blocks(stripped);
  for (const auto& block : blocks) {
    if (kind == TaskKind::TimeTabling) {
      if (auto sol = parse_schedule_block(block, outcome.diagnostics))
        outcome.solutions.schedules.push_back(std::move(*sol));
    } else {
      if (auto sol = parse_subset_block(block, outcome.diagnostics))
        outcome.solutions.subsets.push_back(std::move(*sol));
    }
  }
  outcome.solutions.canonicalize();
  if (outcome.solutions.size() == 0)
    outcome.diagnostics.push_back("empty-answer: no parseable solution blocks");
  return outcome;
}

namespace {

struct ConfidenceCandidate {
  long value = 0;
  std::size_t pos = 0;
};

std::optional<long> read_long(const std::string& text, std::size_t& pos) {
  std::size_t p = pos;
  bool negative = false;
  if (p < text.size() && text[p] == '-') {
    negative = true;
    ++p;
  }
  const std::size_t digits_begin = p;
  while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p])))
    ++p;
  if (p == digits_begin || p - digits_begin > 9) return std::nullopt;
  const long value = std::stol(text.substr(digits_begin, p - digits_begin));
  pos = p;
  return negative ? -value : value;
}

void skip_spaces(const std::string& text, std::size_t& pos) {
  while (pos < text.size() &&
         (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
          text[pos] == '\r'))
    ++pos;
}

/// Matches \boxed{<int>} starting at pos (pos points at the backslash).
std::optional<long> match_boxed(const std::string& text, std::size_t pos) {
  static const std::string kBoxed = "\\boxed{";
  if (text.compare(pos, kBoxed.size(), kBoxed) != 0) return std::nullopt;
  std::size_t p = pos + kBoxed.size();
  skip_spaces(text, p);
  const auto value = read_long(text, p);
  if (!value) return std::nullopt;
  skip_spaces(text, p);
  if (p >= text.size() || text[p] != '}') return std::nullopt;
  return value;
}

std::vector<ConfidenceCandidate> marker_candidates(const std::string& text) {
  std::vector<ConfidenceCandidate> found;
  std::size_t pos = 0;
  static const std::string kMarker = "[[CONFIDENCE:";
  while ((pos = text.find(kMarker, pos)) != std::string::npos) {
    std::size_t p = pos + kMarker.size();
    skip_spaces(text, p);
    if (const auto value = match_boxed(text, p)) found.push_back({*value, pos});
    ++pos;
  }
  return found;
}

std::vector<ConfidenceCandidate> loose_candidates(const std::string& text) {
  // Case-insensitive "confidence" followed by an integer within 40 chars.
  std::vector<ConfidenceCandidate> found;
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::size_t pos = 0;
  while ((pos = lower.find("confidence", pos)) != std::string::npos) {
    const std::size_t window_end = std::min(text.size(), pos + 10 + 40);
    for (std::size_t p = pos + 10; p < window_end; ++p) {
      if (std::isdigit(static_cast<unsigned char>(text[p]))) {
        std::size_t q = p;
        if (const auto value = read_long(text, q)) {
          found.push_back({*value, pos});
          break;
        }
      }
    }
    ++pos;
  }
  return found;
}

std::vector<ConfidenceCandidate> boxed_candidates(const std::string& text) {
  std::vector<ConfidenceCandidate> found;
  std::size_t pos = 0;
  while ((pos = text.find("\\boxed{", pos)) != std::string::npos) {
    if (const auto value = match_boxed(text, pos)) found.push_back({*value, pos});
    ++pos;
  }
  return found;
}

}  // namespace

std::optional<int> parse_confidence(const std::string& text,
                                    std::vector<std::string>* diagnostics) {
  const std::string stripped = strip_reasoning(text);
  std::vector<ConfidenceCandidate> found = marker_candidates(stripped);
  if (found.empty()) found = loose_candidates(stripped);
  if (found.empty()) found = boxed_candidates(stripped);
  if (found.empty()) {
    if (diagnostics) diagnostics->push_back("no confidence marker found");
    return std::nullopt;
  }
  const long value = found.back().value;  // final statement wins
  if (value < 0 || value > 100) {
    if (diagnostics)
      diagnostics->push_back("confidence out of range: " +
                             std::to_string(value));
    return std::nullopt;
  }
  return static_cast<int>(value);
}

ParseOutcome parse_recheck(const std::string& text,
                           const SolutionSet& previous, TaskKind kind) {
  const std::string stripped = strip_reasoning(text);
  const bool has_unchange = stripped.find("[[UNCHANGE]]") != std::string::npos;
  const bool has_change = stripped.find("[[CHANGE]]") != std::string::npos;

  if (has_unchange && !has_change) {
    ParseOutcome outcome;
    outcome.solutions = previous;
    outcome.change = ChangeFlag::Unchange;
    return outcome;
  }
  ParseOutcome outcome = parse_solutions(stripped, kind);
  if (has_change && !has_unchange) {
    outcome.change = ChangeFlag::Change;
    return outcome;
  }
  // No usable marker: infer from whether anything parsed.
  outcome.diagnostics.push_back(
      has_change ? "both change markers present; flag inferred from content"
                 : "no change marker; flag inferred from content");
  if (outcome.solutions.size() > 0) {
    outcome.change = ChangeFlag::Change;
  } else {
    outcome.change = ChangeFlag::Unchange;
    outcome.solutions = previous;
  }
  return outcome;
}

namespace {

std::string pad_cell(const std::string& content, std::size_t width) {
  std::string cell = " " + content + " ";
  while (cell.size() < width) cell += ' ';
  return cell;
}

}  // namespace

std::string format_answer(const SolutionSet& set) {
  std::ostringstream out;
  if (set.kind == TaskKind::TimeTabling) {
    static const std::size_t widths[4] = {9, 7, 7, 10};
    std::size_t n = 0;
    for (const auto& sol : set.schedules) {
      out << "Solution " << ++n << ":\n";
      out << "|" << pad_cell("Course", widths[0]) << "|"
          << pad_cell("Time", widths[1]) << "|" << pad_cell("Room", widths[2])
          << "|" << pad_cell("Teacher", widths[3]) << "|\n";
      out << "|" << std::string(widths[0], '-') << "|"
          << std::string(widths[1], '-') << "|" << std::string(widths[2], '-')
          << "|" << std::string(widths[3], '-') << "|\n";
      for (const auto& e : sol.entries) {
        out << "|" << pad_cell("Course" + std::to_string(e.course_id), widths[0])
            << "|" << pad_cell("T" + std::to_string(e.time), widths[1]) << "|"
            << pad_cell("R" + std::to_string(e.room), widths[2]) << "|"
            << pad_cell("P" + std::to_string(e.teacher), widths[3]) << "|\n";
      }
    }
    out << "\nTotal " << set.schedules.size()
        << " feasible solutions shown above.";
  } else {
    std::size_t n = 0;
    for (const auto& sol : set.subsets) {
      out << "Solution " << ++n << ": {";
      for (std::size_t i = 0; i < sol.members.size(); ++i) {
        if (i) out << ", ";
        out << sol.members[i];
      }
      out << "}\n";
    }
    out << "\nTotal " << set.subsets.size()
        << " feasible solutions shown above.";
  }
  return out.str();
}

}  // namespace musobench
