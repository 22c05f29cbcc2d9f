#pragma once

#include <string>
#include <vector>

namespace advaudio {

/// Normalized word sequence: lowercase, apostrophes dropped, punctuation
/// stripped. All text comparisons happen on this form so oracle quirks
/// (casing, trailing periods) never inflate an objective.
using Transcript = std::vector<std::string>;

/// Lowercases, maps whitespace runs to single separators, drops
/// apostrophes, removes every other character outside [a-z0-9].
Transcript normalize(const std::string& raw);

std::string join(const Transcript& words);

/// Levenshtein distance over word tokens, unit costs for
/// insert / delete / substitute.
std::size_t word_edit_distance(const Transcript& a, const Transcript& b);

/// Word edit distance as a real number. This is the unnormalized "WER"
/// the reports label paper-style; the normalized ratio is
/// distance / len(reference) and is emitted alongside it.
double wer(const Transcript& reference, const Transcript& hypothesis);

}  // namespace advaudio
