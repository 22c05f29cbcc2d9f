#include "advaudio/text_metrics.hpp"

#include <algorithm>

namespace advaudio {

Transcript normalize(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char ch : raw) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cleaned.push_back(static_cast<char>(c));
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      cleaned.push_back(' ');
    }
    // apostrophes and all other characters are dropped
  }

  Transcript words;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    if (i > start) words.push_back(cleaned.substr(start, i - start));
  }
  return words;
}

std::string join(const Transcript& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::size_t word_edit_distance(const Transcript& a, const Transcript& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;

  // Single-row DP over b.
  std::vector<std::size_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[m];
}

double wer(const Transcript& reference, const Transcript& hypothesis) {
  return static_cast<double>(word_edit_distance(reference, hypothesis));
}

}  // namespace advaudio
