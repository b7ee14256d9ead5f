#include "shorttopic/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "shorttopic/common.hpp"

namespace shorttopic::text {

std::vector<std::string> tokenize(const std::string& raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : raw) {
    bool word_char = (c >= 0x80) || std::isalnum(c);
    if (word_char) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                 : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

// Snowball English stopword list plus single-letter fillers.
const char* kEnglishStopwords =
    "i me my myself we our ours ourselves you your yours yourself yourselves "
    "he him his himself she her hers herself it its itself they them their "
    "theirs themselves what which who whom this that these those am is are "
    "was were be been being have has had having do does did doing would "
    "should could ought im youre hes shes its were theyre ive youve weve "
    "theyve id youd hed shed wed theyd ill youll hell shell well theyll "
    "isnt arent wasnt werent hasnt havent hadnt doesnt dont didnt wont "
    "wouldnt shant shouldnt cant cannot couldnt mustnt lets thats whos whats "
    "heres theres whens wheres whys hows a an the and but if or because as "
    "until while of at by for with about against between into through during "
    "before after above below to from up down in out on off over under again "
    "further then once here there when where why how all any both each few "
    "more most other some such no nor not only own same so than too very s t "
    "can will just don should now";

}  // namespace

StopwordSet StopwordSet::english() {
  StopwordSet set;
  std::istringstream in(kEnglishStopwords);
  std::string w;
  while (in >> w) set.words_.insert(w);
  return set;
}

StopwordSet StopwordSet::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_missing("MissingArtifact", "stopword file not found: " + path.string());
  StopwordSet set;
  std::string w;
  while (in >> w) {
    if (!w.empty() && w[0] == '#') {
      std::getline(in, w);
      continue;
    }
    set.words_.insert(w);
  }
  return set;
}

}  // namespace shorttopic::text
