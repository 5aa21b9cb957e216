#include "synthetic_corpus.hpp"

#include <array>
#include <string_view>

#include "blurbkit/analysis.hpp"
#include "blurbkit/rng.hpp"
#include "blurbkit/text.hpp"

namespace fixture {
namespace {

using blurbkit::Rng;

constexpr std::array<std::string_view, 24> kPrefixes{
    "cardio", "neuro", "hepato", "nephro", "gastro", "immuno", "onco",   "myelo",
    "osteo",  "derma", "hemato", "pneumo", "endo",   "angio",  "lympho", "cyto",
    "chondro", "fibro", "glyco", "lipo",   "thrombo", "entero", "broncho", "retino"};
constexpr std::array<std::string_view, 16> kSuffixes{
    "pathy", "itis", "genesis", "toxicity", "plasty", "megaly", "lysis", "sclerosis",
    "trophy", "cyte", "blast", "kinase", "statin", "mycin", "oma", "emia"};
constexpr std::array<std::string_view, 20> kDrugStems{
    "predni", "metfor", "atorva", "cipro",  "amoxi",  "tamoxi", "cispla", "doxoru",
    "gefiti", "imati",  "rituxi", "trastu", "warfa",  "heparo", "nalox",  "clonid",
    "lidoc",  "valpro", "levoti", "azathi"};
constexpr std::array<std::string_view, 10> kDrugEndings{
    "sone", "mine", "zole", "pril", "olol", "tinib", "mab", "parin", "dine", "caine"};
constexpr std::array<std::string_view, 20> kGenes{
    "BRCA1", "TP53",  "EGFR",  "KRAS",  "HER2",   "VEGF",  "TNF",   "IL6",  "MYC",  "PTEN",
    "CDK4",  "JAK2",  "STAT3", "NFKB1", "MAPK1",  "AKT1",  "BCL2",  "CD4",  "APOE", "RecA"};
constexpr std::array<std::string_view, 30> kNouns{
    "patients", "cohort",  "trial",     "expression", "levels",    "risk",
    "outcome",  "therapy", "treatment", "mice",       "cells",     "tissue",
    "response", "survival", "dose",     "samples",    "analysis",  "study",
    "serum",    "protein", "receptor",  "pathway",    "mutation",  "incidence",
    "function", "activity", "model",    "group",      "biopsy",    "follow-up"};
constexpr std::array<std::string_view, 18> kVerbs{
    "reduced",    "increased", "improved",  "inhibited",  "induced",   "attenuated",
    "suppressed", "enhanced",  "modulated", "predicted",  "correlated with", "prevented",
    "was associated with", "did not affect", "altered", "restored", "regulated", "impaired"};
constexpr std::array<std::string_view, 12> kAdjectives{
    "chronic", "acute", "severe", "primary", "recurrent", "elevated",
    "mild",    "early", "advanced", "systemic", "transient", "persistent"};

template <typename Array>
std::string_view pick(Rng& rng, const Array& a) {
  return a[static_cast<std::size_t>(rng.below(a.size()))];
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::string term() {
    const auto& probes = blurbkit::probe_terms();
    const std::uint64_t r = rng_.below(10);
    if (r < 3) return probes[static_cast<std::size_t>(rng_.below(probes.size()))];
    if (r < 6) return std::string(pick(rng_, kPrefixes)) + std::string(pick(rng_, kSuffixes));
    if (r < 8) return std::string(pick(rng_, kDrugStems)) + std::string(pick(rng_, kDrugEndings));
    return std::string(pick(rng_, kGenes));
  }

  std::string number() { return std::to_string(2 + rng_.below(480)); }

  std::string sentence() {
    switch (rng_.below(8)) {
      case 0:
        return capitalize(term()) + " " + std::string(pick(rng_, kVerbs)) + " " +
               std::string(pick(rng_, kAdjectives)) + " " + term() + " in " + number() + " " +
               std::string(pick(rng_, kNouns)) + ".";
      case 1:
        return "In this " + std::string(pick(rng_, kNouns)) + ", we examined whether " + term() +
               " " + std::string(pick(rng_, kVerbs)) + " the " + std::string(pick(rng_, kNouns)) +
               " of " + term() + " among patients with " + std::string(pick(rng_, kAdjectives)) +
               " " + term() + ".";
      case 2:
        return "Expression of " + term() + " and " + term() + " was measured in " + number() +
               " samples using quantitative assays of " + term() + ".";
      case 3:
        return "Treatment with " + term() + " (" + number() + " mg/kg) " +
               std::string(pick(rng_, kVerbs)) + " " + term() + " and " + term() +
               " compared with placebo.";
      case 4:
        return "These results suggest that " + term() + " may be a therapeutic target for " +
               std::string(pick(rng_, kAdjectives)) + " " + term() + ".";
      case 5:
        return "The " + std::string(pick(rng_, kNouns)) + " of " + term() + " was " +
               std::string(pick(rng_, kAdjectives)) + " in the " + term() + " group (p < 0.0" +
               std::to_string(1 + rng_.below(5)) + ").";
      case 6:
        return "We found that " + term() + " " + std::string(pick(rng_, kVerbs)) + " " + term() +
               " through a " + term() + "-dependent pathway in " + std::string(pick(rng_, kNouns)) +
               ".";
      default:
        return "Patients receiving naloxone or " + term() + " showed " +
               std::string(pick(rng_, kAdjectives)) + " changes in " + term() + " and " +
               std::string(pick(rng_, kNouns)) + ".";
    }
  }

  std::string abstract(std::size_t min_words) {
    std::string text;
    while (blurbkit::count_whitespace_words(text) < min_words) {
      if (!text.empty()) text.push_back(' ');
      text += sentence();
    }
    return text;
  }

 private:
  Rng rng_;
};

}  // namespace

std::vector<std::string> synthetic_abstracts(std::size_t count, std::uint64_t seed,
                                             std::size_t min_words) {
  std::vector<std::string> out;
  out.reserve(count);
  Generator gen(seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.abstract(min_words));
  return out;
}

std::string synthetic_corpus_file(std::size_t count, std::uint64_t seed, std::size_t min_words) {
  std::string out;
  const auto abstracts = synthetic_abstracts(count, seed, min_words);
  for (std::size_t i = 0; i < abstracts.size(); ++i) {
    out += "PMID" + std::to_string(100000 + i) + "\t" + abstracts[i] + "\n";
  }
  return out;
}

}  // namespace fixture
