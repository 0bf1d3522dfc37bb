#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oniontext/corpus.hpp"
#include "oniontext/model.hpp"
#include "oniontext/taxonomy.hpp"

namespace oniontext {

// Synthetic labeled corpus: every class draws from its own disjoint
// keyword pool plus a shared noise pool; `separation` is the fraction of
// tokens taken from the class pool and the single knob that controls how
// separable the corpus is.
struct GeneratorSpec {
    std::uint64_t seed = 0;
    std::uint32_t docs_per_class = 100;
    Task classes = Task::Main;
    std::uint32_t keyword_pool_size = 25;
    std::uint32_t shared_noise_words = 200;
    double separation = 0.9;

    struct TemplateWeights {
        double general = 0.6;
        double marketplace = 0.2;
        double pretext = 0.2;
    };
    TemplateWeights templates;
};

// Token planted inside generated <script>/<style> bodies; it must never
// survive extraction.
inline constexpr const char* kScriptSentinel = "zzsentinelpayloadzz";

// Deterministic per-class keyword pool. Words are lowercase consonant
// strings, so they pass preprocessing unchanged and cannot collide with
// stopwords or suffix rules.
std::vector<std::string> fixture_keyword_pool(Task task, std::size_t class_index,
                                              std::uint32_t pool_size);

std::vector<std::string> fixture_noise_pool(std::uint32_t noise_words);

std::vector<Document> generate_corpus(const GeneratorSpec& spec, const Taxonomy& taxonomy);

}  // namespace oniontext
