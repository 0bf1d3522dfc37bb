#include "oniontext/fixtures.hpp"

#include "oniontext/error.hpp"
#include "oniontext/rng.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "fixtures";

// Digits spelled with consonants only: no vowels means no token can grow
// a recognizable suffix, be a stopword, or contain a digit.
std::string consonant_number(std::size_t value, int width) {
    static const char alphabet[] = "bcdfghjklm";
    std::string out(width, 'b');
    for (int i = width - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = alphabet[value % 10];
        value /= 10;
    }
    return out;
}

std::string task_prefix(Task task) { return task == Task::Main ? "kw" : "dw"; }

std::string render_general_page(const std::vector<std::string>& tokens) {
    std::string head_tokens;
    std::string body_tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto& target = i < 5 ? head_tokens : body_tokens;
        if (!target.empty()) target += ' ';
        target += tokens[i];
    }
    std::string page = "<html><head><title>" + head_tokens + "</title>";
    page += "<script>var payload = \"";
    page += kScriptSentinel;
    page += "\"; track(payload);</script>";
    page += "<style>body { color: #000; } /* ";
    page += kScriptSentinel;
    page += " */</style></head><body>";
    page += "<h1>" + head_tokens + "</h1>";
    page += "<p>" + body_tokens + "</p>";
    page += "<!-- " + std::string(kScriptSentinel) + " -->";
    page += "</body></html>";
    return page;
}

std::string render_marketplace_page(const std::vector<std::string>& tokens) {
    std::string title_tokens;
    std::string body_tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto& target = i < 5 ? title_tokens : body_tokens;
        if (!target.empty()) target += ' ';
        target += tokens[i];
    }
    std::string page = "<html><body><div class=\"nav\">home catalog vendor messages</div>";
    page += "<h1 class=\"title\">" + title_tokens + "</h1>";
    page += "<div class=\"description\">" + body_tokens + "</div>";
    page += "<div class=\"footer\">escrow support pgp</div></body></html>";
    return page;
}

}  // namespace

std::vector<std::string> fixture_keyword_pool(Task task, std::size_t class_index,
                                              std::uint32_t pool_size) {
    std::vector<std::string> pool;
    pool.reserve(pool_size);
    const std::string prefix = task_prefix(task) + consonant_number(class_index, 2);
    for (std::uint32_t j = 0; j < pool_size; ++j) {
        pool.push_back(prefix + consonant_number(j, 3));
    }
    return pool;
}

std::vector<std::string> fixture_noise_pool(std::uint32_t noise_words) {
    std::vector<std::string> pool;
    pool.reserve(noise_words);
    for (std::uint32_t i = 0; i < noise_words; ++i) {
        pool.push_back("nz" + consonant_number(i, 3));
    }
    return pool;
}

std::vector<Document> generate_corpus(const GeneratorSpec& spec, const Taxonomy& taxonomy) {
    if (spec.docs_per_class < 1 || spec.keyword_pool_size < 1 || spec.shared_noise_words < 1) {
        throw Error(kModule, "all generator counts must be >= 1");
    }
    if (!(spec.separation >= 0.0 && spec.separation <= 1.0)) {
        throw Error(kModule, "separation must be in [0, 1]");
    }
    const double template_total =
        spec.templates.general + spec.templates.marketplace + spec.templates.pretext;
    if (!(template_total > 0.0)) {
        throw Error(kModule, "template weights must sum to a positive value");
    }

    const std::vector<std::string>& classes = spec.classes == Task::Main
                                                  ? taxonomy.main_classes()
                                                  : taxonomy.distinct_drug_subclasses();
    const std::vector<std::string> noise = fixture_noise_pool(spec.shared_noise_words);
    constexpr std::uint32_t kTokensPerDoc = 40;

    std::vector<Document> docs;
    docs.reserve(classes.size() * spec.docs_per_class);
    for (std::size_t class_index = 0; class_index < classes.size(); ++class_index) {
        const std::vector<std::string> pool =
            fixture_keyword_pool(spec.classes, class_index, spec.keyword_pool_size);
        for (std::uint32_t doc_index = 0; doc_index < spec.docs_per_class; ++doc_index) {
            Rng rng(mix_seed(spec.seed, class_index, doc_index));

            std::vector<std::string> tokens;
            tokens.reserve(kTokensPerDoc);
            for (std::uint32_t t = 0; t < kTokensPerDoc; ++t) {
                if (rng.unit() < spec.separation) {
                    tokens.push_back(pool[rng.below(pool.size())]);
                } else {
                    tokens.push_back(noise[rng.below(noise.size())]);
                }
            }

            Document doc;
            doc.id = "syn-" + std::string(to_string(spec.classes)) + "-" +
                     std::to_string(class_index) + "-" + std::to_string(doc_index);
            doc.source.name = SourceName::Synthetic;
            if (spec.classes == Task::Main) {
                doc.main_label = classes[class_index];
            } else {
                doc.main_label = kDrugsClass;
                doc.drug_sublabel = classes[class_index];
            }

            const double draw = rng.unit() * template_total;
            if (draw < spec.templates.general) {
                doc.source.mode = SourceMode::General;
                doc.raw_html = render_general_page(tokens);
            } else if (draw < spec.templates.general + spec.templates.marketplace) {
                doc.source.mode = SourceMode::Marketplace;
                doc.raw_html = render_marketplace_page(tokens);
            } else {
                doc.source.mode = SourceMode::Pretext;
                doc.raw_text = join(tokens, " ");
            }
            docs.push_back(std::move(doc));
        }
    }
    return docs;
}

}  // namespace oniontext
