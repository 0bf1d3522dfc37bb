#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oniontext/corpus.hpp"
#include "oniontext/error.hpp"
#include "oniontext/rng.hpp"
#include "test_support.hpp"

using namespace oniontext;

namespace {

Document make_doc(const std::string& id, const std::string& label = "",
                  const std::string& text = "some text") {
    Document doc;
    doc.id = id;
    doc.source.name = SourceName::Synthetic;
    doc.source.mode = SourceMode::Pretext;
    doc.raw_text = text;
    if (!label.empty()) doc.main_label = label;
    return doc;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& line : lines) out << line << '\n';
}

}  // namespace

TEST_CASE("load_corpus reads valid records in file order") {
    auto path = test::temp_file("corpus_valid.jsonl");
    write_lines(path, {
        R"({"id":"a","source":"Duta10k","mode":"pretext","raw_text":"one"})",
        R"({"id":"b","source":"Agora","mode":"pretext","raw_text":"two","main_label":"Drugs","drug_sublabel":"Benzos"})",
        R"({"id":"c","source":"SilkRoad","mode":"marketplace","raw_html":"<p>x</p>"})",
    });
    auto docs = load_corpus(path);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].id == "a");
    CHECK(docs[1].id == "b");
    CHECK(docs[2].id == "c");
    CHECK(docs[1].drug_sublabel == "Benzos");
    CHECK(docs[2].raw_html == "<p>x</p>");
}

TEST_CASE("load_corpus rejects schema violations with line numbers") {
    auto path = test::temp_file("corpus_bad.jsonl");

    SUBCASE("record with neither raw_html nor raw_text") {
        write_lines(path, {
            R"({"id":"a","source":"Duta10k","mode":"pretext","raw_text":"ok"})",
            R"({"id":"b","source":"Duta10k","mode":"pretext"})",
        });
        CHECK_THROWS_WITH_AS(load_corpus(path),
                             doctest::Contains("line 2"), Error);
    }
    SUBCASE("record with both raw_html and raw_text") {
        write_lines(path, {R"({"id":"a","source":"Duta10k","mode":"general","raw_html":"<p>","raw_text":"t"})"});
        CHECK_THROWS_AS(load_corpus(path), Error);
    }
    SUBCASE("pretext mode requires raw_text") {
        write_lines(path, {R"({"id":"a","source":"Duta10k","mode":"pretext","raw_html":"<p>"})"});
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("pretext"), Error);
    }
    SUBCASE("drug sublabel without Drugs main label") {
        write_lines(path, {R"({"id":"a","source":"Agora","mode":"pretext","raw_text":"t","main_label":"Services","drug_sublabel":"Benzos"})"});
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("Drugs"), Error);
    }
    SUBCASE("duplicate id names the id") {
        write_lines(path, {
            R"({"id":"dup","source":"Duta10k","mode":"pretext","raw_text":"1"})",
            R"({"id":"dup","source":"Duta10k","mode":"pretext","raw_text":"2"})",
        });
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("dup"), Error);
    }
    SUBCASE("invalid JSON names the line") {
        write_lines(path, {"{not json"});
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 1"), Error);
    }
}

TEST_CASE("write then load round-trips a 10-record corpus") {
    std::vector<Document> docs;
    for (int i = 0; i < 10; ++i) {
        Document doc = make_doc("doc-" + std::to_string(i), i % 2 == 0 ? "Services" : "Drugs",
                                "text " + std::to_string(i));
        if (i % 2 == 1) doc.drug_sublabel = "Benzos";
        if (i % 3 == 0) {
            doc.extracted_text = "extracted " + std::to_string(i);
            doc.tokens = std::vector<std::string>{"tok", "en"};
        }
        if (i == 7) doc.skipped = true;
        docs.push_back(std::move(doc));
    }
    auto path = test::temp_file("corpus_roundtrip.jsonl");
    write_corpus(docs, path);
    auto loaded = load_corpus(path);
    CHECK(loaded == docs);
}

TEST_CASE("fusing the full source inventory totals 113995") {
    const std::vector<std::pair<SourceName, std::size_t>> sizes = {
        {SourceName::Agora, 108261},      {SourceName::Berlusconi, 323},
        {SourceName::CannaHome, 640},     {SourceName::Duta10k, 2941},
        {SourceName::ManualDarkWeb, 50},  {SourceName::NormalWeb, 120},
        {SourceName::SilkRoad, 1660},
    };
    std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
    for (const auto& [name, count] : sizes) {
        SourceTag tag{name, SourceMode::Pretext};
        std::vector<Document> docs;
        docs.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            docs.push_back(make_doc(std::string(to_string(name)) + "-" + std::to_string(i)));
        }
        batches.emplace_back(tag, std::move(docs));
    }
    auto [fused, stats] = fuse_sources(std::move(batches));
    CHECK(stats.total == 113995);
    CHECK(fused.size() == 113995);
    CHECK(stats.per_source_counts.at("Agora") == 108261);
    CHECK(stats.per_source_counts.at("SilkRoad") == 1660);
}

TEST_CASE("fuse_sources edge cases") {
    SUBCASE("single empty batch") {
        std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
        batches.emplace_back(SourceTag{SourceName::Agora, SourceMode::Pretext},
                             std::vector<Document>{});
        auto [fused, stats] = fuse_sources(std::move(batches));
        CHECK(fused.empty());
        CHECK(stats.total == 0);
    }
    SUBCASE("per-class counts sum over batches") {
        std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
        batches.emplace_back(SourceTag{SourceName::Agora, SourceMode::Pretext},
                             std::vector<Document>{make_doc("a1", "Drugs"), make_doc("a2", "Services")});
        batches.emplace_back(SourceTag{SourceName::Duta10k, SourceMode::Pretext},
                             std::vector<Document>{make_doc("d1", "Drugs"), make_doc("d2", "Drugs"),
                                                   make_doc("d3", "Porno")});
        auto [fused, stats] = fuse_sources(std::move(batches));
        std::size_t class_sum = 0;
        for (const auto& [label, count] : stats.per_class_counts) class_sum += count;
        CHECK(class_sum == 5);
        CHECK(stats.per_class_counts.at("Drugs") == 3);
    }
    SUBCASE("cross-batch duplicate id") {
        std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
        batches.emplace_back(SourceTag{SourceName::Agora, SourceMode::Pretext},
                             std::vector<Document>{make_doc("same")});
        batches.emplace_back(SourceTag{SourceName::Duta10k, SourceMode::Pretext},
                             std::vector<Document>{make_doc("same")});
        CHECK_THROWS_WITH_AS(fuse_sources(std::move(batches)), doctest::Contains("same"), Error);
    }
}

TEST_CASE("fusion stats are independent of batch grouping") {
    Rng rng(42);
    std::vector<Document> all;
    const char* labels[] = {"Drugs", "Services", "Porno", "Violence"};
    for (int i = 0; i < 40; ++i) {
        all.push_back(make_doc("doc" + std::to_string(i), labels[rng.below(4)]));
    }
    auto grouped = [&](std::size_t split_at) {
        std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
        SourceTag tag{SourceName::Synthetic, SourceMode::Pretext};
        batches.emplace_back(tag, std::vector<Document>(all.begin(), all.begin() + split_at));
        batches.emplace_back(tag, std::vector<Document>(all.begin() + split_at, all.end()));
        return fuse_sources(std::move(batches)).second;
    };
    CHECK(grouped(5) == grouped(25));
    CHECK(grouped(1) == grouped(39));
}

TEST_CASE("compute_stats") {
    SUBCASE("empty input gives all-zero stats") {
        auto stats = compute_stats({});
        CHECK(stats.total == 0);
        CHECK(stats.per_class_counts.empty());
    }
    SUBCASE("labeled counts") {
        auto stats = compute_stats({make_doc("a", "Drugs"), make_doc("b", "Drugs"),
                                    make_doc("c", "Services")});
        CHECK(stats.total == 3);
        CHECK(stats.per_class_counts.at("Drugs") == 2);
        CHECK(stats.per_class_counts.at("Services") == 1);
    }
    SUBCASE("unlabeled documents count under the reserved key") {
        auto stats = compute_stats({make_doc("a"), make_doc("b", "Drugs")});
        CHECK(stats.per_class_counts.at(kUnlabeledKey) == 1);
        std::size_t sum = 0;
        for (const auto& [label, count] : stats.per_class_counts) sum += count;
        CHECK(sum == stats.total);
    }
}

TEST_CASE("stratified_split honors the per-class rounding rule") {
    std::vector<Document> docs;
    const char* labels[] = {"Drugs", "Services", "Porno"};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 10; ++i) {
            docs.push_back(make_doc(std::string(labels[c]) + std::to_string(i), labels[c]));
        }
    }
    auto [train, test] = stratified_split(docs, 0.2, 99);
    CHECK(train.size() == 24);
    CHECK(test.size() == 6);
    for (const char* label : labels) {
        auto count = [&](const std::vector<Document>& side) {
            std::size_t n = 0;
            for (const auto& d : side) n += (*d.main_label == label) ? 1 : 0;
            return n;
        };
        CHECK(count(train) == 8);
        CHECK(count(test) == 2);
    }
}

TEST_CASE("stratified_split determinism and edge rules") {
    std::vector<Document> docs;
    for (int i = 0; i < 7; ++i) docs.push_back(make_doc("a" + std::to_string(i), "Drugs"));
    for (int i = 0; i < 5; ++i) docs.push_back(make_doc("b" + std::to_string(i), "Services"));

    SUBCASE("same seed twice gives identical partitions") {
        auto first = stratified_split(docs, 0.2, 7);
        auto second = stratified_split(docs, 0.2, 7);
        CHECK(first.first == second.first);
        CHECK(first.second == second.second);
    }
    SUBCASE("7 docs at fraction 0.2 put round(1.4)=1 in test") {
        auto [train, test] = stratified_split(docs, 0.2, 3);
        std::size_t drugs_test = 0;
        for (const auto& d : test) drugs_test += (*d.main_label == "Drugs") ? 1 : 0;
        CHECK(drugs_test == 1);
    }
    SUBCASE("class with fewer than 2 documents is rejected by name") {
        docs.push_back(make_doc("solo", "Violence"));
        CHECK_THROWS_WITH_AS(stratified_split(docs, 0.2, 1), doctest::Contains("Violence"),
                             Error);
    }
    SUBCASE("union is the input and halves are disjoint") {
        auto [train, test] = stratified_split(docs, 0.35, 11);
        std::set<std::string> seen;
        for (const auto& d : train) seen.insert(d.id);
        for (const auto& d : test) CHECK(seen.insert(d.id).second);
        CHECK(seen.size() == docs.size());
    }
    SUBCASE("unlabeled document is rejected") {
        docs.push_back(make_doc("nolabel"));
        CHECK_THROWS_WITH_AS(stratified_split(docs, 0.2, 1), doctest::Contains("nolabel"), Error);
    }
}

TEST_CASE("stratified_split test share stays within 1/|c| of the fraction") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Document> docs;
        const int num_classes = 2 + static_cast<int>(rng.below(4));
        std::vector<std::size_t> sizes;
        for (int c = 0; c < num_classes; ++c) {
            const std::size_t size = 2 + rng.below(30);
            sizes.push_back(size);
            for (std::size_t i = 0; i < size; ++i) {
                docs.push_back(make_doc("c" + std::to_string(c) + "-" + std::to_string(i),
                                        "class" + std::to_string(c)));
            }
        }
        const double fraction = 0.05 + 0.9 * rng.unit();
        auto [train, test] = stratified_split(docs, fraction, rng.next_u64());
        for (int c = 0; c < num_classes; ++c) {
            const std::string label = "class" + std::to_string(c);
            std::size_t in_test = 0;
            for (const auto& d : test) in_test += (*d.main_label == label) ? 1 : 0;
            const double share = static_cast<double>(in_test) / static_cast<double>(sizes[c]);
            CHECK(std::abs(share - fraction) <= 1.0 / static_cast<double>(sizes[c]) + 1e-12);
        }
    }
}

TEST_CASE("stratified_split can key on the drug sub-label") {
    std::vector<Document> docs;
    const char* subs[] = {"Benzos", "Cannabis"};
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < 6; ++i) {
            Document doc = make_doc(std::string(subs[c]) + std::to_string(i), "Drugs");
            doc.drug_sublabel = subs[c];
            docs.push_back(std::move(doc));
        }
    }
    auto [train, test] = stratified_split(docs, 0.5, 5, StratifyBy::DrugSublabel);
    for (const char* sub : subs) {
        std::size_t in_test = 0;
        for (const auto& d : test) in_test += (*d.drug_sublabel == sub) ? 1 : 0;
        CHECK(in_test == 3);
    }
}
