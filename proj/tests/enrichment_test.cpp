#include "test_util.hpp"

#include <bipcomm/enrichment.hpp>
#include <bipcomm/synth.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace bipcomm;
using testutil::TempDir;

namespace {

/// 1000 firms; community 0 holds firms 0..49, community 1 the rest, plus
/// one bank per community. `eee_inside` of community 0 carry "EEE" and 50 of
/// the other 950 do; everyone else has "other".
std::pair<LabeledPartition, AttributeCatalog> planted_sector(int eee_inside) {
    LabeledPartition lp;
    lp.communities = 2;
    lp.nodes.push_back({"b0", Side::red, 0});
    lp.nodes.push_back({"b1", Side::red, 1});
    AttributeCatalog cat;
    for (int k = 0; k < 1000; ++k) {
        auto id = "f" + std::to_string(k);
        lp.nodes.push_back({id, Side::blue, k < 50 ? 0u : 1u});
        bool eee = k < 50 ? k < eee_inside : k < 100;
        cat.set(id, "sector", eee ? "EEE" : "other");
    }
    cat.set("b0", "bank_type", "city");
    cat.set("b1", "bank_type", "regional");
    return {lp, cat};
}

const EnrichmentRecord& find(const EnrichmentResult& r, std::uint32_t c, const std::string& cat,
                             const std::string& value) {
    for (const auto& rec : r.records)
        if (rec.community == c && rec.category == cat && rec.value == value)
            return rec;
    throw std::runtime_error("record not found");
}

} // namespace

TEST(EnrichmentThreshold, Examples) {
    EXPECT_NEAR(enrichment_threshold(0.01, 30, 47, 8, 25), 0.01 / 2125, 1e-15);
    EXPECT_EQ(enrichment_threshold(0.01, 1, 0, 0, 1), 0.01);
    EXPECT_THROW(enrichment_threshold(0.01, 0, 0, 0, 3), InputError);
    EXPECT_THROW(enrichment_threshold(0.01, 3, 0, 0, 0), InputError);
}

TEST(Overexpression, PlantedSectorValidated) {
    auto [lp, cat] = planted_sector(40);
    auto r = test_overexpression(lp, cat, {});
    const auto& rec = find(r, 0, "sector", "EEE");
    EXPECT_EQ(rec.count_in_community, 40);
    EXPECT_EQ(rec.community_population, 50);
    EXPECT_EQ(rec.global_count, 90);
    EXPECT_EQ(rec.global_population, 1000);
    EXPECT_LT(rec.p_value, 1e-20);
    EXPECT_TRUE(rec.validated);
    // R_t = (2 sector values + 2 bank types) * 2 communities
    EXPECT_DOUBLE_EQ(r.threshold, 0.01 / 8);
}

TEST(Overexpression, AbsentValueNeverValidated) {
    auto [lp, cat] = planted_sector(50);
    auto r = test_overexpression(lp, cat, {});
    const auto& rec = find(r, 0, "sector", "other");
    EXPECT_EQ(rec.count_in_community, 0);
    EXPECT_EQ(rec.p_value, 1.0);
    EXPECT_FALSE(rec.validated);
}

TEST(Overexpression, ProportionalCountsNotValidated) {
    // Every community has exactly the global mix.
    LabeledPartition lp;
    lp.communities = 4;
    AttributeCatalog cat;
    for (int k = 0; k < 400; ++k) {
        auto id = "f" + std::to_string(k);
        lp.nodes.push_back({id, Side::blue, static_cast<std::uint32_t>(k / 100)});
        cat.set(id, "sector", "s" + std::to_string(k % 5));
    }
    auto r = test_overexpression(lp, cat, {});
    for (const auto& rec : r.records) {
        EXPECT_FALSE(rec.validated);
        EXPECT_GT(rec.p_value, 0.3);
    }
}

TEST(Overexpression, DrawBasisAndSideInference) {
    auto [lp, cat] = planted_sector(40);
    // Drop the attribute from 10 firms outside community 0.
    AttributeCatalog partial;
    for (const auto& n : lp.nodes)
        for (const auto& c : cat.categories())
            if (const auto* v = cat.get(n.id, c); v && n.id != "f999" && n.id != "f998")
                partial.set(n.id, c, *v);
    EnrichmentConfig cfg;
    auto covered = test_overexpression(lp, partial, cfg);
    EXPECT_EQ(find(covered, 1, "sector", "EEE").global_population, 998);
    EXPECT_EQ(find(covered, 1, "sector", "EEE").community_population, 948);
    cfg.draws = EnrichmentConfig::DrawBasis::community_size;
    auto full = test_overexpression(lp, partial, cfg);
    EXPECT_EQ(find(full, 1, "sector", "EEE").global_population, 1000);
    EXPECT_EQ(find(full, 1, "sector", "EEE").community_population, 950);

    ASSERT_EQ(covered.categories.size(), 2u);
    for (const auto& c : covered.categories)
        EXPECT_EQ(c.side, c.name == "sector" ? Side::blue : Side::red);
}

TEST(Overexpression, CategoryErrors) {
    auto [lp, cat] = planted_sector(10);
    cat.set("b0", "sector", "EEE");
    EXPECT_THROW(test_overexpression(lp, cat, {}), InputError);

    auto [lp2, cat2] = planted_sector(10);
    EnrichmentConfig cfg;
    cfg.categories = {"prefecture"};
    EXPECT_THROW(test_overexpression(lp2, cat2, cfg), InputError);
    EXPECT_THROW(cat2.set("f0", "sector", "different"), InputError);
}

TEST(Report, ValidatedValuesAndPlaceholders) {
    auto [lp, cat] = planted_sector(40);
    auto r = test_overexpression(lp, cat, {});
    auto rep = community_report(lp, r, "1986");
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_EQ(rep.categories, (std::vector<std::string>{"sector", "bank_type"}));
    EXPECT_EQ(rep.rows[0].attributes[0], "EEE");
    EXPECT_EQ(rep.rows[0].attributes[1], "--");
    EXPECT_EQ(rep.rows[0].banks, 1u);
    EXPECT_EQ(rep.rows[0].firms, 50u);
    std::ostringstream out;
    write_report(rep, out);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "period,community,banks,firms,sector,bank_type");
}

TEST(Report, CountsOfMixedCommunity) {
    LabeledPartition lp;
    lp.communities = 1;
    AttributeCatalog cat;
    for (int k = 0; k < 23; ++k)
        lp.nodes.push_back({"b" + std::to_string(k), Side::red, 0});
    for (int k = 0; k < 557; ++k) {
        lp.nodes.push_back({"f" + std::to_string(k), Side::blue, 0});
        cat.set("f" + std::to_string(k), "sector", "s");
    }
    auto rep = community_report(lp, test_overexpression(lp, cat, {}), "1980");
    EXPECT_EQ(rep.rows[0].banks, 23u);
    EXPECT_EQ(rep.rows[0].firms, 557u);
    EXPECT_EQ(rep.rows[0].attributes[0], "--");
}

TEST(Catalog, RoundTrip) {
    TempDir dir("enrich");
    auto [lp, cat] = planted_sector(5);
    write_catalog(cat, dir / "a.csv");
    auto back = read_catalog(dir / "a.csv");
    EXPECT_EQ(back.categories(), cat.categories());
    EXPECT_EQ(*back.get("f3", "sector"), "EEE");
    testutil::write_file(dir / "empty.csv", "node_id,category,value\n");
    EXPECT_THROW(read_catalog(dir / "empty.csv"), InputError);
}

TEST(Overexpression, GeneratedPlantIsRecovered) {
    synth::PlantedModel m;
    m.communities = {{5, 50}, {20, 950}};
    auto mem = synth::initial_membership(m);
    auto [p, ids] = synth::to_partition(mem);
    auto g = synth::draw_graph(mem, 0.5, 0.01, 1);
    auto lp = label_partition(g, p);
    int validated = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto cat = synth::generate_catalog(mem, {{"sector", Side::blue, 20}}, {{"sector", "EEE", 0, 0.8}}, seed);
        auto r = test_overexpression(lp, cat, {});
        validated += find(r, 0, "sector", "EEE").validated;
    }
    EXPECT_EQ(validated, 20);
}
