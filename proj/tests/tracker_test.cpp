#include "test_util.hpp"

#include <bipcomm/synth.hpp>
#include <bipcomm/tracker.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace bipcomm;
using testutil::TempDir;

namespace {

/// Partition of ids "n<first>".."n<first+size-1>" per community, all red.
LabeledPartition blocks(const std::vector<std::pair<int, int>>& ranges) {
    LabeledPartition lp;
    for (std::uint32_t c = 0; c < ranges.size(); ++c)
        for (int k = 0; k < ranges[c].second; ++k)
            lp.nodes.push_back({"n" + std::to_string(ranges[c].first + k), Side::red, c});
    lp.communities = static_cast<std::uint32_t>(ranges.size());
    return lp;
}

TimedPartitionSequence persistence(int periods, int communities, int size) {
    TimedPartitionSequence seq;
    std::vector<std::pair<int, int>> ranges;
    for (int c = 0; c < communities; ++c)
        ranges.emplace_back(c * size, size);
    for (int t = 0; t < periods; ++t)
        seq.push_back({std::to_string(2000 + t), blocks(ranges)});
    return seq;
}

} // namespace

TEST(TrackPair, DisjointCommunitiesNotValidated) {
    auto a = blocks({{0, 5}, {5, 5}});
    auto links = track_pair(a, a, 10, 0.5);
    ASSERT_EQ(links.size(), 4u);
    EXPECT_EQ(links[1].overlap, 0);
    EXPECT_EQ(links[1].p_value, 1.0);
    EXPECT_FALSE(links[1].validated);
}

TEST(TrackPair, SmallExampleTail) {
    // n_ij = n_i = n_j = 2 in a population of 4
    auto a = blocks({{0, 2}, {2, 2}});
    auto links = track_pair(a, a, 4, 0.5);
    EXPECT_NEAR(links[0].p_value, 1.0 / 6.0, 1e-14);
    EXPECT_TRUE(links[0].validated);
}

TEST(TrackPair, VerbatimCopyInLargePopulation) {
    auto a = blocks({{0, 50}, {50, 950}});
    auto links = track_pair(a, a, 1000, 1e-12);
    EXPECT_LT(links[0].p_value, 1e-50);
    EXPECT_TRUE(links[0].validated);
}

TEST(TrackPair, IntersectionRuleUsesSharedMembers) {
    auto a = blocks({{0, 4}, {4, 4}});
    auto b = blocks({{2, 4}, {6, 4}}); // shares n2..n7
    EXPECT_EQ(population_size(a, b, PopulationRule::union_of_periods), 10);
    EXPECT_EQ(population_size(a, b, PopulationRule::intersection), 6);
    auto links = track_pair(a, b, 6, 1.0, PopulationRule::intersection);
    // shared: community 0 of a has n2,n3; community 0 of b has n2..n5
    EXPECT_EQ(links[0].overlap, 2);
    EXPECT_NEAR(links[0].p_value, stats::overlap_pvalue(2, {6, 2, 4}), 1e-15);
}

TEST(TrackPair, UnionRuleWithNoSharedNodes) {
    auto a = blocks({{0, 3}});
    auto b = blocks({{3, 3}});
    auto links = track_pair(a, b, 6, 0.5);
    ASSERT_EQ(links.size(), 1u);
    EXPECT_EQ(links[0].overlap, 0);
    EXPECT_FALSE(links[0].validated);
}

TEST(SequenceBonferroni, Examples) {
    EXPECT_EQ(sequence_bonferroni({10, 12}, 0.01), 0.01 / 120);
    EXPECT_EQ(sequence_bonferroni({1, 1}, 0.01), 0.01);
    std::vector<std::uint32_t> counts(32);
    std::uint64_t den = 0;
    for (std::size_t t = 0; t < counts.size(); ++t)
        counts[t] = static_cast<std::uint32_t>(5 + t % 7);
    for (std::size_t t = 0; t + 1 < counts.size(); ++t)
        den += std::uint64_t{counts[t]} * counts[t + 1];
    EXPECT_EQ(sequence_bonferroni(counts, 0.01), 0.01 / static_cast<double>(den));
    EXPECT_THROW(sequence_bonferroni(std::vector<std::uint32_t>{3}, 0.01), InputError);
}

TEST(EvolutionGraph, PersistenceGivesDisjointChains) {
    auto seq = persistence(4, 3, 30);
    auto g = build_evolution_graph(seq, {});
    EXPECT_EQ(g.nodes.size(), 12u);
    ASSERT_EQ(g.edges.size(), 9u);
    for (const auto& e : g.edges)
        EXPECT_EQ(e.from.community, e.to.community);
    EXPECT_DOUBLE_EQ(g.p_B, 0.01 / 27);
}

TEST(EvolutionGraph, RootSelectsSingleChain) {
    auto seq = persistence(4, 3, 30);
    TrackerConfig cfg;
    cfg.direction = DirectionFilter::forward_only;
    auto g = build_evolution_graph(seq, cfg, {{"2000", 0}});
    EXPECT_EQ(g.nodes.size(), 4u);
    EXPECT_EQ(g.edges.size(), 3u);
    EXPECT_THROW(build_evolution_graph(seq, cfg, {{"1999", 0}}), InputError);
    EXPECT_THROW(build_evolution_graph(seq, cfg, {{"2000", 7}}), InputError);
}

TEST(EvolutionGraph, SplitGivesOutDegreeTwo) {
    TimedPartitionSequence seq;
    seq.push_back({"1", blocks({{0, 40}, {40, 960}})});
    seq.push_back({"2", blocks({{0, 20}, {20, 20}, {40, 960}})});
    auto g = build_evolution_graph(seq, {});
    std::map<CommunityRef, int> out_degree;
    for (const auto& e : g.edges)
        ++out_degree[e.from];
    EXPECT_EQ((out_degree[{0, 0}]), 2);
}

TEST(EvolutionGraph, DirectionFilterKeepsIncomingLinks) {
    // Community 1 of period 0 merges into the successor of the root.
    TimedPartitionSequence seq;
    seq.push_back({"1", blocks({{0, 30}, {30, 30}, {60, 940}})});
    seq.push_back({"2", blocks({{0, 60}, {60, 940}})});
    TrackerConfig cfg;
    cfg.direction = DirectionFilter::forward_only;
    auto fwd = build_evolution_graph(seq, cfg, {{"1", 0}});
    EXPECT_EQ(fwd.edges.size(), 1u);
    cfg.direction = DirectionFilter::all;
    auto all = build_evolution_graph(seq, cfg, {{"1", 0}});
    EXPECT_EQ(all.edges.size(), 2u);
    EXPECT_EQ(all.nodes.size(), 3u);
}

TEST(EvolutionGraph, PlantedPersistenceFromGenerator) {
    synth::PlantedModel m;
    m.communities.assign(4, {10, 30});
    m.p_in = 0.6;
    m.p_out = 0.02;
    m.seed = 5;
    synth::TemporalScript script;
    script.periods = 5;
    auto s = synth::generate_sequence(m, script);
    TimedPartitionSequence seq;
    std::size_t t = 0;
    for (const auto& pg : s.series)
        seq.push_back({pg.label, label_partition(pg.graph, s.truth[t++])});
    auto g = build_evolution_graph(seq, {});
    ASSERT_EQ(g.edges.size(), s.lineage.size());
    for (const auto& e : g.edges)
        EXPECT_EQ(e.from.community, e.to.community);
}

TEST(Export, DotShape) {
    auto seq = persistence(3, 2, 100);
    TrackerConfig cfg;
    cfg.direction = DirectionFilter::forward_only;
    auto g = build_evolution_graph(seq, cfg, {{"2000", 0}});
    ASSERT_EQ(g.nodes.size(), 3u);
    auto dot = to_dot(g);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    std::size_t arrows = 0, pos = 0;
    while ((pos = dot.find("->", pos)) != std::string::npos) {
        ++arrows;
        pos += 2;
    }
    EXPECT_EQ(arrows, 2u);
    EXPECT_NE(dot.find("\"0_2000\""), std::string::npos);
    EXPECT_NE(dot.find("width=" + csv::format_double(std::log(100.0))), std::string::npos);
    EXPECT_NE(dot.find("community_size=100"), std::string::npos);
}

TEST(Export, JsonRoundTrip) {
    auto seq = persistence(4, 2, 25);
    auto g = build_evolution_graph(seq, {});
    TempDir dir("tracker");
    export_evolution(g, EvolutionFormat::json, dir / "e.json");
    auto back = evolution_from_json(nlohmann::json::parse(testutil::read_file(dir / "e.json")));
    EXPECT_EQ(back.periods, g.periods);
    EXPECT_EQ(back.nodes, g.nodes);
    ASSERT_EQ(back.edges.size(), g.edges.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        EXPECT_EQ(back.edges[k].from, g.edges[k].from);
        EXPECT_EQ(back.edges[k].to, g.edges[k].to);
        EXPECT_EQ(back.edges[k].overlap, g.edges[k].overlap);
        EXPECT_EQ(back.edges[k].p_value, g.edges[k].p_value);
    }
}

TEST(Export, Errors) {
    EXPECT_THROW(parse_evolution_format("svg"), InputError);
    EXPECT_EQ(parse_evolution_format("dot"), EvolutionFormat::dot);
    EvolutionGraph empty;
    TempDir dir("tracker");
    EXPECT_THROW(export_evolution(empty, EvolutionFormat::dot, dir / "x.dot"), InputError);
}

TEST(LinkTable, ListsEveryTestedPair) {
    auto seq = persistence(3, 2, 10);
    auto tracked = track_sequence(seq, {});
    EXPECT_EQ(tracked.links.size(), 8u);
    TempDir dir("tracker");
    write_link_table(seq, tracked.links, dir / "links.csv");
    auto text = testutil::read_file(dir / "links.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
    EXPECT_EQ(text.rfind("period_t,comm_i,period_t1,comm_j,overlap,p_value,validated\n", 0), 0u);
}
