#pragma once

#include <bipcomm/graph.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("bipcomm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Graph from index pairs on p x q nodes named r<i> / c<j>.
inline bipcomm::BipartiteGraph make_graph(std::size_t p, std::size_t q,
                                          const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    bipcomm::GraphBuilder b;
    for (std::size_t i = 0; i < p; ++i)
        b.add_red("r" + std::to_string(i));
    for (std::size_t j = 0; j < q; ++j)
        b.add_blue("c" + std::to_string(j));
    for (auto [i, j] : edges)
        b.add_edge(i, j);
    return std::move(b).build();
}

inline bipcomm::BipartiteGraph complete(std::size_t p, std::size_t q) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i < p; ++i)
        for (std::uint32_t j = 0; j < q; ++j)
            e.emplace_back(i, j);
    return make_graph(p, q, e);
}

/// `copies` disjoint K_{n,n}; component c owns red and blue nodes c*n..c*n+n-1.
inline bipcomm::BipartiteGraph disjoint_bicliques(std::size_t copies, std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t c = 0; c < copies; ++c)
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n; ++j)
                e.emplace_back(c * n + i, c * n + j);
    return make_graph(copies * n, copies * n, e);
}

/// Random graph with p, q >= 1 and at least one edge.
inline bipcomm::BipartiteGraph random_graph(std::mt19937_64& rng, std::size_t max_p, std::size_t max_q,
                                            double density) {
    std::uniform_int_distribution<std::size_t> dp(1, max_p), dq(1, max_q);
    std::bernoulli_distribution coin(density);
    for (;;) {
        auto p = dp(rng), q = dq(rng);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
        for (std::uint32_t i = 0; i < p; ++i)
            for (std::uint32_t j = 0; j < q; ++j)
                if (coin(rng))
                    e.emplace_back(i, j);
        if (!e.empty())
            return make_graph(p, q, e);
    }
}

} // namespace testutil
