#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "lire/rng.hpp"
#include "lire/types.hpp"

namespace test_helpers {

// Unique scratch directory, removed on destruction.
class TmpDir {
public:
    explicit TmpDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lire_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::vector<float> unit_vector(std::initializer_list<float> values) {
    std::vector<float> v(values);
    double norm = 0.0;
    for (const float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    for (float& x : v) x = static_cast<float>(x / norm);
    return v;
}

inline std::vector<float> random_unit(lire::Rng& rng, uint32_t dim) {
    std::vector<double> g(dim);
    double norm = 0.0;
    for (auto& x : g) {
        x = rng.gaussian();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    std::vector<float> v(dim);
    for (uint32_t j = 0; j < dim; ++j) v[j] = static_cast<float>(g[j] / norm);
    return v;
}

// Builds an EmbeddingSet from (passage_id, rows) pairs; rows are unit-norm.
inline lire::EmbeddingSet make_set(uint32_t dim,
                                   const std::vector<std::pair<uint64_t,
                                                               std::vector<std::vector<float>>>>&
                                       passages) {
    lire::EmbeddingSet set;
    set.dim = dim;
    for (const auto& [pid, rows] : passages) {
        std::vector<float> flat;
        for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
        set.append_passage(pid, flat.data(), static_cast<uint32_t>(rows.size()));
    }
    return set;
}

// Random unit-vector corpus: n passages of m rows each, ids 0..n-1.
inline lire::EmbeddingSet random_set(uint32_t dim, uint64_t n_passages, uint32_t rows_each,
                                     uint64_t seed) {
    lire::Rng rng(seed);
    lire::EmbeddingSet set;
    set.dim = dim;
    std::vector<float> flat;
    for (uint64_t p = 0; p < n_passages; ++p) {
        flat.clear();
        for (uint32_t r = 0; r < rows_each; ++r) {
            const auto v = random_unit(rng, dim);
            flat.insert(flat.end(), v.begin(), v.end());
        }
        set.append_passage(p, flat.data(), rows_each);
    }
    return set;
}

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

}  // namespace test_helpers
