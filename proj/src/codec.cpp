// Copyright 2026-present the lire project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lire/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lire/binary.hpp"
#include "lire/error.hpp"
#include "lire/log.hpp"
#include "lire/parallel.hpp"
#include "lire/rng.hpp"

namespace lire {

namespace {

constexpr char kCodecMagic[8] = {'L', 'I', 'C', 'D', 'C', '1', '\0', '\0'};

// Squared Euclidean distance, double accumulation in index order. Every
// nearest-centroid decision in the project goes through this exact kernel so
// tie behavior is identical everywhere.
double sq_l2(const float* a, const float* b, uint32_t dim) {
    double s = 0.0;
    for (uint32_t j = 0; j < dim; ++j) {
        const double diff = static_cast<double>(a[j]) - static_cast<double>(b[j]);
        s += diff * diff;
    }
    return s;
}

uint32_t argmin_centroid(const float* v, const float* centroids, uint64_t k, uint32_t dim) {
    uint32_t best = 0;
    double best_dist = sq_l2(v, centroids, dim);
    for (uint64_t c = 1; c < k; ++c) {
        const double dist = sq_l2(v, centroids + c * dim, dim);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<uint32_t>(c);
        }
    }
    return best;
}

// Linearly interpolated quantile of a sorted sample, p in [0, 1].
double sorted_quantile(const std::vector<float>& sorted, double p) {
    const size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * p;
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) +
           frac * (static_cast<double>(sorted[lo + 1]) - static_cast<double>(sorted[lo]));
}

std::vector<float> kmeanspp_init(const float* points, size_t n, uint32_t dim, uint64_t k,
                                 Rng& rng) {
    std::vector<float> centroids(k * dim);
    std::vector<char> chosen(n, 0);

    const size_t first = rng.below(n);
    std::copy_n(points + first * dim, dim, centroids.begin());
    chosen[first] = 1;

    std::vector<double> dist2(n);
    for (size_t i = 0; i < n; ++i) dist2[i] = sq_l2(points + i * dim, centroids.data(), dim);

    for (uint64_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) total += dist2[i];

        size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            for (size_t i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {  // target landed on the accumulated rounding tail
                for (size_t i = n; i-- > 0;) {
                    if (dist2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        if (pick == n) {  // all remaining points coincide with chosen centroids
            for (size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }

        chosen[pick] = 1;
        float* dst = centroids.data() + c * dim;
        std::copy_n(points + pick * dim, dim, dst);
        for (size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], sq_l2(points + i * dim, dst, dim));
        }
    }
    return centroids;
}

}  // namespace

uint32_t Codec::bucket_of(float r) const {
    const auto it = std::upper_bound(cutoffs.begin(), cutoffs.end(), r);
    return static_cast<uint32_t>(it - cutoffs.begin());
}

uint32_t Codec::nearest_centroid(const float* v) const {
    return argmin_centroid(v, centroids.data(), n_centroids, dim);
}

void Codec::encode_to(const float* v, uint32_t* code_out, uint8_t* residual_out) const {
    const uint32_t t = nearest_centroid(v);
    *code_out = t;
    const float* centroid = centroids.data() + static_cast<size_t>(t) * dim;
    std::fill_n(residual_out, residual_bytes(), uint8_t{0});
    for (uint32_t j = 0; j < dim; ++j) {
        const uint32_t bucket = bucket_of(v[j] - centroid[j]);
        const size_t bit = static_cast<size_t>(bits) * j;
        residual_out[bit >> 3] |= static_cast<uint8_t>(bucket << (bit & 7));
    }
}

void Codec::decode_to(uint32_t code, const uint8_t* residual, float* out) const {
    const float* centroid = centroids.data() + static_cast<size_t>(code) * dim;
    const uint32_t mask = (1u << bits) - 1;
    for (uint32_t j = 0; j < dim; ++j) {
        const size_t bit = static_cast<size_t>(bits) * j;
        const uint32_t bucket = (residual[bit >> 3] >> (bit & 7)) & mask;
        out[j] = centroid[j] + weights[bucket];
    }
}

void Codec::validate() const {
    require(dim >= 1, ErrorKind::malformed_index, "codec: dim must be positive");
    require(bits == 1 || bits == 2, ErrorKind::malformed_index, "codec: bits must be 1 or 2");
    require(n_centroids >= 1 && n_centroids <= (uint64_t{1} << 32),
            ErrorKind::malformed_index, "codec: centroid count out of range");
    require(std::has_single_bit(n_centroids), ErrorKind::malformed_index,
            "codec: centroid count must be a power of two");
    require(centroids.size() == n_centroids * dim, ErrorKind::malformed_index,
            "codec: centroid matrix size mismatch");
    const size_t n_buckets = size_t{1} << bits;
    require(cutoffs.size() == n_buckets - 1, ErrorKind::malformed_index,
            "codec: cutoff count mismatch");
    require(weights.size() == n_buckets, ErrorKind::malformed_index,
            "codec: weight count mismatch");
    for (size_t i = 1; i < cutoffs.size(); ++i) {
        require(cutoffs[i - 1] <= cutoffs[i], ErrorKind::malformed_index,
                "codec: cutoffs not ascending");
    }
}

CompressedVector encode(const Codec& codec, const std::vector<float>& v) {
    require(v.size() == codec.dim, ErrorKind::dimension_mismatch,
            "encode: vector dim " + std::to_string(v.size()) + " vs codec dim " +
                std::to_string(codec.dim));
    CompressedVector cv;
    cv.residual_code.resize(codec.residual_bytes());
    codec.encode_to(v.data(), &cv.centroid_id, cv.residual_code.data());
    return cv;
}

std::vector<float> decode(const Codec& codec, const CompressedVector& cv) {
    require(cv.centroid_id < codec.n_centroids, ErrorKind::corrupt_code,
            "decode: centroid id out of range");
    require(cv.residual_code.size() == codec.residual_bytes(), ErrorKind::corrupt_code,
            "decode: residual code has " + std::to_string(cv.residual_code.size()) +
                " bytes, expected " + std::to_string(codec.residual_bytes()));
    std::vector<float> out(codec.dim);
    codec.decode_to(cv.centroid_id, cv.residual_code.data(), out.data());
    return out;
}

uint64_t select_num_centroids(uint64_t n_embeddings) {
    require(n_embeddings >= 1, ErrorKind::invalid_argument, "n_embeddings must be positive");
    // Largest e with 4^e <= 256 * n  <=>  2^e <= 16 * sqrt(n).
    const unsigned __int128 m = static_cast<unsigned __int128>(n_embeddings) * 256;
    int e = 0;
    while ((static_cast<unsigned __int128>(1) << (2 * (e + 1))) <= m && e + 1 <= 32) e++;
    uint64_t k = uint64_t{1} << e;
    k = std::max<uint64_t>(k, 16);
    k = std::min(k, uint64_t{1} << 32);
    if (k > n_embeddings) k = std::bit_floor(n_embeddings);
    return k;
}

std::vector<float> train_kmeans(const float* sample, size_t n, uint32_t dim, uint64_t k,
                                uint32_t iters, uint64_t seed,
                                std::vector<double>* objective_trace, int threads) {
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");
    require(iters >= 1, ErrorKind::invalid_argument, "iters must be positive");
    if (n < k) {
        fail(ErrorKind::insufficient_sample,
             "k-means: " + std::to_string(n) + " points for k=" + std::to_string(k));
    }

    Rng rng(seed);
    std::vector<float> centroids = kmeanspp_init(sample, n, dim, k, rng);
    if (objective_trace) objective_trace->clear();

    std::vector<uint32_t> assign(n);
    std::vector<double> dist(n);
    for (uint32_t it = 0; it < iters; ++it) {
        parallel_for(n, threads, [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                const float* p = sample + i * dim;
                uint32_t best = 0;
                double best_dist = sq_l2(p, centroids.data(), dim);
                for (uint64_t c = 1; c < k; ++c) {
                    const double d = sq_l2(p, centroids.data() + c * dim, dim);
                    if (d < best_dist) {
                        best_dist = d;
                        best = static_cast<uint32_t>(c);
                    }
                }
                assign[i] = best;
                dist[i] = best_dist;
            }
        });

        std::vector<uint64_t> counts(k, 0);
        for (size_t i = 0; i < n; ++i) counts[assign[i]]++;

        // Reseed empty clusters to the farthest point from its centroid
        // (ties to the lowest point index), one point per empty cluster.
        std::vector<size_t> order;
        for (uint64_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            if (order.empty()) {
                order.resize(n);
                for (size_t i = 0; i < n; ++i) order[i] = i;
                std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                    if (dist[a] != dist[b]) return dist[a] > dist[b];
                    return a < b;
                });
            }
            for (const size_t i : order) {
                if (counts[assign[i]] <= 1) continue;  // keep donor clusters non-empty
                counts[assign[i]]--;
                assign[i] = static_cast<uint32_t>(c);
                counts[c] = 1;
                dist[i] = 0.0;
                std::copy_n(sample + i * dim, dim, centroids.begin() + c * dim);
                break;
            }
        }

        if (objective_trace) {
            double obj = 0.0;
            for (size_t i = 0; i < n; ++i) obj += dist[i];
            objective_trace->push_back(obj);
        }

        std::vector<double> sums(k * dim, 0.0);
        for (size_t i = 0; i < n; ++i) {
            const float* p = sample + i * dim;
            double* dst = sums.data() + static_cast<size_t>(assign[i]) * dim;
            for (uint32_t j = 0; j < dim; ++j) dst[j] += p[j];
        }
        for (uint64_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (uint32_t j = 0; j < dim; ++j) {
                centroids[c * dim + j] = static_cast<float>(sums[c * dim + j] * inv);
            }
        }
    }
    return centroids;
}

BucketFit fit_buckets(const std::vector<float>& residual_sample, uint32_t bits) {
    require(bits == 1 || bits == 2, ErrorKind::invalid_argument, "bits must be 1 or 2");
    const size_t n_buckets = size_t{1} << bits;
    if (residual_sample.size() < n_buckets) {
        fail(ErrorKind::insufficient_sample,
             "fit_buckets: " + std::to_string(residual_sample.size()) + " values for " +
                 std::to_string(n_buckets) + " buckets");
    }

    std::vector<float> sorted = residual_sample;
    std::sort(sorted.begin(), sorted.end());

    BucketFit fit;
    fit.cutoffs.resize(n_buckets - 1);
    for (size_t i = 1; i < n_buckets; ++i) {
        fit.cutoffs[i - 1] = static_cast<float>(
            sorted_quantile(sorted, static_cast<double>(i) / static_cast<double>(n_buckets)));
    }
    fit.degenerate = sorted.front() == sorted.back();
    if (fit.degenerate) {
        log_warn("fit_buckets: degenerate sample, all residual components equal " +
                 std::to_string(sorted.front()));
    }

    double sum = 0.0, sum_sq = 0.0;
    for (const float v : sorted) {
        sum += v;
        sum_sq += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(sorted.size());
    const double mean = sum / n;
    const double stddev = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));

    std::vector<double> bucket_sum(n_buckets, 0.0);
    std::vector<uint64_t> bucket_count(n_buckets, 0);
    for (const float v : sorted) {
        const auto it = std::upper_bound(fit.cutoffs.begin(), fit.cutoffs.end(), v);
        const size_t b = static_cast<size_t>(it - fit.cutoffs.begin());
        bucket_sum[b] += v;
        bucket_count[b]++;
    }

    fit.weights.resize(n_buckets);
    for (size_t b = 0; b < n_buckets; ++b) {
        if (bucket_count[b] > 0) {
            fit.weights[b] =
                static_cast<float>(bucket_sum[b] / static_cast<double>(bucket_count[b]));
        } else if (b == 0) {
            fit.weights[b] = static_cast<float>(fit.cutoffs.front() - stddev);
        } else if (b == n_buckets - 1) {
            fit.weights[b] = static_cast<float>(fit.cutoffs.back() + stddev);
        } else {
            fit.weights[b] = static_cast<float>(
                (static_cast<double>(fit.cutoffs[b - 1]) + fit.cutoffs[b]) / 2.0);
        }
    }
    return fit;
}

Codec train_codec(const float* sample, size_t n, uint32_t dim, uint64_t k, uint32_t bits,
                  uint64_t seed, int threads) {
    Codec codec;
    codec.dim = dim;
    codec.bits = bits;
    codec.n_centroids = k;
    codec.centroids = train_kmeans(sample, n, dim, k, kKmeansIters, seed, nullptr, threads);

    std::vector<float> residuals(n * dim);
    parallel_for(n, threads, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const float* v = sample + i * dim;
            const float* c =
                codec.centroids.data() +
                static_cast<size_t>(argmin_centroid(v, codec.centroids.data(), k, dim)) * dim;
            for (uint32_t j = 0; j < dim; ++j) residuals[i * dim + j] = v[j] - c[j];
        }
    });

    BucketFit fit = fit_buckets(residuals, bits);
    codec.cutoffs = std::move(fit.cutoffs);
    codec.weights = std::move(fit.weights);
    codec.validate();
    return codec;
}

void save_codec(const Codec& codec, const std::string& path) {
    codec.validate();
    BinaryWriter out(path);
    out.bytes(reinterpret_cast<const uint8_t*>(kCodecMagic), 8);
    out.u32(codec.dim);
    out.u32(codec.bits);
    out.u64(codec.n_centroids);
    out.f32_array(codec.centroids.data(), codec.centroids.size());
    out.f32_array(codec.cutoffs.data(), codec.cutoffs.size());
    out.f32_array(codec.weights.data(), codec.weights.size());
    out.finish();
}

Codec load_codec(const std::string& path) {
    BinaryReader in(path);
    char magic[8];
    in.bytes(reinterpret_cast<uint8_t*>(magic), 8);
    for (int i = 0; i < 8; ++i) {
        require(magic[i] == kCodecMagic[i], ErrorKind::malformed_index, path + ": bad magic");
    }
    Codec codec;
    codec.dim = in.u32();
    codec.bits = in.u32();
    codec.n_centroids = in.u64();
    require(codec.dim >= 1 && (codec.bits == 1 || codec.bits == 2) && codec.n_centroids >= 1,
            ErrorKind::malformed_index, path + ": bad header fields");
    codec.centroids.resize(codec.n_centroids * codec.dim);
    in.f32_array(codec.centroids.data(), codec.centroids.size());
    codec.cutoffs.resize((size_t{1} << codec.bits) - 1);
    in.f32_array(codec.cutoffs.data(), codec.cutoffs.size());
    codec.weights.resize(size_t{1} << codec.bits);
    in.f32_array(codec.weights.data(), codec.weights.size());
    require(in.at_eof(), ErrorKind::malformed_index, path + ": trailing bytes");
    codec.validate();
    return codec;
}

}  // namespace lire
